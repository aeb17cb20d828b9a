#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biassup/lexicon.hpp"

namespace biassup {

enum class PreambleKind {
  CfSimple,      // "{Name} became a(n) {occupation}."
  CfDetailed,    // "Despite being a {male|female}, " + CfSimple
  DescSimple,    // stored 3-word occupation description
  DescDetailed,  // stored 7-word occupation description
  Instruct,      // fixed debiasing instruction
  Intervention,  // optional demos + fixed intervention instruction
  None,          // no preamble ("nc")
};

std::string_view kind_name(PreambleKind kind);  // "cf-simple", "desc-detailed", ...
PreambleKind kind_from_name(std::string_view name);

struct Preamble {
  PreambleKind kind = PreambleKind::None;
  std::string text;
  std::string occupation;     // empty for baselines
  std::string person_name;    // CF kinds only
  std::string person_gender;  // "male" or "female", CF kinds only

  friend bool operator==(const Preamble&, const Preamble&) = default;
};

struct Prompt {
  std::vector<Preamble> preambles;
  std::string input_text;
  std::string assembled;
  std::size_t boundary = 0;  // offset where input_text begins in assembled
};

// "a" vs "an" for the occupation's first word: vowel-initial letter plus a
// curated exception table for spelling/sound mismatches ("hour", "union", ...).
std::string_view indefinite_article(std::string_view occupation);

// Counterfactual templates pair a name of gender `gender` with an occupation
// from the opposite gender's list; stereotype-congruent pairings are refused.
Preamble build_cf_simple(const std::string& name, std::string_view gender,
                         const std::string& occupation, const Lexicon& lexicon);
Preamble build_cf_detailed(const std::string& name, std::string_view gender,
                           const std::string& occupation, const Lexicon& lexicon);

// kind must be DescSimple or DescDetailed; the stored description is used
// verbatim.
Preamble build_desc(PreambleKind kind, const std::string& occupation, const Lexicon& lexicon);

// `count` distinct candidates drawn uniformly with the toolkit PRNG
// (CF kinds: over all counterfactual name/occupation pairs; Desc kinds: over
// occupations).  Duplicate texts are redrawn; an impossible request raises
// ExhaustedCandidates.
std::vector<Preamble> generate_candidates(PreambleKind kind, const Lexicon& lexicon,
                                          std::size_t count, std::uint64_t seed);

// One CF-simple draw feeds all four kinds, so the i-th candidate of every
// kind shares the same occupation (and name, for CF).  This is the default
// generation mode for multi-kind runs.
struct CandidateSets {
  std::vector<Preamble> cf_simple;
  std::vector<Preamble> cf_detailed;
  std::vector<Preamble> desc_simple;
  std::vector<Preamble> desc_detailed;
};
CandidateSets generate_chained(const Lexicon& lexicon, std::size_t count, std::uint64_t seed);

Preamble baseline_instruct();
// join(demos, " ") + " " + instruction; with no demos, the instruction alone.
Preamble baseline_intervention(const std::vector<std::string>& demo_texts);

// join(preamble texts, " ") + " " + input_text; boundary records where the
// input begins.  Empty input is an error; an empty preamble list yields the
// input unchanged.
Prompt assemble_prompt(const std::vector<Preamble>& preambles, std::string_view input_text);

// JSONL round-trip: {"kind","text","occupation","name","gender"} per line.
std::string preambles_to_jsonl(const std::vector<Preamble>& preambles);
std::vector<Preamble> preambles_from_jsonl(std::string_view jsonl);

}  // namespace biassup
