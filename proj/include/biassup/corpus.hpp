#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace biassup {

// One minimal pair: the same sentence with only the demographic group swapped.
// `stereotypical` is the variant a biased model prefers.
struct SentencePair {
  std::string id;
  std::string stereotypical;
  std::string anti_stereotypical;
  std::string bias_type;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct PairDataset {
  std::vector<SentencePair> pairs;
  std::string source_path;
  // Rows dropped because both sentences were identical after trimming.
  std::size_t skipped_identical = 0;
};

struct MultipleChoiceItem {
  std::string id;
  std::string premise;
  std::vector<std::string> choices;
  int gold_index = 0;       // 0-based into choices
  std::string source;       // "copa" or "hellaswag"
  std::string question;     // copa cause/effect tag; kept as metadata, never rendered

  friend bool operator==(const MultipleChoiceItem&, const MultipleChoiceItem&) = default;
};

// Parses a CrowS-Pairs style CSV (columns sent_more, sent_less,
// stereo_antistereo, bias_type; extra columns ignored).  Rows marked
// "antistereo" are remapped so that `stereotypical` always holds the
// stereotype-congruent sentence.  Ids are 0-based row ordinals as strings.
PairDataset parse_crows_pairs(std::string_view csv_bytes);

// Keeps only pairs with the given bias_type tag; ids are preserved.
PairDataset filter_bias_type(const PairDataset& dataset, std::string_view bias_type);

// Parses newline-delimited JSON for source "copa" (premise/choice1/choice2/
// question/label, 1-based label) or "hellaswag" (ctx/endings[4]/label,
// 0-based label).
std::vector<MultipleChoiceItem> parse_multiple_choice(std::string_view jsonl_bytes,
                                                      std::string_view source);

// Draws n items without replacement using the toolkit PRNG; n == size yields
// a shuffled permutation.
std::vector<MultipleChoiceItem> sample_items(const std::vector<MultipleChoiceItem>& items,
                                             std::size_t n, std::uint64_t seed);

// Canonical dumps (one JSON object per line) and the CSV writer used for
// round-trips.
std::string to_jsonl(const PairDataset& dataset);
std::string to_jsonl(const std::vector<MultipleChoiceItem>& items);
std::string to_crows_csv(const PairDataset& dataset);

}  // namespace biassup
