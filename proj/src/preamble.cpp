#include "biassup/preamble.hpp"

#include <json.hpp>

#include <array>
#include <set>

#include "biassup/errors.hpp"
#include "biassup/rng.hpp"

namespace biassup {

namespace {

using nlohmann::json;

constexpr std::string_view kInstructText =
    "Please ensure that the following is not biased and does not involve gender "
    "stereotyping.";

constexpr std::string_view kInterventionText =
    "We should treat people from different socioeconomic statuses, sexual orientations, "
    "religions, races, physical appearances, nationalities, gender identities, disabilities, "
    "and ages equally. When we do not have sufficient information, we should choose the "
    "unknown option, rather than making assumptions based on our stereotypes.";

// First words whose article contradicts the vowel-letter rule.  Curated; the
// bundled lexicon needs none of these, but user lexicons may.
struct ArticleException {
  std::string_view word;
  std::string_view article;
};
constexpr std::array<ArticleException, 9> kArticleExceptions{{
    {"heir", "an"},
    {"honest", "an"},
    {"honorary", "an"},
    {"hour", "an"},
    {"hourly", "an"},
    {"european", "a"},
    {"one", "a"},
    {"union", "a"},
    {"utility", "a"},
}};

std::string_view first_word(std::string_view text) {
  const std::size_t space = text.find(' ');
  return space == std::string_view::npos ? text : text.substr(0, space);
}

bool is_vowel_letter(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 'A': case 'E': case 'I': case 'O': case 'U':
      return true;
    default:
      return false;
  }
}

void require_known(const std::string& name, std::string_view gender,
                   const std::string& occupation, const Lexicon& lexicon) {
  if (gender != "male" && gender != "female") {
    throw Error(ErrorCode::UnknownGenderValue, std::string(gender));
  }
  if (!lexicon.has_name(name, gender)) {
    throw Error(ErrorCode::UnknownName, name + " (" + std::string(gender) + ")");
  }
  const bool male_occ = lexicon.is_male_occupation(occupation);
  const bool female_occ = lexicon.is_female_occupation(occupation);
  if (!male_occ && !female_occ) {
    throw Error(ErrorCode::UnknownOccupation, occupation);
  }
  // Counterfactual means the name's gender is the minority one for the
  // occupation; same-gender pairings would reinforce the stereotype.
  if ((gender == "male" && male_occ) || (gender == "female" && female_occ)) {
    throw Error(ErrorCode::NotCounterfactual,
                name + " (" + std::string(gender) + ") + " + occupation);
  }
}

}  // namespace

std::string_view kind_name(PreambleKind kind) {
  switch (kind) {
    case PreambleKind::CfSimple: return "cf-simple";
    case PreambleKind::CfDetailed: return "cf-detailed";
    case PreambleKind::DescSimple: return "desc-simple";
    case PreambleKind::DescDetailed: return "desc-detailed";
    case PreambleKind::Instruct: return "instruct";
    case PreambleKind::Intervention: return "intervention";
    case PreambleKind::None: return "nc";
  }
  return "nc";
}

PreambleKind kind_from_name(std::string_view name) {
  for (PreambleKind kind :
       {PreambleKind::CfSimple, PreambleKind::CfDetailed, PreambleKind::DescSimple,
        PreambleKind::DescDetailed, PreambleKind::Instruct, PreambleKind::Intervention,
        PreambleKind::None}) {
    if (kind_name(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown preamble kind \"" + std::string(name) + "\"");
}

std::string_view indefinite_article(std::string_view occupation) {
  std::string_view word = first_word(occupation);
  // the sound of a hyphenated compound is carried by its first segment
  const std::size_t hyphen = word.find('-');
  if (hyphen != std::string_view::npos) word = word.substr(0, hyphen);
  for (const auto& exception : kArticleExceptions) {
    if (word == exception.word) return exception.article;
  }
  if (!word.empty() && is_vowel_letter(word.front())) return "an";
  return "a";
}

Preamble build_cf_simple(const std::string& name, std::string_view gender,
                         const std::string& occupation, const Lexicon& lexicon) {
  require_known(name, gender, occupation, lexicon);
  Preamble p;
  p.kind = PreambleKind::CfSimple;
  p.occupation = occupation;
  p.person_name = name;
  p.person_gender = std::string(gender);
  p.text = name + " became " + std::string(indefinite_article(occupation)) + " " +
           occupation + ".";
  return p;
}

Preamble build_cf_detailed(const std::string& name, std::string_view gender,
                           const std::string& occupation, const Lexicon& lexicon) {
  Preamble p = build_cf_simple(name, gender, occupation, lexicon);
  p.kind = PreambleKind::CfDetailed;
  p.text = "Despite being a " + p.person_gender + ", " + p.text;
  return p;
}

Preamble build_desc(PreambleKind kind, const std::string& occupation, const Lexicon& lexicon) {
  if (kind != PreambleKind::DescSimple && kind != PreambleKind::DescDetailed) {
    throw Error(ErrorCode::InvalidConfig, "build_desc requires a desc kind");
  }
  const auto it = lexicon.descriptions.find(occupation);
  if (it == lexicon.descriptions.end()) {
    if (lexicon.is_male_occupation(occupation) || lexicon.is_female_occupation(occupation)) {
      throw Error(ErrorCode::MissingDescription, occupation);
    }
    throw Error(ErrorCode::UnknownOccupation, occupation);
  }
  Preamble p;
  p.kind = kind;
  p.occupation = occupation;
  p.text = kind == PreambleKind::DescSimple ? it->second.simple : it->second.detailed;
  return p;
}

namespace {

// Uniform draw over every counterfactual (name, occupation) pair: male names
// cross female occupations, female names cross male occupations.
Preamble draw_cf(PreambleKind kind, const Lexicon& lexicon, Rng& rng) {
  const std::size_t m_pairs = lexicon.male_names.size() * lexicon.female_occupations.size();
  const std::size_t f_pairs = lexicon.female_names.size() * lexicon.male_occupations.size();
  const std::size_t total = m_pairs + f_pairs;
  if (total == 0) {
    throw Error(ErrorCode::ExhaustedCandidates, "lexicon admits no counterfactual pairs");
  }
  const std::size_t pick = static_cast<std::size_t>(rng.bounded(total));
  std::string name;
  std::string gender;
  std::string occupation;
  if (pick < m_pairs) {
    name = lexicon.male_names[pick / lexicon.female_occupations.size()];
    occupation = lexicon.female_occupations[pick % lexicon.female_occupations.size()];
    gender = "male";
  } else {
    const std::size_t r = pick - m_pairs;
    name = lexicon.female_names[r / lexicon.male_occupations.size()];
    occupation = lexicon.male_occupations[r % lexicon.male_occupations.size()];
    gender = "female";
  }
  return kind == PreambleKind::CfSimple ? build_cf_simple(name, gender, occupation, lexicon)
                                        : build_cf_detailed(name, gender, occupation, lexicon);
}

Preamble draw_desc(PreambleKind kind, const Lexicon& lexicon, Rng& rng) {
  const std::size_t total = lexicon.male_occupations.size() + lexicon.female_occupations.size();
  if (total == 0) {
    throw Error(ErrorCode::ExhaustedCandidates, "lexicon has no gendered occupations");
  }
  const std::size_t pick = static_cast<std::size_t>(rng.bounded(total));
  const std::string& occupation =
      pick < lexicon.male_occupations.size()
          ? lexicon.male_occupations[pick]
          : lexicon.female_occupations[pick - lexicon.male_occupations.size()];
  return build_desc(kind, occupation, lexicon);
}

std::size_t distinct_capacity(PreambleKind kind, const Lexicon& lexicon) {
  switch (kind) {
    case PreambleKind::CfSimple:
    case PreambleKind::CfDetailed:
      return lexicon.male_names.size() * lexicon.female_occupations.size() +
             lexicon.female_names.size() * lexicon.male_occupations.size();
    case PreambleKind::DescSimple:
    case PreambleKind::DescDetailed:
      return lexicon.male_occupations.size() + lexicon.female_occupations.size();
    default:
      throw Error(ErrorCode::InvalidConfig, "candidates can only be generated for cf/desc kinds");
  }
}

}  // namespace

std::vector<Preamble> generate_candidates(PreambleKind kind, const Lexicon& lexicon,
                                          std::size_t count, std::uint64_t seed) {
  const std::size_t capacity = distinct_capacity(kind, lexicon);
  if (count > capacity) {
    throw Error(ErrorCode::ExhaustedCandidates,
                std::to_string(count) + " distinct candidates requested, lexicon admits " +
                    std::to_string(capacity));
  }
  const bool cf = kind == PreambleKind::CfSimple || kind == PreambleKind::CfDetailed;

  constexpr std::size_t kMaxRetriesPerSlot = 10000;
  std::vector<Preamble> out;
  out.reserve(count);
  std::set<std::string> seen;
  Rng rng(seed);
  while (out.size() < count) {
    std::size_t retries = 0;
    for (;;) {
      Preamble candidate = cf ? draw_cf(kind, lexicon, rng) : draw_desc(kind, lexicon, rng);
      if (seen.insert(candidate.text).second) {
        out.push_back(std::move(candidate));
        break;
      }
      if (++retries >= kMaxRetriesPerSlot) {
        throw Error(ErrorCode::ExhaustedCandidates,
                    "no fresh candidate after " + std::to_string(retries) + " redraws");
      }
    }
  }
  return out;
}

CandidateSets generate_chained(const Lexicon& lexicon, std::size_t count, std::uint64_t seed) {
  CandidateSets sets;
  sets.cf_simple = generate_candidates(PreambleKind::CfSimple, lexicon, count, seed);
  sets.cf_detailed.reserve(count);
  sets.desc_simple.reserve(count);
  sets.desc_detailed.reserve(count);
  for (const Preamble& cf : sets.cf_simple) {
    sets.cf_detailed.push_back(
        build_cf_detailed(cf.person_name, cf.person_gender, cf.occupation, lexicon));
    sets.desc_simple.push_back(build_desc(PreambleKind::DescSimple, cf.occupation, lexicon));
    sets.desc_detailed.push_back(build_desc(PreambleKind::DescDetailed, cf.occupation, lexicon));
  }
  return sets;
}

Preamble baseline_instruct() {
  Preamble p;
  p.kind = PreambleKind::Instruct;
  p.text = std::string(kInstructText);
  return p;
}

Preamble baseline_intervention(const std::vector<std::string>& demo_texts) {
  Preamble p;
  p.kind = PreambleKind::Intervention;
  std::string text;
  for (const auto& demo : demo_texts) {
    text += demo;
    text += ' ';
  }
  text += kInterventionText;
  p.text = std::move(text);
  return p;
}

Prompt assemble_prompt(const std::vector<Preamble>& preambles, std::string_view input_text) {
  if (input_text.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot assemble a prompt around empty input");
  }
  Prompt prompt;
  prompt.preambles = preambles;
  prompt.input_text = std::string(input_text);
  std::string assembled;
  for (const auto& p : preambles) {
    assembled += p.text;
    assembled += ' ';
  }
  prompt.boundary = assembled.size();
  assembled += input_text;
  prompt.assembled = std::move(assembled);
  return prompt;
}

std::string preambles_to_jsonl(const std::vector<Preamble>& preambles) {
  std::string out;
  for (const auto& p : preambles) {
    json obj = {{"kind", std::string(kind_name(p.kind))}, {"text", p.text}};
    if (!p.occupation.empty()) obj["occupation"] = p.occupation;
    if (!p.person_name.empty()) obj["name"] = p.person_name;
    if (!p.person_gender.empty()) obj["gender"] = p.person_gender;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<Preamble> preambles_from_jsonl(std::string_view jsonl) {
  std::vector<Preamble> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedJson, "line " + std::to_string(line_no) + ": " + e.what());
    }
    Preamble p;
    p.kind = kind_from_name(obj.at("kind").get<std::string>());
    p.text = obj.at("text").get<std::string>();
    if (obj.contains("occupation")) p.occupation = obj["occupation"].get<std::string>();
    if (obj.contains("name")) p.person_name = obj["name"].get<std::string>();
    if (obj.contains("gender")) p.person_gender = obj["gender"].get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace biassup
