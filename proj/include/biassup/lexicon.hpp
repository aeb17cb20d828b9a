#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace biassup {

struct OccupationShareRow {
  std::string occupation;
  double male_share = 0.0;
  std::string plural_form;
};

struct DescriptionPair {
  std::string simple;    // plural occupation + 3 descriptive words + period
  std::string detailed;  // plural occupation + 7 descriptive words + period
};

struct Lexicon {
  std::vector<std::string> male_names;
  std::vector<std::string> female_names;
  // File order is preserved; candidate generation indexes into these.
  std::vector<std::string> male_occupations;
  std::vector<std::string> female_occupations;
  std::map<std::string, DescriptionPair> descriptions;
  std::map<std::string, std::string> plural_forms;
  double share_threshold = 0.70;

  bool is_male_occupation(std::string_view occ) const;
  bool is_female_occupation(std::string_view occ) const;
  bool has_name(std::string_view name, std::string_view gender) const;
};

struct SharePartition {
  std::vector<OccupationShareRow> male;
  std::vector<OccupationShareRow> female;
};

// An occupation is gendered when one gender holds at least `threshold` of it:
// male iff male_share >= threshold, female iff 1 - male_share >= threshold.
// Thresholds at or below 0.5 would let the lists overlap and are rejected.
SharePartition filter_by_share(const std::vector<OccupationShareRow>& rows, double threshold);

// Builds a lexicon from three CSVs:
//   names.csv        name,gender            (gender: male|female)
//   occupations.csv  occupation,male_share,plural_form
//   descriptions.csv occupation,simple,detailed
// Every occupation row must have a descriptions row and vice versa.
Lexicon load_lexicon(std::string_view names_csv, std::string_view occupations_csv,
                     std::string_view descriptions_csv, double share_threshold = 0.70);
Lexicon load_lexicon_files(const std::string& names_path, const std::string& occupations_path,
                           const std::string& descriptions_path, double share_threshold = 0.70);

struct DescriptionViolation {
  std::string occupation;
  std::string field;   // "simple" or "detailed"
  std::string reason;  // "word-count", "missing-plural-prefix", "missing-period"
  int observed_words = -1;
};

struct ValidationReport {
  std::size_t checked = 0;
  std::vector<DescriptionViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks that each stored description is the plural occupation form followed
// by exactly 3 (simple) or 7 (detailed) space-separated words and a final
// period.  Hyphenated compounds count as one word.  Report-only: callers
// decide whether violations are fatal.
ValidationReport validate_descriptions(const Lexicon& lexicon);

}  // namespace biassup
