#include "biassup/lexicon.hpp"

#include <algorithm>
#include <set>

#include "biassup/csv.hpp"
#include "biassup/errors.hpp"
#include "biassup/io.hpp"

namespace biassup {

namespace {

std::size_t need(const CsvTable& table, std::string_view name) {
  const std::size_t idx = table.column(name);
  if (idx == CsvTable::npos) {
    throw Error(ErrorCode::MissingColumn, std::string(name));
  }
  return idx;
}

}  // namespace

bool Lexicon::is_male_occupation(std::string_view occ) const {
  return std::find(male_occupations.begin(), male_occupations.end(), occ) !=
         male_occupations.end();
}

bool Lexicon::is_female_occupation(std::string_view occ) const {
  return std::find(female_occupations.begin(), female_occupations.end(), occ) !=
         female_occupations.end();
}

bool Lexicon::has_name(std::string_view name, std::string_view gender) const {
  const auto& list = gender == "male" ? male_names : female_names;
  return std::find(list.begin(), list.end(), name) != list.end();
}

SharePartition filter_by_share(const std::vector<OccupationShareRow>& rows, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold,
                "share threshold must be in (0.5, 1], got " + std::to_string(threshold));
  }
  SharePartition out;
  for (const auto& row : rows) {
    if (row.male_share < 0.0 || row.male_share > 1.0) {
      throw Error(ErrorCode::ShareOutOfRange,
                  row.occupation + ": " + std::to_string(row.male_share));
    }
    if (row.male_share >= threshold) {
      out.male.push_back(row);
    } else if (1.0 - row.male_share >= threshold) {
      out.female.push_back(row);
    }
    // Occupations without a dominant gender belong to neither list.
  }
  return out;
}

Lexicon load_lexicon(std::string_view names_csv, std::string_view occupations_csv,
                     std::string_view descriptions_csv, double share_threshold) {
  Lexicon lex;
  lex.share_threshold = share_threshold;

  {
    const CsvTable table = parse_csv(names_csv);
    const std::size_t c_name = need(table, "name");
    const std::size_t c_gender = need(table, "gender");
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
      const std::string& name = row[c_name];
      const std::string& gender = row[c_gender];
      if (!seen.insert(name).second) {
        throw Error(ErrorCode::DuplicateEntry, "name " + name);
      }
      if (gender == "male") {
        lex.male_names.push_back(name);
      } else if (gender == "female") {
        lex.female_names.push_back(name);
      } else {
        throw Error(ErrorCode::UnknownGenderValue, name + ": \"" + gender + "\"");
      }
    }
  }

  std::vector<OccupationShareRow> share_rows;
  {
    const CsvTable table = parse_csv(occupations_csv);
    const std::size_t c_occ = need(table, "occupation");
    const std::size_t c_share = need(table, "male_share");
    const std::size_t c_plural = need(table, "plural_form");
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
      OccupationShareRow entry;
      entry.occupation = row[c_occ];
      entry.plural_form = row[c_plural];
      try {
        entry.male_share = std::stod(row[c_share]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ShareOutOfRange, entry.occupation + ": \"" + row[c_share] + "\"");
      }
      if (entry.male_share < 0.0 || entry.male_share > 1.0) {
        throw Error(ErrorCode::ShareOutOfRange,
                    entry.occupation + ": " + std::to_string(entry.male_share));
      }
      if (entry.plural_form.empty()) {
        throw Error(ErrorCode::MissingDescription, entry.occupation + ": empty plural_form");
      }
      if (!seen.insert(entry.occupation).second) {
        throw Error(ErrorCode::DuplicateEntry, "occupation " + entry.occupation);
      }
      lex.plural_forms[entry.occupation] = entry.plural_form;
      share_rows.push_back(std::move(entry));
    }
  }

  {
    const CsvTable table = parse_csv(descriptions_csv);
    const std::size_t c_occ = need(table, "occupation");
    const std::size_t c_simple = need(table, "simple");
    const std::size_t c_detailed = need(table, "detailed");
    for (const auto& row : table.rows) {
      const std::string& occ = row[c_occ];
      if (lex.plural_forms.find(occ) == lex.plural_forms.end()) {
        throw Error(ErrorCode::UnknownOccupation, "description for unlisted occupation " + occ);
      }
      if (!lex.descriptions.emplace(occ, DescriptionPair{row[c_simple], row[c_detailed]}).second) {
        throw Error(ErrorCode::DuplicateEntry, "description " + occ);
      }
    }
  }

  for (const auto& row : share_rows) {
    if (lex.descriptions.find(row.occupation) == lex.descriptions.end()) {
      throw Error(ErrorCode::MissingDescription, row.occupation);
    }
  }

  const SharePartition partition = filter_by_share(share_rows, share_threshold);
  for (const auto& row : partition.male) lex.male_occupations.push_back(row.occupation);
  for (const auto& row : partition.female) lex.female_occupations.push_back(row.occupation);
  return lex;
}

Lexicon load_lexicon_files(const std::string& names_path, const std::string& occupations_path,
                           const std::string& descriptions_path, double share_threshold) {
  return load_lexicon(read_text_file(names_path), read_text_file(occupations_path),
                      read_text_file(descriptions_path), share_threshold);
}

namespace {

// Space-separated word count; hyphenated compounds are single words because
// splitting happens on spaces only.
int count_words(std::string_view body) {
  int words = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && body[i] == ' ') ++i;
    if (i >= body.size()) break;
    ++words;
    while (i < body.size() && body[i] != ' ') ++i;
  }
  return words;
}

void check_description(const std::string& occupation, const std::string& field,
                       const std::string& text, const std::string& plural, int expected,
                       std::vector<DescriptionViolation>& out) {
  const std::string prefix = plural + " ";
  if (text.rfind(prefix, 0) != 0) {
    out.push_back({occupation, field, "missing-plural-prefix", -1});
    return;
  }
  if (text.empty() || text.back() != '.') {
    out.push_back({occupation, field, "missing-period", -1});
    return;
  }
  const std::string_view body =
      std::string_view(text).substr(prefix.size(), text.size() - prefix.size() - 1);
  const int words = count_words(body);
  if (words != expected) {
    out.push_back({occupation, field, "word-count", words});
  }
}

}  // namespace

ValidationReport validate_descriptions(const Lexicon& lexicon) {
  // Every occupation is checked, including ones the share threshold keeps out
  // of the gendered lists — the threshold is a knob, the descriptions are not.
  ValidationReport report;
  for (const auto& [occ, plural] : lexicon.plural_forms) {
    const auto desc = lexicon.descriptions.find(occ);
    if (desc == lexicon.descriptions.end()) {
      report.violations.push_back({occ, "simple", "missing-description", -1});
      continue;
    }
    ++report.checked;
    check_description(occ, "simple", desc->second.simple, plural, 3, report.violations);
    check_description(occ, "detailed", desc->second.detailed, plural, 7, report.violations);
  }
  return report;
}

}  // namespace biassup
