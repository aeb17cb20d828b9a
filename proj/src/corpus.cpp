#include "biassup/corpus.hpp"

#include <json.hpp>

#include <cctype>

#include "biassup/csv.hpp"
#include "biassup/errors.hpp"
#include "biassup/rng.hpp"

namespace biassup {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::size_t require_column(const CsvTable& table, std::string_view name) {
  const std::size_t idx = table.column(name);
  if (idx == CsvTable::npos) {
    throw Error(ErrorCode::MissingColumn, std::string(name));
  }
  return idx;
}

[[noreturn]] void bad_json(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedJson, "line " + std::to_string(line) + ": " + what);
}

// Accepts an integer or a string holding one (dataset files vary).
int json_int(const json& v, std::size_t line, const char* field) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    try {
      std::size_t pos = 0;
      const int parsed = std::stoi(s, &pos);
      if (pos == s.size()) return parsed;
    } catch (const std::exception&) {
    }
  }
  bad_json(line, std::string(field) + " is not an integer");
}

std::string json_str(const json& obj, std::size_t line, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    bad_json(line, std::string("missing string field ") + field);
  }
  return it->get<std::string>();
}

}  // namespace

PairDataset parse_crows_pairs(std::string_view csv_bytes) {
  const CsvTable table = parse_csv(csv_bytes);
  const std::size_t col_more = require_column(table, "sent_more");
  const std::size_t col_less = require_column(table, "sent_less");
  const std::size_t col_dir = require_column(table, "stereo_antistereo");
  const std::size_t col_type = require_column(table, "bias_type");

  PairDataset out;
  out.pairs.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string more = trim(row[col_more]);
    const std::string less = trim(row[col_less]);
    const std::string& direction = row[col_dir];

    SentencePair pair;
    pair.id = std::to_string(i);
    pair.bias_type = row[col_type];
    if (direction == "stereo") {
      pair.stereotypical = more;
      pair.anti_stereotypical = less;
    } else if (direction == "antistereo") {
      // For antistereo rows sent_more is the anti-stereotypical variant.
      pair.stereotypical = less;
      pair.anti_stereotypical = more;
    } else {
      throw Error(ErrorCode::UnknownDirectionValue,
                  "row " + pair.id + ": \"" + direction + "\"");
    }

    if (pair.stereotypical == pair.anti_stereotypical) {
      ++out.skipped_identical;
      continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

PairDataset filter_bias_type(const PairDataset& dataset, std::string_view bias_type) {
  PairDataset out;
  out.source_path = dataset.source_path;
  for (const auto& pair : dataset.pairs) {
    if (pair.bias_type == bias_type) out.pairs.push_back(pair);
  }
  return out;
}

std::vector<MultipleChoiceItem> parse_multiple_choice(std::string_view jsonl_bytes,
                                                      std::string_view source) {
  const bool copa = source == "copa";
  if (!copa && source != "hellaswag") {
    throw Error(ErrorCode::InvalidConfig, "unknown multiple-choice source \"" +
                                              std::string(source) + "\"");
  }

  std::vector<MultipleChoiceItem> items;
  std::size_t line_no = 0;
  std::size_t ordinal = 0;
  std::size_t start = 0;
  while (start <= jsonl_bytes.size()) {
    std::size_t end = jsonl_bytes.find('\n', start);
    if (end == std::string_view::npos) end = jsonl_bytes.size();
    std::string_view line = jsonl_bytes.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (end == jsonl_bytes.size()) break;
      continue;
    }

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      bad_json(line_no, e.what());
    }
    if (!obj.is_object()) bad_json(line_no, "not a JSON object");

    MultipleChoiceItem item;
    item.source = std::string(source);
    if (copa) {
      item.premise = json_str(obj, line_no, "premise");
      if (!obj.contains("choice1") || !obj.contains("choice2")) {
        throw Error(ErrorCode::WrongChoiceCount,
                    "line " + std::to_string(line_no) + ": copa item needs choice1 and choice2");
      }
      item.choices = {json_str(obj, line_no, "choice1"), json_str(obj, line_no, "choice2")};
      if (obj.contains("question")) item.question = json_str(obj, line_no, "question");
      if (!obj.contains("label")) bad_json(line_no, "missing label");
      const int label = json_int(obj["label"], line_no, "label");
      if (label < 1 || label > 2) {
        throw Error(ErrorCode::LabelOutOfRange,
                    "line " + std::to_string(line_no) + ": copa label " + std::to_string(label));
      }
      item.gold_index = label - 1;
      item.id = obj.contains("idx") ? std::to_string(json_int(obj["idx"], line_no, "idx"))
                                    : std::to_string(ordinal);
    } else {
      item.premise = json_str(obj, line_no, "ctx");
      if (!obj.contains("endings") || !obj["endings"].is_array()) {
        throw Error(ErrorCode::WrongChoiceCount,
                    "line " + std::to_string(line_no) + ": hellaswag item needs endings");
      }
      for (const auto& e : obj["endings"]) {
        if (!e.is_string()) bad_json(line_no, "ending is not a string");
        item.choices.push_back(e.get<std::string>());
      }
      if (item.choices.size() != 4) {
        throw Error(ErrorCode::WrongChoiceCount,
                    "line " + std::to_string(line_no) + ": expected 4 endings, got " +
                        std::to_string(item.choices.size()));
      }
      if (!obj.contains("label")) bad_json(line_no, "missing label");
      const int label = json_int(obj["label"], line_no, "label");
      if (label < 0 || label > 3) {
        throw Error(ErrorCode::LabelOutOfRange, "line " + std::to_string(line_no) +
                                                    ": hellaswag label " + std::to_string(label));
      }
      item.gold_index = label;
      item.id = obj.contains("ind") ? std::to_string(json_int(obj["ind"], line_no, "ind"))
                                    : std::to_string(ordinal);
    }
    items.push_back(std::move(item));
    ++ordinal;
    if (end == jsonl_bytes.size()) break;
  }
  return items;
}

std::vector<MultipleChoiceItem> sample_items(const std::vector<MultipleChoiceItem>& items,
                                             std::size_t n, std::uint64_t seed) {
  if (n > items.size()) {
    throw Error(ErrorCode::SampleTooLarge, "requested " + std::to_string(n) + " of " +
                                               std::to_string(items.size()) + " items");
  }
  Rng rng(seed);
  std::vector<MultipleChoiceItem> out;
  out.reserve(n);
  for (std::size_t idx : rng.sample_indices(items.size(), n)) {
    out.push_back(items[idx]);
  }
  return out;
}

std::string to_jsonl(const PairDataset& dataset) {
  std::string out;
  for (const auto& pair : dataset.pairs) {
    json obj = {{"id", pair.id},
                {"stereotypical", pair.stereotypical},
                {"anti_stereotypical", pair.anti_stereotypical},
                {"bias_type", pair.bias_type}};
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::string to_jsonl(const std::vector<MultipleChoiceItem>& items) {
  std::string out;
  for (const auto& item : items) {
    json obj = {{"id", item.id},         {"premise", item.premise},
                {"choices", item.choices}, {"gold_index", item.gold_index},
                {"source", item.source}};
    if (!item.question.empty()) obj["question"] = item.question;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::string to_crows_csv(const PairDataset& dataset) {
  std::string out = "sent_more,sent_less,stereo_antistereo,bias_type\n";
  for (const auto& pair : dataset.pairs) {
    out += to_csv_line({pair.stereotypical, pair.anti_stereotypical, "stereo", pair.bias_type});
  }
  return out;
}

}  // namespace biassup
