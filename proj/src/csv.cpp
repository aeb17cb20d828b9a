#include "biassup/csv.hpp"

#include "biassup/errors.hpp"

namespace biassup {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return npos;
}

CsvTable parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xef\xbb\xbf") {
    text.remove_prefix(3);
  }

  CsvTable table;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  while (i < n) {
    // Skip blank physical lines between records.
    if (text[i] == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
      ++line;
      i += 2;
      continue;
    }

    const std::size_t row_line = line;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;  // current field began with a quote

    for (;; ++i) {
      if (i >= n) {
        if (in_quotes) fail(row_line, "unterminated quoted field");
        fields.push_back(std::move(field));
        break;
      }
      const char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        if (!field.empty() || was_quoted) fail(line, "quote inside unquoted field");
        in_quotes = true;
        was_quoted = true;
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        continue;
      }
      if (c == '\n' || (c == '\r' && i + 1 < n && text[i + 1] == '\n')) {
        fields.push_back(std::move(field));
        ++line;
        i += (c == '\r') ? 2 : 1;
        break;
      }
      if (was_quoted) fail(line, "data after closing quote");
      field.push_back(c);
    }

    if (table.header.empty() && table.rows.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        fail(row_line, "expected " + std::to_string(table.header.size()) + " fields, got " +
                           std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.row_lines.push_back(row_line);
    }
  }

  if (table.header.empty()) {
    fail(1, "empty input");
  }
  return table;
}

std::string csv_escape(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string to_csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace biassup
