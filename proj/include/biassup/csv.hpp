#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace biassup {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based physical line on which each data row starts (quoted fields may
  // span lines, so this is not simply row index + 2).
  std::vector<std::size_t> row_lines;

  // Index of a header column, or npos when absent.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t column(std::string_view name) const;
};

// Strict RFC 4180 parser: quoted fields may contain separators, newlines and
// doubled quotes; a bare quote inside an unquoted field, text after a closing
// quote, or EOF inside a quoted field raise MalformedCsv with a line number.
// Both LF and CRLF line endings are accepted; fully blank lines are skipped;
// a leading UTF-8 BOM is stripped.  Every row must have as many fields as the
// header.
CsvTable parse_csv(std::string_view text);

// Field quoted only when it needs to be (contains comma, quote or newline).
std::string csv_escape(std::string_view field);
std::string to_csv_line(const std::vector<std::string>& fields);

}  // namespace biassup
