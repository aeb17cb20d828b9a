#pragma once

#include <string>
#include <string_view>

namespace biassup {

// Reads a whole file as bytes; missing/unreadable paths raise IoError.
std::string read_text_file(const std::string& path);

// Writes via a sibling temp file plus rename, so readers never observe a
// partially written file.  Parent directories are created as needed.
void write_text_file_atomic(const std::string& path, std::string_view content);

}  // namespace biassup
