#pragma once

#include <string>
#include <string_view>

namespace biassup {

// Lowercase hex SHA-256 of the exact input bytes (OpenSSL EVP underneath).
std::string sha256_hex(std::string_view data);

}  // namespace biassup
