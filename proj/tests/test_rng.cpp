#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "biassup/errors.hpp"
#include "biassup/rng.hpp"

using biassup::Error;
using biassup::ErrorCode;
using biassup::Rng;

namespace {

std::string fixture_path(const char* name) {
  return std::string(BIASSUP_REPO_ROOT) + "/data/fixtures/" + name;
}

}  // namespace

TEST_CASE("same seed reproduces the same stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(0);
  Rng b(1);
  int differing = 0;
  for (int i = 0; i < 10; ++i) {
    if (a.next_u64() != b.next_u64()) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("bounded stays within range and covers it") {
  Rng rng(7);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const uint64_t v = rng.bounded(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("bounded(1) is always zero") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) CHECK(rng.bounded(1) == 0);
}

TEST_CASE("sample_indices draws distinct indices") {
  Rng rng(11);
  const auto sample = rng.sample_indices(50, 20);
  REQUIRE(sample.size() == 20);
  std::set<std::size_t> unique(sample.begin(), sample.end());
  CHECK(unique.size() == 20);
  for (std::size_t idx : sample) CHECK(idx < 50);
}

TEST_CASE("sample_indices of the whole population is a permutation") {
  Rng rng(5);
  const auto sample = rng.sample_indices(10, 10);
  std::set<std::size_t> unique(sample.begin(), sample.end());
  CHECK(unique.size() == 10);
}

TEST_CASE("sample larger than population is rejected") {
  Rng rng(0);
  CHECK_THROWS_AS(rng.sample_indices(3, 4), Error);
}

TEST_CASE("prefix property: growing k extends the same draw") {
  // The selection machinery relies on this: the n-draw must be a prefix of
  // the (n+1)-draw under the same seed.
  for (uint64_t seed : {0ull, 1ull, 2ull, 99ull}) {
    const auto full = Rng(seed).sample_indices(30, 30);
    for (std::size_t k = 1; k < 30; ++k) {
      const auto partial = Rng(seed).sample_indices(30, k);
      REQUIRE(partial.size() == k);
      CHECK(std::equal(partial.begin(), partial.end(), full.begin()));
    }
  }
}

TEST_CASE("frozen vectors pin the streams across platforms and releases") {
  std::ifstream in(fixture_path("prng_vectors.json"));
  REQUIRE(in.good());
  const nlohmann::json vectors = nlohmann::json::parse(in);

  for (const auto& entry : vectors["next_u64"]) {
    Rng rng(entry["seed"].get<uint64_t>());
    for (const auto& expected : entry["values"]) {
      CHECK(rng.next_u64() == expected.get<uint64_t>());
    }
  }
  for (const auto& entry : vectors["bounded"]) {
    Rng rng(entry["seed"].get<uint64_t>());
    const uint64_t n = entry["n"].get<uint64_t>();
    for (const auto& expected : entry["values"]) {
      CHECK(rng.bounded(n) == expected.get<uint64_t>());
    }
  }
  for (const auto& entry : vectors["sample_indices"]) {
    Rng rng(entry["seed"].get<uint64_t>());
    const auto sample =
        rng.sample_indices(entry["population"].get<std::size_t>(), entry["k"].get<std::size_t>());
    const auto expected = entry["values"].get<std::vector<std::size_t>>();
    CHECK(sample == expected);
  }
}
