#include "biassup/rng.hpp"

#include <limits>
#include <numeric>
#include <utility>

#include "biassup/errors.hpp"

namespace biassup {

std::uint64_t Rng::bounded(std::uint64_t n) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidConfig, "bounded draw from empty range");
  }
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  // Largest value accepted without bias: reject the top (2^64 mod n) outputs.
  const std::uint64_t overhang = (max % n + 1) % n;
  const std::uint64_t top = max - overhang;
  std::uint64_t v = next_u64();
  while (v > top) {
    v = next_u64();
  }
  return v % n;
}

std::vector<std::size_t> Rng::sample_indices(std::size_t population, std::size_t k) {
  if (k > population) {
    throw Error(ErrorCode::SampleTooLarge,
                "requested " + std::to_string(k) + " of " + std::to_string(population));
  }
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace biassup
