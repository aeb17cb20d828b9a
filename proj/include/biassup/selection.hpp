#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biassup/preamble.hpp"
#include "biassup/scoring.hpp"

namespace biassup {

struct RankedPreamble {
  Preamble preamble;
  double perplexity = 0.0;
  std::size_t rank = 0;  // 1-based
};

// Scores every candidate standalone (empty prefix, target = its own text) and
// sorts ascending by per-token perplexity.  The sort is stable: candidates
// with equal perplexity keep their input order.  Selection never sees any
// evaluation dataset — by construction, since none is passed in.
std::vector<RankedPreamble> rank_by_perplexity(const std::vector<Preamble>& candidates,
                                               Backend& backend, int parallelism = 1);

// First n of a ranked list (the n most fluent candidates).  n outside
// [1, size] raises NTooLarge.
std::vector<Preamble> top_n(const std::vector<RankedPreamble>& ranked, std::size_t n);

// n candidates drawn without replacement with the toolkit PRNG.  Growing n
// under the same seed extends the same draw sequence, so n and n+1 selections
// share their first n entries.
std::vector<Preamble> random_select(const std::vector<Preamble>& candidates, std::size_t n,
                                    std::uint64_t seed);
// Index form used to keep chained candidate sets aligned across kinds.
std::vector<std::size_t> random_select_indices(std::size_t population, std::size_t n,
                                               std::uint64_t seed);

// JSONL: {"rank","perplexity","text"} plus the preamble's provenance fields.
std::string ranked_to_jsonl(const std::vector<RankedPreamble>& ranked);
std::vector<RankedPreamble> ranked_from_jsonl(std::string_view jsonl);

}  // namespace biassup
