#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "biassup/corpus.hpp"
#include "biassup/preamble.hpp"
#include "biassup/scoring.hpp"

namespace biassup {

struct PairScores {
  std::string pair_id;
  double loglik_s = 0.0;  // log-likelihood of the stereotypical sentence
  double loglik_a = 0.0;  // log-likelihood of the anti-stereotypical sentence
  std::size_t tokens_s = 0;
  std::size_t tokens_a = 0;
};

struct BiasReport {
  std::string condition;  // "nc", "cf-simple", "instruct", ...
  std::size_t n_preambles = 0;
  double rbs = 0.0;
  double acc_bias = 0.0;
  // Length-normalized diagnostic (mean of per-token log-likelihood gaps).
  // Not part of the published metric definitions; reported for debugging
  // length confounds only.
  double rbs_per_token = 0.0;
  std::size_t pair_count = 0;
  std::vector<PairScores> per_pair;
  std::string backend_id;
};

// Fraction of pairs where the stereotypical sentence is at least as likely as
// the anti-stereotypical one (ties count as biased).  0.5 is the unbiased
// ideal; empty input is an error.
double acc_bias_score(const std::vector<PairScores>& scores);

// Mean log-likelihood ratio log P(s) - log P(a); 0 is the unbiased ideal.
// Compensated summation keeps the result independent of accumulation order.
double rbs(const std::vector<PairScores>& scores);

// Relative change in percent: 100 * (value - value_nc) / |value_nc|.
// A near-zero baseline (|value_nc| <= 1e-12) cannot anchor a relative change
// and raises DivisionByNearZero.
double delta_percent(double value, double value_nc);

// Condition label for a preamble set: "nc" when empty, the shared kind name
// when uniform, "mixed" otherwise.
std::string derive_condition(const std::vector<Preamble>& preambles);

// Scores both sentences of every pair under the given preambles (prefix =
// preamble span including the joining space, target = the sentence) and
// aggregates.  A scoring failure aborts the run and names the offending pair.
BiasReport evaluate_condition(const PairDataset& dataset, Backend& backend,
                              const std::vector<Preamble>& preambles, int parallelism = 1);

nlohmann::json to_json(const BiasReport& report);

}  // namespace biassup
