#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biassup/run_config.hpp"

namespace biassup {

// CLI verbs as library functions.  Each returns a process exit code (0 on
// success; validate-lexicon returns 3 when the lexicon has violations).
// Hard failures throw Error; the binary maps error codes to exit classes.

int cmd_validate_lexicon(const RunConfig& config);

// Writes candidates_<kind>.jsonl per configured kind under output_dir.
int cmd_build_preambles(const RunConfig& config,
                        std::optional<std::size_t> count_override = std::nullopt);

// Freezes selections: ranked_<kind>.jsonl (perplexity mode) or one
// random_<kind>_seed<k>.jsonl per seed (random mode).
int cmd_select(const RunConfig& config,
               std::optional<std::string> mode_override = std::nullopt,
               std::vector<std::uint64_t> seeds_override = {});

// Evaluates nc, both baselines, and every (kind, N); writes
// bias_report.json/.csv plus a per-pair trace.  with_delta adds relative
// change columns against the nc row.
int cmd_score_bias(const RunConfig& config, bool with_delta = false);

// Evaluates nc and every (kind, N) on the configured multiple-choice sets;
// writes downstream_report.json/.csv plus a per-item trace.
int cmd_eval_downstream(const RunConfig& config,
                        std::optional<std::size_t> sample = std::nullopt,
                        std::optional<std::uint64_t> sample_seed = std::nullopt);

}  // namespace biassup
