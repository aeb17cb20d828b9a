#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "biassup/commands.hpp"
#include "biassup/errors.hpp"
#include "biassup/run_config.hpp"
#include "biassup/version.hpp"

namespace {

// 2: the config itself is unusable; 4: the scoring backend misbehaved;
// 3: everything else (unreadable/malformed data, validation failures).
int exit_code_for(biassup::ErrorCode code) {
  using biassup::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidConfig:
      return 2;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::Timeout:
    case ErrorCode::HttpError:
    case ErrorCode::TokenBoundaryMisaligned:
    case ErrorCode::MissingLogprobs:
    case ErrorCode::UnknownToken:
      return 4;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gender-bias suppression toolkit: preamble generation, selection and evaluation"};
  app.set_version_flag("--version", biassup::kVersion);
  app.require_subcommand(1);

  std::string config_path;

  CLI::App* validate = app.add_subcommand(
      "validate-lexicon", "Check occupation shares and description word counts");
  validate->add_option("--config", config_path, "run config JSON")->required();

  CLI::App* build =
      app.add_subcommand("build-preambles", "Generate preamble candidates per kind");
  build->add_option("--config", config_path, "run config JSON")->required();
  std::size_t count = 0;
  CLI::Option* count_opt = build->add_option("--count", count, "candidates per kind");

  CLI::App* select = app.add_subcommand("select", "Rank candidates or freeze random draws");
  select->add_option("--config", config_path, "run config JSON")->required();
  std::string mode;
  CLI::Option* mode_opt =
      select->add_option("--mode", mode, "selection mode: perplexity or random");
  std::vector<std::uint64_t> seeds;
  select->add_option("--seeds", seeds, "random-mode seeds")->delimiter(',');

  CLI::App* score = app.add_subcommand("score-bias", "Evaluate RBS/acc_bias per condition");
  score->add_option("--config", config_path, "run config JSON")->required();
  bool with_delta = false;
  score->add_flag("--delta", with_delta, "add relative-change columns vs nc");

  CLI::App* eval = app.add_subcommand("eval-downstream", "Zero-shot multiple-choice accuracy");
  eval->add_option("--config", config_path, "run config JSON")->required();
  std::size_t sample = 0;
  CLI::Option* sample_opt = eval->add_option("--sample", sample, "evaluate a random subset");
  std::uint64_t sample_seed = 0;
  CLI::Option* seed_opt = eval->add_option("--seed", sample_seed, "subset draw seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const biassup::RunConfig config = biassup::load_run_config(config_path);
    if (*validate) return biassup::cmd_validate_lexicon(config);
    if (*build) {
      return biassup::cmd_build_preambles(
          config, count_opt->count() ? std::optional<std::size_t>(count) : std::nullopt);
    }
    if (*select) {
      return biassup::cmd_select(
          config, mode_opt->count() ? std::optional<std::string>(mode) : std::nullopt, seeds);
    }
    if (*score) return biassup::cmd_score_bias(config, with_delta);
    if (*eval) {
      return biassup::cmd_eval_downstream(
          config, sample_opt->count() ? std::optional<std::size_t>(sample) : std::nullopt,
          seed_opt->count() ? std::optional<std::uint64_t>(sample_seed) : std::nullopt);
    }
  } catch (const biassup::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
