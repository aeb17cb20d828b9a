#include "biassup/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "biassup/corpus.hpp"
#include "biassup/csv.hpp"
#include "biassup/downstream.hpp"
#include "biassup/errors.hpp"
#include "biassup/hash.hpp"
#include "biassup/io.hpp"
#include "biassup/lexicon.hpp"
#include "biassup/metrics.hpp"
#include "biassup/preamble.hpp"
#include "biassup/selection.hpp"
#include "biassup/version.hpp"

namespace biassup {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const RunConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

// Shortest round-trip form, same as the JSON reports, so the CSV and JSON
// views of one run never disagree.
std::string fmt(double value) { return json(value).dump(); }

std::string lexicon_hash(const RunConfig& config) {
  const LexiconPaths& lex = config.lexicon;
  if (lex.names.empty() || lex.occupations.empty() || lex.descriptions.empty()) return "";
  return sha256_hex(read_text_file(lex.names) + "\n" + read_text_file(lex.occupations) + "\n" +
                    read_text_file(lex.descriptions));
}

json provenance(const RunConfig& config, const std::string& backend_id) {
  json j{
      {"toolkit_version", kVersion},
      {"backend_id", backend_id},
      {"config_hash", config.config_hash},
      {"selection_mode", config.selection.mode},
  };
  const std::string lex = lexicon_hash(config);
  if (lex.empty()) {
    j["lexicon_hash"] = nullptr;
  } else {
    j["lexicon_hash"] = lex;
  }
  return j;
}

std::vector<std::string> load_demos(const std::string& path) {
  std::vector<std::string> demos;
  if (path.empty()) return demos;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) demos.push_back(line);
  }
  return demos;
}

std::vector<Preamble> load_candidates(const RunConfig& config, PreambleKind kind) {
  const std::string path = out_path(config, "candidates_" + std::string(kind_name(kind)) + ".jsonl");
  if (!fs::exists(path)) {
    throw Error(ErrorCode::IoError, path + " not found; run build-preambles first");
  }
  return preambles_from_jsonl(read_text_file(path));
}

std::vector<RankedPreamble> load_ranked(const RunConfig& config, PreambleKind kind) {
  const std::string path = out_path(config, "ranked_" + std::string(kind_name(kind)) + ".jsonl");
  if (!fs::exists(path)) {
    throw Error(ErrorCode::IoError, path + " not found; run select first");
  }
  return ranked_from_jsonl(read_text_file(path));
}

std::vector<Preamble> load_random_selection(const RunConfig& config, PreambleKind kind,
                                            std::uint64_t seed) {
  const std::string path = out_path(config, "random_" + std::string(kind_name(kind)) + "_seed" +
                                                std::to_string(seed) + ".jsonl");
  if (!fs::exists(path)) {
    throw Error(ErrorCode::IoError, path + " not found; run select --mode random first");
  }
  return preambles_from_jsonl(read_text_file(path));
}

// Selections are stored draw-ordered, so the first n entries are the n-draw.
std::vector<Preamble> first_n(const std::vector<Preamble>& selection, std::size_t n) {
  if (n < 1 || n > selection.size()) {
    throw Error(ErrorCode::NTooLarge,
                "n = " + std::to_string(n) + " outside [1, " + std::to_string(selection.size()) +
                    "]");
  }
  return std::vector<Preamble>(selection.begin(), selection.begin() + static_cast<long>(n));
}

PairDataset load_pairs(const RunConfig& config) {
  if (config.datasets.pairs.empty()) {
    throw Error(ErrorCode::InvalidConfig, "datasets.pairs is required for score-bias");
  }
  PairDataset dataset = parse_crows_pairs(read_text_file(config.datasets.pairs));
  dataset.source_path = config.datasets.pairs;
  if (!config.datasets.bias_type.empty()) {
    dataset = filter_bias_type(dataset, config.datasets.bias_type);
  }
  return dataset;
}

}  // namespace

int cmd_validate_lexicon(const RunConfig& config) {
  const LexiconPaths& lex = config.lexicon;
  if (lex.names.empty() || lex.occupations.empty() || lex.descriptions.empty()) {
    throw Error(ErrorCode::InvalidConfig, "lexicon paths are required for validate-lexicon");
  }
  const Lexicon lexicon =
      load_lexicon_files(lex.names, lex.occupations, lex.descriptions, lex.share_threshold);
  const ValidationReport report = validate_descriptions(lexicon);

  std::cout << "names: " << lexicon.male_names.size() << " male, " << lexicon.female_names.size()
            << " female\n";
  std::cout << "occupations at threshold " << lex.share_threshold << ": "
            << lexicon.male_occupations.size() << " male-dominated, "
            << lexicon.female_occupations.size() << " female-dominated\n";
  for (const DescriptionViolation& v : report.violations) {
    std::cout << "violation: " << v.occupation << " (" << v.field << "): " << v.reason;
    if (v.observed_words >= 0) std::cout << " (" << v.observed_words << " words)";
    std::cout << "\n";
  }
  std::cout << "checked " << report.checked << " descriptions, " << report.violations.size()
            << " violations\n";
  return report.ok() ? 0 : 3;
}

int cmd_build_preambles(const RunConfig& config, std::optional<std::size_t> count_override) {
  const LexiconPaths& lex = config.lexicon;
  if (lex.names.empty() || lex.occupations.empty() || lex.descriptions.empty()) {
    throw Error(ErrorCode::InvalidConfig, "lexicon paths are required for build-preambles");
  }
  const Lexicon lexicon =
      load_lexicon_files(lex.names, lex.occupations, lex.descriptions, lex.share_threshold);
  const std::size_t count = count_override.value_or(config.preambles.count);
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "count must be >= 1");

  const auto& kinds = config.preambles.kinds;
  const bool wants_cf =
      std::find(kinds.begin(), kinds.end(), PreambleKind::CfSimple) != kinds.end() ||
      std::find(kinds.begin(), kinds.end(), PreambleKind::CfDetailed) != kinds.end();

  auto write_kind = [&](PreambleKind kind, const std::vector<Preamble>& candidates) {
    const std::string path =
        out_path(config, "candidates_" + std::string(kind_name(kind)) + ".jsonl");
    write_text_file_atomic(path, preambles_to_jsonl(candidates));
    std::cout << "wrote " << candidates.size() << " candidates to " << path << "\n";
  };

  if (wants_cf) {
    // One CF draw sequence feeds every kind, keeping the i-th candidates
    // occupation-aligned across files.
    const CandidateSets sets = generate_chained(lexicon, count, config.preambles.seed);
    for (PreambleKind kind : kinds) {
      switch (kind) {
        case PreambleKind::CfSimple: write_kind(kind, sets.cf_simple); break;
        case PreambleKind::CfDetailed: write_kind(kind, sets.cf_detailed); break;
        case PreambleKind::DescSimple: write_kind(kind, sets.desc_simple); break;
        case PreambleKind::DescDetailed: write_kind(kind, sets.desc_detailed); break;
        default: break;
      }
    }
  } else {
    for (PreambleKind kind : kinds) {
      write_kind(kind, generate_candidates(kind, lexicon, count, config.preambles.seed));
    }
  }
  return 0;
}

int cmd_select(const RunConfig& config, std::optional<std::string> mode_override,
               std::vector<std::uint64_t> seeds_override) {
  const std::string mode = mode_override.value_or(config.selection.mode);
  if (mode != "perplexity" && mode != "random") {
    throw Error(ErrorCode::InvalidConfig, "selection mode must be \"perplexity\" or \"random\"");
  }

  if (mode == "perplexity") {
    BackendHandle handle = make_backend(config.backend);
    for (PreambleKind kind : config.preambles.kinds) {
      const std::vector<Preamble> candidates = load_candidates(config, kind);
      const std::vector<RankedPreamble> ranked =
          rank_by_perplexity(candidates, handle.backend(), config.backend.parallelism);
      const std::string path =
          out_path(config, "ranked_" + std::string(kind_name(kind)) + ".jsonl");
      write_text_file_atomic(path, ranked_to_jsonl(ranked));
      std::cout << "wrote " << ranked.size() << " ranked candidates to " << path << "\n";
    }
    return 0;
  }

  const std::vector<std::uint64_t>& seeds =
      seeds_override.empty() ? config.selection.seeds : seeds_override;
  for (PreambleKind kind : config.preambles.kinds) {
    const std::vector<Preamble> candidates = load_candidates(config, kind);
    for (std::uint64_t seed : seeds) {
      // The whole permutation is frozen: its length-n prefix is the n-draw
      // for every n, so one file serves the full N sweep.
      const std::vector<Preamble> drawn = random_select(candidates, candidates.size(), seed);
      const std::string path = out_path(config, "random_" + std::string(kind_name(kind)) +
                                                    "_seed" + std::to_string(seed) + ".jsonl");
      write_text_file_atomic(path, preambles_to_jsonl(drawn));
      std::cout << "wrote " << drawn.size() << " draws to " << path << "\n";
    }
  }
  return 0;
}

int cmd_score_bias(const RunConfig& config, bool with_delta) {
  const PairDataset dataset = load_pairs(config);
  BackendHandle handle = make_backend(config.backend);
  Backend& backend = handle.backend();
  const int par = config.backend.parallelism;

  write_text_file_atomic(out_path(config, "dataset_used.jsonl"), to_jsonl(dataset));

  struct Row {
    std::string condition;
    std::string kind;  // empty for nc/baselines
    std::size_t n = 0;
    std::string seed;  // per-seed digit, "mean", or empty
    BiasReport report;
    bool aggregated = false;  // mean-of-seeds rows carry no per-pair scores
  };
  std::vector<Row> rows;

  const BiasReport nc = evaluate_condition(dataset, backend, {}, par);
  rows.push_back({"nc", "", 0, "", nc, false});

  rows.push_back({"instruct", "", 1, "",
                  evaluate_condition(dataset, backend, {baseline_instruct()}, par), false});
  const std::vector<std::string> demos = load_demos(config.preambles.demos_path);
  rows.push_back({"intervention", "", 1, "",
                  evaluate_condition(dataset, backend, {baseline_intervention(demos)}, par),
                  false});

  for (PreambleKind kind : config.preambles.kinds) {
    const std::string kname(kind_name(kind));
    if (config.selection.mode == "perplexity") {
      const std::vector<RankedPreamble> ranked = load_ranked(config, kind);
      for (std::size_t n : config.preambles.n_values) {
        const BiasReport report = evaluate_condition(dataset, backend, top_n(ranked, n), par);
        rows.push_back({kname, kname, n, "", report, false});
      }
    } else {
      for (std::size_t n : config.preambles.n_values) {
        std::vector<double> seed_rbs;
        std::vector<double> seed_acc;
        for (std::uint64_t seed : config.selection.seeds) {
          const std::vector<Preamble> selection = load_random_selection(config, kind, seed);
          const BiasReport report =
              evaluate_condition(dataset, backend, first_n(selection, n), par);
          seed_rbs.push_back(report.rbs);
          seed_acc.push_back(report.acc_bias);
          rows.push_back({kname, kname, n, std::to_string(seed), report, false});
        }
        // The headline number for a random baseline is the across-seed mean.
        BiasReport mean;
        mean.condition = kname;
        mean.n_preambles = n;
        mean.pair_count = dataset.pairs.size();
        mean.backend_id = backend.backend_id();
        double rbs_sum = 0.0;
        double acc_sum = 0.0;
        for (double v : seed_rbs) rbs_sum += v;
        for (double v : seed_acc) acc_sum += v;
        mean.rbs = rbs_sum / static_cast<double>(seed_rbs.size());
        mean.acc_bias = acc_sum / static_cast<double>(seed_acc.size());
        rows.push_back({kname, kname, n, "mean", mean, true});
      }
    }
  }

  json report_rows = json::array();
  std::string csv = "condition,kind,n,seed,rbs,acc_bias,pair_count";
  if (with_delta) csv += ",delta_rbs_pct,delta_acc_bias_pct";
  csv += "\n";
  std::string trace;

  for (const Row& row : rows) {
    json j{
        {"condition", row.condition},
        {"kind", row.kind.empty() ? json() : json(row.kind)},
        {"n", row.n},
        {"rbs", row.report.rbs},
        {"acc_bias", row.report.acc_bias},
        {"pair_count", row.report.pair_count},
        {"backend_id", row.report.backend_id},
    };
    if (!row.seed.empty()) j["seed"] = row.seed;
    if (!row.aggregated) j["rbs_per_token_diagnostic"] = row.report.rbs_per_token;

    std::vector<std::string> fields{row.condition, row.kind, std::to_string(row.n),
                                    row.seed,      fmt(row.report.rbs),
                                    fmt(row.report.acc_bias),
                                    std::to_string(row.report.pair_count)};
    if (with_delta) {
      if (row.condition == "nc") {
        j["delta_rbs_pct"] = 0.0;
        j["delta_acc_bias_pct"] = 0.0;
        fields.push_back(fmt(0.0));
        fields.push_back(fmt(0.0));
      } else {
        const double d_rbs = delta_percent(row.report.rbs, nc.rbs);
        const double d_acc = delta_percent(row.report.acc_bias, nc.acc_bias);
        j["delta_rbs_pct"] = d_rbs;
        j["delta_acc_bias_pct"] = d_acc;
        fields.push_back(fmt(d_rbs));
        fields.push_back(fmt(d_acc));
      }
    }
    report_rows.push_back(std::move(j));
    csv += to_csv_line(fields);

    for (const PairScores& pair : row.report.per_pair) {
      json t{
          {"condition", row.condition},
          {"kind", row.kind.empty() ? json() : json(row.kind)},
          {"n", row.n},
          {"pair_id", pair.pair_id},
          {"loglik_s", pair.loglik_s},
          {"loglik_a", pair.loglik_a},
          {"log_ratio", pair.loglik_s - pair.loglik_a},
      };
      if (!row.seed.empty()) t["seed"] = row.seed;
      trace += t.dump();
      trace += '\n';
    }
  }

  json out{
      {"provenance", provenance(config, backend.backend_id())},
      {"skipped_identical_pairs", dataset.skipped_identical},
      {"rows", std::move(report_rows)},
  };
  write_text_file_atomic(out_path(config, "bias_report.json"), out.dump(2) + "\n");
  write_text_file_atomic(out_path(config, "bias_report.csv"), csv);
  write_text_file_atomic(out_path(config, "bias_pairs.jsonl"), trace);
  std::cout << "wrote " << rows.size() << " rows to " << out_path(config, "bias_report.json")
            << " and .csv\n";
  return 0;
}

int cmd_eval_downstream(const RunConfig& config, std::optional<std::size_t> sample,
                        std::optional<std::uint64_t> sample_seed) {
  struct Source {
    std::string name;
    std::string path;
  };
  std::vector<Source> sources;
  if (!config.datasets.copa.empty()) sources.push_back({"copa", config.datasets.copa});
  if (!config.datasets.hellaswag.empty()) {
    sources.push_back({"hellaswag", config.datasets.hellaswag});
  }
  if (sources.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "datasets.copa and/or datasets.hellaswag required for eval-downstream");
  }

  BackendHandle handle = make_backend(config.backend);
  Backend& backend = handle.backend();
  const int par = config.backend.parallelism;

  struct Row {
    std::string source;
    std::string condition;
    std::string kind;
    std::size_t n = 0;
    std::string seed;
    DownstreamReport report;
    bool aggregated = false;
  };
  std::vector<Row> rows;

  for (const Source& source : sources) {
    std::vector<MultipleChoiceItem> items =
        parse_multiple_choice(read_text_file(source.path), source.name);
    if (sample) {
      items = sample_items(items, *sample, sample_seed.value_or(0));
    }

    const DownstreamReport nc = evaluate_dataset(items, backend, {}, nullptr, par);
    rows.push_back({source.name, "nc", "", 0, "", nc, false});

    for (PreambleKind kind : config.preambles.kinds) {
      const std::string kname(kind_name(kind));
      if (config.selection.mode == "perplexity") {
        const std::vector<RankedPreamble> ranked = load_ranked(config, kind);
        for (std::size_t n : config.preambles.n_values) {
          const DownstreamReport report =
              evaluate_dataset(items, backend, top_n(ranked, n), &nc, par);
          rows.push_back({source.name, kname, kname, n, "", report, false});
        }
      } else {
        for (std::size_t n : config.preambles.n_values) {
          std::vector<double> seed_acc;
          for (std::uint64_t seed : config.selection.seeds) {
            const std::vector<Preamble> selection = load_random_selection(config, kind, seed);
            const DownstreamReport report =
                evaluate_dataset(items, backend, first_n(selection, n), &nc, par);
            seed_acc.push_back(report.accuracy);
            rows.push_back({source.name, kname, kname, n, std::to_string(seed), report, false});
          }
          DownstreamReport mean;
          mean.condition = kname;
          mean.n_preambles = n;
          mean.source = source.name;
          mean.item_count = items.size();
          mean.backend_id = backend.backend_id();
          double acc_sum = 0.0;
          for (double v : seed_acc) acc_sum += v;
          mean.accuracy = acc_sum / static_cast<double>(seed_acc.size());
          mean.delta_acc = 100.0 * (mean.accuracy - nc.accuracy);
          rows.push_back({source.name, kname, kname, n, "mean", mean, true});
        }
      }
    }
  }

  json report_rows = json::array();
  std::string csv = "source,condition,kind,n,seed,accuracy,delta_acc,item_count,tie_count\n";
  std::string trace;
  for (const Row& row : rows) {
    json j = to_json(row.report);
    j["kind"] = row.kind.empty() ? json() : json(row.kind);
    j["n"] = row.n;
    if (!row.seed.empty()) j["seed"] = row.seed;
    report_rows.push_back(std::move(j));

    csv += to_csv_line({row.source, row.condition, row.kind, std::to_string(row.n), row.seed,
                        fmt(row.report.accuracy),
                        row.report.delta_acc ? fmt(*row.report.delta_acc) : std::string(),
                        std::to_string(row.report.item_count),
                        std::to_string(row.report.tie_count)});

    for (const ItemPrediction& pred : row.report.predictions) {
      json t{
          {"source", row.source},    {"condition", row.condition},
          {"n", row.n},              {"id", pred.item_id},
          {"perplexities", pred.choice_perplexities},
          {"chosen", pred.chosen_index},
          {"gold", pred.gold_index}, {"correct", pred.correct},
          {"tie", pred.tie},
      };
      if (!row.seed.empty()) t["seed"] = row.seed;
      trace += t.dump();
      trace += '\n';
    }
  }

  json out{
      {"provenance", provenance(config, backend.backend_id())},
      {"rows", std::move(report_rows)},
  };
  if (sample) {
    out["sample"] = *sample;
    out["sample_seed"] = sample_seed.value_or(0);
  }
  write_text_file_atomic(out_path(config, "downstream_report.json"), out.dump(2) + "\n");
  write_text_file_atomic(out_path(config, "downstream_report.csv"), csv);
  write_text_file_atomic(out_path(config, "downstream_trace.jsonl"), trace);
  std::cout << "wrote " << rows.size() << " rows to "
            << out_path(config, "downstream_report.json") << " and .csv\n";
  return 0;
}

}  // namespace biassup
