#include "biassup/run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <set>

#include "biassup/errors.hpp"
#include "biassup/hash.hpp"
#include "biassup/io.hpp"

namespace biassup {

namespace {

using nlohmann::json;

// Typo'd keys fail loudly instead of silently falling back to defaults.
void check_keys(const json& obj, const char* where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::InvalidConfig,
                  std::string(where) + ": unknown key \"" + key + "\"");
    }
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback = "") {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a string");
  }
  return obj[key].get<std::string>();
}

BackendSpec parse_backend(const json& obj, const std::string& base_dir) {
  check_keys(obj, "backend",
             {"kind", "table_path", "endpoint", "model", "api_key_env", "completions_path",
              "timeout_ms", "retries", "parallelism", "boundary", "cache_path"});
  BackendSpec spec;
  spec.kind = get_string(obj, "kind");
  spec.cache_path = resolve(get_string(obj, "cache_path"), base_dir);
  if (obj.contains("parallelism")) spec.parallelism = obj["parallelism"].get<int>();
  if (spec.parallelism < 1) {
    throw Error(ErrorCode::InvalidConfig, "backend.parallelism must be >= 1");
  }

  if (spec.kind == "table") {
    spec.table_path = resolve(get_string(obj, "table_path"), base_dir);
    if (spec.table_path.empty()) {
      throw Error(ErrorCode::InvalidConfig, "table backend needs table_path");
    }
  } else if (spec.kind == "http") {
    spec.http.endpoint = get_string(obj, "endpoint");
    spec.http.model = get_string(obj, "model");
    spec.http.api_key_env = get_string(obj, "api_key_env");
    spec.http.completions_path = get_string(obj, "completions_path", spec.http.completions_path);
    spec.http.boundary = get_string(obj, "boundary", spec.http.boundary);
    if (obj.contains("timeout_ms")) spec.http.timeout_ms = obj["timeout_ms"].get<int>();
    if (obj.contains("retries")) spec.http.retries = obj["retries"].get<int>();
    spec.http.parallelism = spec.parallelism;
    if (spec.http.endpoint.empty() || spec.http.model.empty()) {
      throw Error(ErrorCode::InvalidConfig, "http backend needs endpoint and model");
    }
  } else {
    throw Error(ErrorCode::InvalidConfig,
                "backend.kind must be \"table\" or \"http\", got \"" + spec.kind + "\"");
  }
  return spec;
}

LexiconPaths parse_lexicon(const json& obj, const std::string& base_dir) {
  check_keys(obj, "lexicon", {"names", "occupations", "descriptions", "share_threshold"});
  LexiconPaths paths;
  paths.names = resolve(get_string(obj, "names"), base_dir);
  paths.occupations = resolve(get_string(obj, "occupations"), base_dir);
  paths.descriptions = resolve(get_string(obj, "descriptions"), base_dir);
  if (obj.contains("share_threshold")) {
    paths.share_threshold = obj["share_threshold"].get<double>();
  }
  if (!(paths.share_threshold > 0.5 && paths.share_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "lexicon.share_threshold must be in (0.5, 1]");
  }
  return paths;
}

DatasetPaths parse_datasets(const json& obj, const std::string& base_dir) {
  check_keys(obj, "datasets", {"pairs", "bias_type", "copa", "hellaswag"});
  DatasetPaths paths;
  paths.pairs = resolve(get_string(obj, "pairs"), base_dir);
  paths.bias_type = get_string(obj, "bias_type");
  paths.copa = resolve(get_string(obj, "copa"), base_dir);
  paths.hellaswag = resolve(get_string(obj, "hellaswag"), base_dir);
  return paths;
}

PreamblePlan parse_preambles(const json& obj, const std::string& base_dir) {
  check_keys(obj, "preambles", {"kinds", "count", "seed", "n_values", "demos_path"});
  PreamblePlan plan;
  if (obj.contains("kinds")) {
    for (const auto& name : obj["kinds"]) {
      const PreambleKind kind = kind_from_name(name.get<std::string>());
      if (kind != PreambleKind::CfSimple && kind != PreambleKind::CfDetailed &&
          kind != PreambleKind::DescSimple && kind != PreambleKind::DescDetailed) {
        throw Error(ErrorCode::InvalidConfig,
                    "preambles.kinds entries must be template kinds, got \"" +
                        name.get<std::string>() + "\"");
      }
      plan.kinds.push_back(kind);
    }
  }
  if (plan.kinds.empty()) {
    plan.kinds = {PreambleKind::CfSimple, PreambleKind::CfDetailed, PreambleKind::DescSimple,
                  PreambleKind::DescDetailed};
  }
  if (obj.contains("count")) plan.count = obj["count"].get<std::size_t>();
  if (plan.count < 1) throw Error(ErrorCode::InvalidConfig, "preambles.count must be >= 1");
  if (obj.contains("seed")) plan.seed = obj["seed"].get<std::uint64_t>();
  if (obj.contains("n_values")) {
    for (const auto& n : obj["n_values"]) plan.n_values.push_back(n.get<std::size_t>());
  }
  if (plan.n_values.empty()) {
    for (std::size_t n = 1; n <= std::min<std::size_t>(10, plan.count); ++n) {
      plan.n_values.push_back(n);
    }
  }
  for (std::size_t n : plan.n_values) {
    if (n < 1 || n > plan.count) {
      throw Error(ErrorCode::InvalidConfig,
                  "preambles.n_values entry " + std::to_string(n) + " outside [1, " +
                      std::to_string(plan.count) + "]");
    }
  }
  plan.demos_path = resolve(get_string(obj, "demos_path"), base_dir);
  return plan;
}

SelectionPlan parse_selection(const json& obj) {
  check_keys(obj, "selection", {"mode", "seeds"});
  SelectionPlan plan;
  plan.mode = get_string(obj, "mode", plan.mode);
  if (plan.mode != "perplexity" && plan.mode != "random") {
    throw Error(ErrorCode::InvalidConfig,
                "selection.mode must be \"perplexity\" or \"random\", got \"" + plan.mode + "\"");
  }
  if (obj.contains("seeds")) {
    plan.seeds.clear();
    for (const auto& s : obj["seeds"]) plan.seeds.push_back(s.get<std::uint64_t>());
    if (plan.seeds.empty()) {
      throw Error(ErrorCode::InvalidConfig, "selection.seeds must not be empty");
    }
  }
  return plan;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, std::string("config: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config root must be a JSON object");
  }
  check_keys(root, "config",
             {"backend", "lexicon", "datasets", "preambles", "selection", "output_dir"});

  RunConfig config;
  if (!root.contains("backend")) {
    throw Error(ErrorCode::InvalidConfig, "config needs a backend section");
  }
  try {
    config.backend = parse_backend(root["backend"], base_dir);
    if (root.contains("lexicon")) config.lexicon = parse_lexicon(root["lexicon"], base_dir);
    if (root.contains("datasets")) config.datasets = parse_datasets(root["datasets"], base_dir);
    if (root.contains("preambles")) {
      config.preambles = parse_preambles(root["preambles"], base_dir);
    } else {
      config.preambles = parse_preambles(json::object(), base_dir);
    }
    if (root.contains("selection")) config.selection = parse_selection(root["selection"]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  config.output_dir = resolve(get_string(root, "output_dir", config.output_dir), base_dir);
  config.config_hash = sha256_hex(json_text);
  return config;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return parse_run_config(text, base_dir);
}

BackendHandle make_backend(const BackendSpec& spec) {
  BackendHandle handle;
  if (spec.kind == "table") {
    handle.inner = std::make_unique<TableLm>(TableLm::from_file(spec.table_path));
  } else if (spec.kind == "http") {
    handle.inner = std::make_unique<HttpBackend>(spec.http);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown backend kind \"" + spec.kind + "\"");
  }
  if (!spec.cache_path.empty()) {
    handle.cache = std::make_unique<ScoreCache>(spec.cache_path);
    handle.caching = std::make_unique<CachingBackend>(*handle.inner, *handle.cache);
  }
  return handle;
}

}  // namespace biassup
