#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "biassup/http_backend.hpp"
#include "biassup/preamble.hpp"
#include "biassup/score_cache.hpp"
#include "biassup/scoring.hpp"

namespace biassup {

struct BackendSpec {
  std::string kind;        // "table" or "http"
  std::string table_path;  // kind == "table"
  HttpBackendConfig http;  // kind == "http"
  int parallelism = 1;     // scoring fan-out (http requests are additionally
                           // capped by http.parallelism)
  std::string cache_path;  // empty disables the score cache
};

struct LexiconPaths {
  std::string names;
  std::string occupations;
  std::string descriptions;
  double share_threshold = 0.70;
};

struct DatasetPaths {
  std::string pairs;      // sentence-pair CSV
  std::string bias_type;  // optional filter, e.g. "gender"; empty keeps all
  std::string copa;       // JSONL
  std::string hellaswag;  // JSONL
};

struct PreamblePlan {
  std::vector<PreambleKind> kinds;  // defaults to all four template kinds
  std::size_t count = 200;
  std::uint64_t seed = 0;
  std::vector<std::size_t> n_values;  // defaults to 1..10
  std::string demos_path;  // optional demonstrations (one per line) for the
                           // intervention baseline
};

struct SelectionPlan {
  std::string mode = "perplexity";  // or "random"
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

struct RunConfig {
  BackendSpec backend;
  LexiconPaths lexicon;
  DatasetPaths datasets;
  PreamblePlan preambles;
  SelectionPlan selection;
  std::string output_dir = "out";
  std::string config_hash;  // sha256 of the raw config bytes, for provenance
};

// Parses and validates a config; relative paths resolve against base_dir.
// Secrets never live in the file: the http backend names an environment
// variable and reads the key at request time.
RunConfig parse_run_config(std::string_view json_text, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

// Owns a backend stack: the scoring backend plus an optional read-through
// cache in front of it.  backend() is what callers score against.
struct BackendHandle {
  std::unique_ptr<Backend> inner;
  std::unique_ptr<ScoreCache> cache;
  std::unique_ptr<Backend> caching;

  Backend& backend() { return caching ? *caching : *inner; }
};

BackendHandle make_backend(const BackendSpec& spec);

}  // namespace biassup
