#pragma once

#include <fstream>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "biassup/scoring.hpp"

namespace biassup {

// Append-only JSONL cache keyed by a SHA-256 over (backend_id, prefix,
// target).  Entries carry their own key hash plus per-field hashes, so a
// damaged or truncated line is detectable: it is skipped with a warning on
// stderr and never poisons lookups.  Concurrent readers share the map;
// writers are serialized.  Warm reads return bit-identical token/logprob
// arrays because logprobs round-trip through shortest-form JSON doubles.
class ScoreCache {
 public:
  explicit ScoreCache(std::string path);

  std::optional<SequenceScore> get(const std::string& backend_id, const ScoreRequest& request);
  // No-op when the key is already present (idempotent re-puts).
  void put(const std::string& backend_id, const ScoreRequest& request,
           const SequenceScore& score);

  static std::string key_hash(const std::string& backend_id, const ScoreRequest& request);

  std::size_t size() const;
  std::size_t corrupt_lines() const { return corrupt_lines_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unordered_map<std::string, SequenceScore> entries_;
  std::size_t corrupt_lines_ = 0;
  mutable std::shared_mutex mutex_;
  std::ofstream appender_;
};

// Wraps any backend with read-through caching; scoring results are identical
// whether they come from the wrapped backend or the cache.
class CachingBackend : public Backend {
 public:
  CachingBackend(Backend& inner, ScoreCache& cache) : inner_(inner), cache_(cache) {}

  SequenceScore score(const ScoreRequest& request) override;
  const std::string& backend_id() const override { return inner_.backend_id(); }

 private:
  Backend& inner_;
  ScoreCache& cache_;
};

}  // namespace biassup
