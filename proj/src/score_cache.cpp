#include "biassup/score_cache.hpp"

#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <mutex>

#include "biassup/errors.hpp"
#include "biassup/hash.hpp"

namespace biassup {

namespace {

using nlohmann::json;

std::string combine(const std::string& backend_id, const std::string& prefix_hash,
                    const std::string& target_hash) {
  return sha256_hex(backend_id + "\n" + prefix_hash + "\n" + target_hash);
}

}  // namespace

std::string ScoreCache::key_hash(const std::string& backend_id, const ScoreRequest& request) {
  return combine(backend_id, sha256_hex(request.prefix), sha256_hex(request.target));
}

ScoreCache::ScoreCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      SequenceScore score;
      std::string key;
      try {
        const json obj = json::parse(line);
        const auto& backend_id = obj.at("backend_id").get_ref<const std::string&>();
        const auto& prefix_hash = obj.at("prefix_hash").get_ref<const std::string&>();
        const auto& target_hash = obj.at("target_hash").get_ref<const std::string&>();
        key = obj.at("key_hash").get<std::string>();
        // Self-check: a truncated or edited line will not hash back to its
        // own key.
        if (key != combine(backend_id, prefix_hash, target_hash)) {
          throw Error(ErrorCode::MalformedJson, "key hash mismatch");
        }
        for (const auto& tok : obj.at("tokens")) {
          score.tokens.push_back(
              {tok.at("t").get<std::string>(), tok.at("lp").get<double>()});
        }
      } catch (const std::exception&) {
        ++corrupt_lines_;
        std::cerr << "warning: ignoring corrupt cache entry at " << path_ << ":" << line_no
                  << "\n";
        continue;
      }
      entries_[key] = std::move(score);
    }
  }

  const auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  appender_.open(path_, std::ios::binary | std::ios::app);
  if (!appender_) {
    throw Error(ErrorCode::IoError, "cannot open cache file " + path_);
  }
}

std::optional<SequenceScore> ScoreCache::get(const std::string& backend_id,
                                             const ScoreRequest& request) {
  const std::string key = key_hash(backend_id, request);
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::put(const std::string& backend_id, const ScoreRequest& request,
                     const SequenceScore& score) {
  const std::string prefix_hash = sha256_hex(request.prefix);
  const std::string target_hash = sha256_hex(request.target);
  const std::string key = combine(backend_id, prefix_hash, target_hash);

  std::unique_lock lock(mutex_);
  if (entries_.find(key) != entries_.end()) return;

  json tokens = json::array();
  for (const auto& tok : score.tokens) {
    tokens.push_back({{"t", tok.text}, {"lp", tok.logprob}});
  }
  const json obj = {{"key_hash", key},
                    {"backend_id", backend_id},
                    {"prefix_hash", prefix_hash},
                    {"target_hash", target_hash},
                    {"tokens", std::move(tokens)}};
  appender_ << obj.dump() << "\n";
  appender_.flush();
  entries_[key] = score;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

SequenceScore CachingBackend::score(const ScoreRequest& request) {
  if (auto cached = cache_.get(backend_id(), request)) {
    return *cached;
  }
  SequenceScore fresh = inner_.score(request);
  cache_.put(backend_id(), request, fresh);
  return fresh;
}

}  // namespace biassup
