#include "biassup/scoring.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "biassup/errors.hpp"
#include "biassup/hash.hpp"
#include "biassup/io.hpp"

namespace biassup {

namespace {

using nlohmann::json;

constexpr double kSumTolerance = 1e-9;

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

void check_distribution(const std::string& label, const std::map<std::string, double>& dist,
                        const std::set<std::string>& vocab) {
  double sum = 0.0;
  for (const auto& [token, p] : dist) {
    if (vocab.find(token) == vocab.end()) {
      throw Error(ErrorCode::InvalidDistribution,
                  label + ": token \"" + token + "\" not in vocabulary");
    }
    if (p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::InvalidDistribution,
                  label + ": probability of \"" + token + "\" out of range");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::InvalidDistribution,
                label + ": probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

double sequence_log_likelihood(const SequenceScore& score) {
  double sum = 0.0;
  for (const auto& token : score.tokens) sum += token.logprob;
  return sum;
}

double per_token_perplexity(const SequenceScore& score) {
  if (score.tokens.empty()) {
    throw Error(ErrorCode::EmptyInput, "perplexity of an empty sequence");
  }
  return std::exp(-sequence_log_likelihood(score) / static_cast<double>(score.tokens.size()));
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > begin) tokens.emplace_back(text.substr(begin, i - begin));
  }
  return tokens;
}

std::string_view strip_token_punctuation(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_ascii_punct(token[b])) ++b;
  while (e > b && is_ascii_punct(token[e - 1])) --e;
  if (b == e) return token;  // all punctuation: keep as-is
  return token.substr(b, e - b);
}

namespace {

// Distribution and trigger keys are stored normalized so lookups and
// vocabulary checks agree regardless of stray punctuation in the spec.
std::map<std::string, double> normalize_keys(const std::map<std::string, double>& dist,
                                             const std::string& label) {
  std::map<std::string, double> out;
  for (const auto& [token, p] : dist) {
    if (!out.emplace(std::string(strip_token_punctuation(token)), p).second) {
      throw Error(ErrorCode::InvalidDistribution,
                  label + ": tokens collide after normalization (" + token + ")");
    }
  }
  return out;
}

}  // namespace

TableLm::TableLm(std::vector<std::string> vocabulary, std::map<std::string, double> base,
                 std::map<std::string, std::map<std::string, double>> triggers)
    : vocabulary_(std::move(vocabulary)) {
  std::set<std::string> vocab;
  for (const auto& token : vocabulary_) {
    if (!vocab.insert(std::string(strip_token_punctuation(token))).second) {
      throw Error(ErrorCode::InvalidDistribution, "duplicate vocabulary token " + token);
    }
  }
  base_ = normalize_keys(base, "base");
  check_distribution("base", base_, vocab);
  for (const auto& [trigger, dist] : triggers) {
    const std::string label = "trigger \"" + trigger + "\"";
    auto normalized = normalize_keys(dist, label);
    check_distribution(label, normalized, vocab);
    triggers_[std::string(strip_token_punctuation(trigger))] = std::move(normalized);
  }

  json spec = {{"vocabulary", vocabulary_}, {"base", base_}, {"triggers", triggers_}};
  id_ = "table:" + sha256_hex(spec.dump()).substr(0, 16);
}

TableLm TableLm::from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("vocabulary") || !spec.contains("base")) {
    throw Error(ErrorCode::InvalidDistribution, "table spec needs vocabulary and base");
  }
  std::vector<std::string> vocab = spec.at("vocabulary").get<std::vector<std::string>>();
  std::map<std::string, double> base = spec.at("base").get<std::map<std::string, double>>();
  std::map<std::string, std::map<std::string, double>> triggers;
  if (spec.contains("triggers")) {
    triggers = spec.at("triggers").get<std::map<std::string, std::map<std::string, double>>>();
  }
  return TableLm(std::move(vocab), std::move(base), std::move(triggers));
}

TableLm TableLm::from_json_text(std::string_view text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, std::string("table spec: ") + e.what());
  }
}

TableLm TableLm::from_file(const std::string& path) {
  return from_json_text(read_text_file(path));
}

double TableLm::probability_of(const std::string& normalized_token,
                               const std::string& active_trigger) const {
  const std::map<std::string, double>* dist = &base_;
  if (!active_trigger.empty()) {
    const auto it = triggers_.find(active_trigger);
    if (it != triggers_.end()) dist = &it->second;
  }
  const auto it = dist->find(normalized_token);
  return it == dist->end() ? 0.0 : it->second;
}

SequenceScore TableLm::score(const ScoreRequest& request) {
  if (request.target.empty()) {
    throw Error(ErrorCode::EmptyInput, "score target is empty");
  }

  // The active trigger is the most recent trigger word seen in the context
  // so far; splitting text between prefix and target never changes it.
  std::string active_trigger;
  auto observe = [&](const std::string& raw) {
    const std::string normalized(strip_token_punctuation(raw));
    if (triggers_.find(normalized) != triggers_.end()) active_trigger = normalized;
  };

  for (const auto& token : whitespace_tokens(request.prefix)) observe(token);

  SequenceScore result;
  for (const auto& token : whitespace_tokens(request.target)) {
    const std::string normalized(strip_token_punctuation(token));
    const double p = probability_of(normalized, active_trigger);
    if (p <= 0.0) {
      throw Error(ErrorCode::UnknownToken,
                  "\"" + token + "\" has no probability in the active distribution");
    }
    result.tokens.push_back({token, std::log(p)});
    observe(token);
  }
  return result;
}

}  // namespace biassup
