#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace biassup {

// Teacher-forcing request: `prefix` conditions the model but is never scored;
// only `target` tokens contribute log-probabilities.  Target must be
// non-empty; prefix may be empty.
struct ScoreRequest {
  std::string prefix;
  std::string target;
};

struct TokenScore {
  std::string text;
  double logprob = 0.0;  // natural log

  friend bool operator==(const TokenScore&, const TokenScore&) = default;
};

struct SequenceScore {
  std::vector<TokenScore> tokens;
  std::size_t token_count() const { return tokens.size(); }

  friend bool operator==(const SequenceScore&, const SequenceScore&) = default;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual SequenceScore score(const ScoreRequest& request) = 0;
  virtual const std::string& backend_id() const = 0;
};

// Sum of target-token natural-log probabilities.
double sequence_log_likelihood(const SequenceScore& score);

// exp(-mean logprob); 1.0 means every token was certain.
double per_token_perplexity(const SequenceScore& score);

// Whitespace-run tokenizer shared by the synthetic backend.
std::vector<std::string> whitespace_tokens(std::string_view text);

// Leading/trailing ASCII punctuation stripped, so "nurse." matches "nurse".
// All-punctuation tokens are returned unchanged.
std::string_view strip_token_punctuation(std::string_view token);

// Synthetic table-driven language model over a whitespace-token vocabulary.
//
// Each target token is scored from the base distribution unless a trigger
// word has appeared earlier in the context (prefix tokens plus already-scored
// target tokens); then that trigger's override distribution applies.  When
// several triggers have fired, the most recent occurrence wins.  Tokens are
// normalized with strip_token_punctuation before vocabulary and trigger
// lookups.
class TableLm : public Backend {
 public:
  TableLm(std::vector<std::string> vocabulary, std::map<std::string, double> base,
          std::map<std::string, std::map<std::string, double>> triggers);

  static TableLm from_json(const nlohmann::json& spec);
  static TableLm from_json_text(std::string_view text);
  static TableLm from_file(const std::string& path);

  SequenceScore score(const ScoreRequest& request) override;
  const std::string& backend_id() const override { return id_; }

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

 private:
  double probability_of(const std::string& normalized_token,
                        const std::string& active_trigger) const;

  std::vector<std::string> vocabulary_;
  std::map<std::string, double> base_;
  std::map<std::string, std::map<std::string, double>> triggers_;
  std::string id_;
};

}  // namespace biassup
