#pragma once

#include <memory>
#include <string>

#include "biassup/scoring.hpp"

namespace biassup {

struct HttpBackendConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8731"
  std::string model;
  // Name of the environment variable holding the API key.  The key itself is
  // read at request time and never stored, logged or echoed.
  std::string api_key_env;
  std::string completions_path = "/v1/completions";
  int timeout_ms = 30000;
  int retries = 3;        // extra attempts after the first, on 5xx/transport errors
  int parallelism = 4;    // max in-flight requests
  // Where the joining space between prefix and target lives: "pad-space"
  // keeps it on the prefix side (boundary after the space); "pad-target"
  // moves it onto the target for tokenizers that glue spaces onto the
  // following word.
  std::string boundary = "pad-space";
};

// Scores through an OpenAI-style completions endpoint using echo mode:
// the full prefix+target text is submitted with max_tokens=0, echo=true,
// logprobs=0, and returned tokens are partitioned at the prefix/target
// character boundary.  Tokens entirely inside the prefix are dropped; a token
// overlapping the boundary raises TokenBoundaryMisaligned (never silent
// inclusion).  A leading begin-of-text marker (first token, null logprob) is
// skipped; any other null logprob raises MissingLogprobs.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  SequenceScore score(const ScoreRequest& request) override;
  const std::string& backend_id() const override { return id_; }

 private:
  HttpBackendConfig config_;
  std::string id_;
  struct Slots;
  std::unique_ptr<Slots> slots_;
};

}  // namespace biassup
