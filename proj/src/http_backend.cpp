#include "biassup/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "biassup/errors.hpp"

namespace biassup {

namespace {

using nlohmann::json;

// httplib reports read timeouts as Error::Read; we set explicit timeouts, so
// that mapping is the useful one.
ErrorCode classify(httplib::Error err) {
  switch (err) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
    case httplib::Error::Write:
      return ErrorCode::Timeout;
    default:
      return ErrorCode::BackendUnavailable;
  }
}

bool retryable_status(int status) { return status >= 500; }

}  // namespace

// Bounds in-flight requests without pinning a compile-time semaphore max.
struct HttpBackend::Slots {
  explicit Slots(int limit) : available(limit < 1 ? 1 : limit) {}

  void acquire() {
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return available > 0; });
    --available;
  }
  void release() {
    {
      std::lock_guard lock(mutex);
      ++available;
    }
    cv.notify_one();
  }

  std::mutex mutex;
  std::condition_variable cv;
  int available;
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)),
      id_(config_.model + "@" + config_.endpoint),
      slots_(std::make_unique<Slots>(config_.parallelism)) {
  if (config_.boundary != "pad-space" && config_.boundary != "pad-target") {
    throw Error(ErrorCode::InvalidConfig,
                "boundary must be pad-space or pad-target, got " + config_.boundary);
  }
}

HttpBackend::~HttpBackend() = default;

SequenceScore HttpBackend::score(const ScoreRequest& request) {
  if (request.target.empty()) {
    throw Error(ErrorCode::EmptyInput, "score target is empty");
  }

  std::string prefix = request.prefix;
  std::string target = request.target;
  if (config_.boundary == "pad-target" && !prefix.empty() && prefix.back() == ' ') {
    prefix.pop_back();
    target.insert(target.begin(), ' ');
  }
  const std::string full_text = prefix + target;
  const std::size_t boundary = prefix.size();

  const json body = {{"model", config_.model},
                     {"prompt", full_text},
                     {"max_tokens", 0},
                     {"echo", true},
                     {"logprobs", 0}};

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  struct SlotGuard {
    Slots& slots;
    explicit SlotGuard(Slots& s) : slots(s) { slots.acquire(); }
    ~SlotGuard() { slots.release(); }
  } guard(*slots_);

  json response;
  std::string last_error = "request never attempted";
  ErrorCode last_code = ErrorCode::BackendUnavailable;
  bool ok = false;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      // Exponential backoff: 100ms, 200ms, 400ms, ...
      std::this_thread::sleep_for(std::chrono::milliseconds(100LL << (attempt - 1)));
    }
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(0, config_.timeout_ms * 1000LL);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

    httplib::Result res = client.Post(config_.completions_path, headers, body.dump(),
                                      "application/json");
    if (!res) {
      last_code = classify(res.error());
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_code = ErrorCode::HttpError;
      last_error = "status " + std::to_string(res->status);
      if (retryable_status(res->status)) continue;
      throw Error(last_code, last_error);
    }
    try {
      response = json::parse(res->body);
    } catch (const json::exception& e) {
      last_code = ErrorCode::MissingLogprobs;
      last_error = std::string("unparseable response body: ") + e.what();
      continue;
    }
    ok = true;
    break;
  }
  if (!ok) {
    throw Error(last_code, last_error + " (after " + std::to_string(config_.retries + 1) +
                               " attempts)");
  }

  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    throw Error(ErrorCode::MissingLogprobs, "response has no choices");
  }
  const json& choice = response["choices"][0];
  if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
    throw Error(ErrorCode::MissingLogprobs, "choice carries no logprobs block");
  }
  const json& logprobs = choice["logprobs"];
  if (!logprobs.contains("tokens") || !logprobs.contains("token_logprobs") ||
      !logprobs.contains("text_offset")) {
    throw Error(ErrorCode::MissingLogprobs, "logprobs block is incomplete");
  }
  const json& tokens = logprobs["tokens"];
  const json& lps = logprobs["token_logprobs"];
  const json& offsets = logprobs["text_offset"];
  if (tokens.size() != lps.size() || tokens.size() != offsets.size()) {
    throw Error(ErrorCode::MissingLogprobs, "logprobs arrays disagree in length");
  }

  SequenceScore result;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string token = tokens[i].get<std::string>();
    const std::size_t start = offsets[i].get<std::size_t>();
    const std::size_t end = start + token.size();
    if (end <= boundary) continue;  // prefix side
    if (start < boundary) {
      throw Error(ErrorCode::TokenBoundaryMisaligned,
                  "token \"" + token + "\" spans [" + std::to_string(start) + ", " +
                      std::to_string(end) + ") across boundary " + std::to_string(boundary));
    }
    if (lps[i].is_null()) {
      if (i == 0 && result.tokens.empty() && start == boundary) {
        continue;  // begin-of-text marker
      }
      throw Error(ErrorCode::MissingLogprobs,
                  "null logprob for target token \"" + token + "\"");
    }
    result.tokens.push_back({token, lps[i].get<double>()});
  }
  return result;
}

}  // namespace biassup
