#pragma once

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace biassup::testing {

// Serves canned echo-mode logprob responses, keyed by the request's prompt.
// Test knobs: fail the next N requests with a status, delay the next request,
// or substitute a raw body.  Counters expose what the backend actually sent.
class MockLogprobServer {
 public:
  explicit MockLogprobServer(const std::string& fixtures_json_text) {
    const nlohmann::json spec = nlohmann::json::parse(fixtures_json_text);
    for (const auto& fx : spec.at("fixtures")) {
      const nlohmann::json response{
          {"choices",
           {{{"text", fx.at("prompt")},
             {"logprobs",
              {{"tokens", fx.at("tokens")},
               {"token_logprobs", fx.at("token_logprobs")},
               {"text_offset", fx.at("text_offset")}}}}}}};
      responses_[fx.at("prompt").get<std::string>()] = response.dump();
    }

    const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    };
    server_.Post("/v1/completions", handler);
    server_.Post("/score", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockLogprobServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  void fail_next(int count, int status) {
    std::lock_guard lock(mutex_);
    fail_count_ = count;
    fail_status_ = status;
  }

  void serve_raw_next(std::string body) {
    std::lock_guard lock(mutex_);
    raw_next_ = std::move(body);
  }

  void delay_next(std::chrono::milliseconds delay) {
    std::lock_guard lock(mutex_);
    delay_next_ = delay;
  }

  int request_count() const {
    std::lock_guard lock(mutex_);
    return request_count_;
  }

  int max_concurrent() const {
    std::lock_guard lock(mutex_);
    return max_concurrent_;
  }

  std::string last_authorization() const {
    std::lock_guard lock(mutex_);
    return last_authorization_;
  }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    int fail_status = 0;
    std::optional<std::string> raw;
    std::chrono::milliseconds delay{0};
    {
      std::lock_guard lock(mutex_);
      ++request_count_;
      ++concurrent_;
      max_concurrent_ = std::max(max_concurrent_, concurrent_);
      last_authorization_ = req.get_header_value("Authorization");
      if (delay_next_.count() > 0) {
        delay = delay_next_;
        delay_next_ = std::chrono::milliseconds{0};
      }
      if (fail_count_ > 0) {
        --fail_count_;
        fail_status = fail_status_;
      } else if (raw_next_) {
        raw = std::move(raw_next_);
        raw_next_.reset();
      }
    }
    struct Departure {
      MockLogprobServer& self;
      ~Departure() {
        std::lock_guard lock(self.mutex_);
        --self.concurrent_;
      }
    } departure{*this};

    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    if (fail_status != 0) {
      res.status = fail_status;
      res.set_content("simulated failure", "text/plain");
      return;
    }
    if (raw) {
      res.set_content(*raw, "application/json");
      return;
    }

    std::string prompt;
    try {
      prompt = nlohmann::json::parse(req.body).at("prompt").get<std::string>();
    } catch (const std::exception&) {
      res.status = 400;
      return;
    }
    const auto it = responses_.find(prompt);
    if (it == responses_.end()) {
      res.status = 404;
      res.set_content("no fixture for prompt", "text/plain");
      return;
    }
    res.set_content(it->second, "application/json");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mutex_;
  std::map<std::string, std::string> responses_;
  int request_count_ = 0;
  int concurrent_ = 0;
  int max_concurrent_ = 0;
  int fail_count_ = 0;
  int fail_status_ = 0;
  std::optional<std::string> raw_next_;
  std::string last_authorization_;
  std::chrono::milliseconds delay_next_{0};
};

}  // namespace biassup::testing
