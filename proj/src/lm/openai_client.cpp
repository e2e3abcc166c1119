#include "paraicl/openai_client.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace paraicl {

using nlohmann::json;

void OpenAiConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("openai backend requires an endpoint");
  if (max_top_k < 1) throw ConfigError("openai backend: max_top_k must be >= 1");
  if (max_in_flight < 1) throw ConfigError("openai backend: max_in_flight must be >= 1");
  if (max_calls < 0) throw ConfigError("openai backend: max_calls must be >= 0");
}

// Runtime-sized counting gate; std::counting_semaphore fixes its ceiling at
// compile time.
struct OpenAiClient::InFlightGate {
  std::mutex m;
  std::condition_variable cv;
  int available;

  explicit InFlightGate(int n) : available(n) {}

  void acquire() {
    std::unique_lock lock(m);
    cv.wait(lock, [&] { return available > 0; });
    --available;
  }
  void release() {
    {
      std::lock_guard lock(m);
      ++available;
    }
    cv.notify_one();
  }
};

namespace {

std::optional<int> retry_after_ms(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  try {
    return std::stoi(res.get_header_value("Retry-After")) * 1000;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace

OpenAiClient::OpenAiClient(OpenAiConfig config) : config_(std::move(config)) {
  config_.validate();
  eos_id_ = interner_.intern(config_.eos_surface);
  warn_ = [](const std::string& msg) { std::cerr << "[paraicl] warning: " << msg << "\n"; };
  gate_ = std::make_unique<InFlightGate>(config_.max_in_flight);
}

OpenAiClient::~OpenAiClient() = default;

void OpenAiClient::set_warning_handler(std::function<void(const std::string&)> handler) {
  warn_ = std::move(handler);
}

std::string OpenAiClient::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += interner_.surface(id);
  return out;
}

bool OpenAiClient::is_eos(TokenId id) const { return id == eos_id_; }

TokenDistribution OpenAiClient::next_token_distribution(const NextTokenRequest& request) {
  if (request.prompt.empty()) throw ConfigError("openai backend: empty prompt");

  // One budget unit per step-call, retries included.
  for (;;) {
    int current = calls_made_.load();
    if (config_.max_calls > 0 && current >= config_.max_calls) {
      throw BudgetExceeded("openai backend: call budget of " +
                           std::to_string(config_.max_calls) + " exhausted");
    }
    if (calls_made_.compare_exchange_weak(current, current + 1)) break;
  }

  struct GateHold {
    InFlightGate& gate;
    explicit GateHold(InFlightGate& g) : gate(g) { gate.acquire(); }
    ~GateHold() { gate.release(); }
  } hold(*gate_);

  json body;
  body["prompt"] = request.prompt + detokenize(request.prefix);
  body["max_tokens"] = 1;
  body["logprobs"] = request.want_top_k.value_or(config_.max_top_k);
  body["temperature"] = 0;
  if (!config_.model.empty()) body["model"] = config_.model;

  httplib::Headers headers;
  if (const char* key = std::getenv("PARAICL_API_KEY")) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Result res;
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.connect_timeout_s, 0);
    client.set_read_timeout(config_.read_timeout_s, 0);
    res = client.Post("/v1/completions", headers, body.dump(), "application/json");

    if (!res) {
      throw RemoteUnavailable("completions endpoint unreachable: " + config_.endpoint);
    }
    if (res->status != 429) break;
    if (attempt >= config_.max_retries) {
      throw RemoteUnavailable("completions endpoint still rate-limited after " +
                                  std::to_string(attempt + 1) + " attempts",
                              retry_after_ms(*res));
    }
    std::this_thread::sleep_for(
        std::chrono::milliseconds(config_.retry_base_ms * (1 << attempt)));
  }

  if (res->status == 401 || res->status == 403) {
    throw AuthError("completions endpoint rejected credentials (HTTP " +
                    std::to_string(res->status) + ")");
  }
  if (res->status == 400 || res->status == 413) {
    throw ContextTooLong("completions endpoint rejected the prompt (HTTP " +
                         std::to_string(res->status) + "): " + res->body);
  }
  if (res->status >= 500) {
    throw RemoteUnavailable("completions endpoint HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedResponse("completions endpoint HTTP " + std::to_string(res->status));
  }

  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("completions response is not JSON: ") + e.what());
  }

  if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
      parsed["choices"].empty()) {
    throw MalformedResponse("completions response missing choices");
  }
  const auto& choice = parsed["choices"][0];
  if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
    throw MalformedResponse("completions response missing logprobs");
  }
  const auto& logprobs = choice["logprobs"];
  if (!logprobs.contains("top_logprobs") || !logprobs["top_logprobs"].is_array() ||
      logprobs["top_logprobs"].empty()) {
    throw MalformedResponse("completions response missing top_logprobs");
  }
  const auto& top = logprobs["top_logprobs"][0];
  if (!top.is_object() || top.empty()) {
    throw MalformedResponse("completions top_logprobs[0] is empty");
  }

  std::vector<std::pair<TokenId, double>> entries;
  entries.reserve(top.size());
  for (const auto& [surface, lp] : top.items()) {
    if (!lp.is_number()) throw MalformedResponse("non-numeric logprob for '" + surface + "'");
    const double logprob = lp.get<double>();
    if (logprob > 0.0) {
      throw MalformedResponse("positive logprob " + std::to_string(logprob) + " for '" +
                              surface + "'");
    }
    entries.emplace_back(interner_.intern(surface), std::exp(logprob));
  }

  // The echoed sampled token should be one of its own top alternatives;
  // anything else signals a tokenization quirk worth surfacing, not failing.
  if (logprobs.contains("tokens") && logprobs["tokens"].is_array() &&
      !logprobs["tokens"].empty() && logprobs["tokens"][0].is_string()) {
    const std::string echoed = logprobs["tokens"][0].get<std::string>();
    if (!top.contains(echoed)) {
      warning_count_.fetch_add(1);
      warn_("tokenization mismatch: sampled token '" + echoed +
            "' missing from its top_logprobs");
    }
  }

  return TokenDistribution::from_entries(std::move(entries), /*complete=*/false);
}

}  // namespace paraicl
