#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "paraicl/lm_backend.hpp"

namespace paraicl {

struct OpenAiConfig {
  std::string endpoint;  // scheme://host:port, required
  std::string model;
  int max_top_k = 5;  // logprobs requested per call
  std::string eos_surface = "<|endoftext|>";
  // 0 = unlimited. Each next_token_distribution call costs one; exceeding
  // the budget raises BudgetExceeded before any network traffic.
  int max_calls = 0;
  int max_in_flight = 4;
  int max_retries = 3;      // 429 retries before giving up
  int retry_base_ms = 100;  // backoff doubles from here
  int connect_timeout_s = 10;
  int read_timeout_s = 120;

  void validate() const;
};

/**
 * Completions-style client: one POST per batch per step with max_tokens=1,
 * temperature=0, reading the first position's top_logprobs into a truncated
 * distribution. Token identity is the surface string, interned per client.
 * Auth comes from the PARAICL_API_KEY environment variable when set.
 */
class OpenAiClient : public LmBackend {
 public:
  explicit OpenAiClient(OpenAiConfig config);
  ~OpenAiClient() override;

  TokenDistribution next_token_distribution(const NextTokenRequest& request) override;
  // Completions tokens carry their own leading whitespace; plain concatenation.
  std::string detokenize(std::span<const TokenId> ids) const override;
  bool is_eos(TokenId id) const override;
  std::string name() const override { return "openai_compat:" + config_.model; }

  SurfaceInterner& interner() { return interner_; }
  int calls_made() const { return calls_made_.load(); }
  int warning_count() const { return warning_count_.load(); }

  // Non-fatal diagnostics (tokenization mismatches); defaults to stderr.
  void set_warning_handler(std::function<void(const std::string&)> handler);

 private:
  struct InFlightGate;

  OpenAiConfig config_;
  SurfaceInterner interner_;
  TokenId eos_id_ = -1;
  std::atomic<int> calls_made_{0};
  std::atomic<int> warning_count_{0};
  std::function<void(const std::string&)> warn_;
  std::unique_ptr<InFlightGate> gate_;
};

}  // namespace paraicl
