#pragma once

#include <limits>
#include <string>
#include <vector>

#include "paraicl/distribution.hpp"

namespace paraicl {

// Sentinel score for tokens outside the plausible set.
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Tokens whose foremost-batch probability reaches alpha times that batch's
// maximum. Always contains the foremost batch's argmax.
struct PlausibleTokenSet {
  std::vector<TokenId> token_ids;  // ascending
  double threshold = 0.0;

  bool contains(TokenId id) const;
  std::size_t size() const { return token_ids.size(); }
};

/**
 * One decoding step. `batch_dists` are the aligned per-batch distributions
 * (identical supports); `support` is that shared id list; `scores` is the
 * strategy's per-token score parallel to `support` (kNegInf outside `head`;
 * vote counts for majority voting; log-ratios for contrastive decoding).
 * `selected_prob` is the ensemble-average probability of the chosen token,
 * whatever the strategy's ranking score was.
 */
struct StepRecord {
  std::vector<TokenDistribution> batch_dists;
  PlausibleTokenSet head;
  std::vector<TokenId> support;
  std::vector<double> scores;
  TokenId selected = -1;
  double selected_prob = 0.0;
};

struct DecodeTrace {
  std::vector<StepRecord> steps;
  std::vector<TokenId> continuation_ids;
  // Sum over steps of log(selected_prob), the log-likelihood of the emitted
  // sequence under the per-step ensemble distribution.
  double sequence_log_likelihood = 0.0;
  std::string stop_reason;  // "eos", "stop_sequence" or "max_new_tokens"
};

struct DecodeResult {
  std::string text;  // detokenized continuation, stop sequences truncated out
  std::vector<TokenId> continuation_ids;
  DecodeTrace trace;
};

// JSON for --trace output. Non-finite scores serialize as null.
std::string trace_to_json(const DecodeTrace& trace);

}  // namespace paraicl
