#include "paraicl/decoder.hpp"

#include <cmath>
#include <functional>
#include <future>

#include "paraicl/kernels.hpp"

namespace paraicl {

PlausibleTokenSet plausible_token_set(const TokenDistribution& batch1_dist, double alpha) {
  if (batch1_dist.empty()) {
    throw EmptyDistribution("plausible_token_set: empty distribution");
  }
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");

  PlausibleTokenSet head;
  head.threshold = alpha * batch1_dist.max_prob();
  for (std::size_t i = 0; i < batch1_dist.size(); ++i) {
    if (batch1_dist.probs()[i] >= head.threshold) {
      head.token_ids.push_back(batch1_dist.ids()[i]);
    }
  }
  return head;
}

double was_score(TokenId token, const BatchWeights& weights,
                 const std::vector<TokenDistribution>& aligned_dists,
                 const PlausibleTokenSet& head) {
  if (weights.weights.size() != aligned_dists.size()) {
    throw LengthMismatch("was_score: " + std::to_string(weights.weights.size()) +
                         " weights for " + std::to_string(aligned_dists.size()) + " batches");
  }
  if (!head.contains(token)) return kNegInf;
  double score = 0.0;
  for (std::size_t z = 0; z < aligned_dists.size(); ++z) {
    score += weights.weights[z] * aligned_dists[z].prob(token);
  }
  return score;
}

namespace {

void check_aligned(const std::vector<TokenDistribution>& aligned) {
  if (aligned.empty()) throw EmptyDistribution("decoder: no distributions");
  if (aligned[0].empty()) throw EmptyDistribution("decoder: empty support");
  for (std::size_t i = 1; i < aligned.size(); ++i) {
    if (aligned[i].ids() != aligned[0].ids()) {
      throw Error("decoder: distributions do not share a common support");
    }
  }
}

PlausibleTokenSet full_support(const TokenDistribution& dist) {
  return PlausibleTokenSet{dist.ids(), 0.0};
}

// Weighted average of aligned probability arrays.
std::vector<double> weighted_average(const std::vector<TokenDistribution>& aligned,
                                     std::span<const double> weights) {
  std::vector<double> avg(aligned[0].size(), 0.0);
  for (std::size_t z = 0; z < aligned.size(); ++z) {
    kernels::axpy(weights[z], aligned[z].probs(), avg);
  }
  return avg;
}

using Selector = std::function<StepSelection(const std::vector<TokenDistribution>&)>;

std::vector<TokenDistribution> fan_out(const std::vector<std::string>& prompts,
                                       const std::vector<TokenId>& prefix,
                                       LmBackend& backend) {
  if (prompts.size() == 1) {
    return {backend.next_token_distribution({prompts[0], prefix, std::nullopt})};
  }
  std::vector<std::future<TokenDistribution>> futures;
  futures.reserve(prompts.size());
  for (const auto& prompt : prompts) {
    futures.push_back(std::async(std::launch::async, [&backend, &prompt, &prefix] {
      return backend.next_token_distribution({prompt, prefix, std::nullopt});
    }));
  }
  // Joined in batch order, so the result is order-deterministic regardless
  // of completion order.
  std::vector<TokenDistribution> dists;
  dists.reserve(futures.size());
  for (auto& f : futures) dists.push_back(f.get());
  return dists;
}

DecodeResult run_decode_loop(const std::vector<std::string>& prompts, LmBackend& backend,
                             const GenerationConfig& config, const Selector& select) {
  config.validate();
  if (prompts.empty()) throw ConfigError("decode: no prompts");
  for (const auto& p : prompts) {
    if (p.empty()) throw ConfigError("decode: empty prompt");
  }

  DecodeResult result;
  result.trace.stop_reason = "max_new_tokens";
  std::vector<TokenId> continuation;

  for (int step = 0; step < config.max_new_tokens; ++step) {
    auto aligned = align_truncated_distributions(fan_out(prompts, continuation, backend));
    StepSelection sel = select(aligned);
    result.trace.steps.push_back(std::move(sel.record));
    result.trace.sequence_log_likelihood +=
        std::log(result.trace.steps.back().selected_prob);

    if (backend.is_eos(sel.token)) {
      result.trace.stop_reason = "eos";
      break;
    }
    continuation.push_back(sel.token);

    if (!config.stop_sequences.empty()) {
      const std::string text = backend.detokenize(continuation);
      std::size_t cut = std::string::npos;
      for (const auto& stop : config.stop_sequences) {
        if (stop.empty()) continue;
        const std::size_t pos = text.find(stop);
        if (pos < cut) cut = pos;
      }
      if (cut != std::string::npos) {
        result.text = text.substr(0, cut);
        result.trace.stop_reason = "stop_sequence";
        result.continuation_ids = continuation;
        result.trace.continuation_ids = std::move(continuation);
        return result;
      }
    }
  }

  result.text = backend.detokenize(continuation);
  result.continuation_ids = continuation;
  result.trace.continuation_ids = std::move(continuation);
  return result;
}

std::vector<std::string> prompt_texts(const std::vector<BatchPrompt>& prompts) {
  std::vector<std::string> texts;
  texts.reserve(prompts.size());
  for (const auto& p : prompts) texts.push_back(p.text);
  return texts;
}

}  // namespace

StepSelection select_next_token(const BatchWeights& weights,
                                const std::vector<TokenDistribution>& aligned_dists,
                                double alpha, bool use_constraint) {
  check_aligned(aligned_dists);
  if (weights.weights.size() != aligned_dists.size()) {
    throw LengthMismatch("select_next_token: " + std::to_string(weights.weights.size()) +
                         " weights for " + std::to_string(aligned_dists.size()) +
                         " batches");
  }

  PlausibleTokenSet head = use_constraint ? plausible_token_set(aligned_dists[0], alpha)
                                          : full_support(aligned_dists[0]);
  const std::vector<TokenId>& support = aligned_dists[0].ids();
  const std::vector<double> avg = weighted_average(aligned_dists, weights.weights);

  std::vector<double> scores = avg;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!head.contains(support[i])) scores[i] = kNegInf;
  }

  // Support is ascending by id, so the first maximum is the lowest-id winner.
  const std::size_t best = kernels::argmax(scores);

  StepSelection sel;
  sel.token = support[best];
  sel.record.batch_dists = aligned_dists;
  sel.record.head = std::move(head);
  sel.record.support = support;
  sel.record.scores = std::move(scores);
  sel.record.selected = sel.token;
  sel.record.selected_prob = avg[best];
  return sel;
}

DecodeResult decode_paraicl(const std::vector<BatchPrompt>& prompts,
                            const BatchWeights& weights, LmBackend& backend,
                            const GenerationConfig& config) {
  if (prompts.size() != weights.weights.size()) {
    throw LengthMismatch("decode_paraicl: " + std::to_string(weights.weights.size()) +
                         " weights for " + std::to_string(prompts.size()) + " prompts");
  }
  return run_decode_loop(
      prompt_texts(prompts), backend, config, [&](const std::vector<TokenDistribution>& a) {
        return select_next_token(weights, a, config.alpha, config.use_plausibility_constraint);
      });
}

DecodeResult decode_standard(const std::string& prompt, LmBackend& backend,
                             const GenerationConfig& config) {
  return run_decode_loop(
      {prompt}, backend, config, [](const std::vector<TokenDistribution>& aligned) {
        const TokenDistribution& d = aligned[0];
        StepSelection sel;
        sel.token = d.argmax();
        sel.record.batch_dists = aligned;
        sel.record.head = full_support(d);
        sel.record.support = d.ids();
        sel.record.scores = d.probs();
        sel.record.selected = sel.token;
        sel.record.selected_prob = d.prob(sel.token);
        return sel;
      });
}

DecodeResult decode_standard_average(const std::vector<BatchPrompt>& prompts,
                                     LmBackend& backend, const GenerationConfig& config) {
  BatchWeights uniform;
  uniform.weights.assign(prompts.size(), 1.0 / static_cast<double>(prompts.size()));
  return decode_paraicl(prompts, uniform, backend, config);
}

DecodeResult decode_majority_vote(const std::vector<BatchPrompt>& prompts,
                                  LmBackend& backend, const GenerationConfig& config) {
  const double s = static_cast<double>(prompts.size());
  return run_decode_loop(
      prompt_texts(prompts), backend, config,
      [s](const std::vector<TokenDistribution>& aligned) {
        check_aligned(aligned);
        const std::vector<TokenId>& support = aligned[0].ids();
        std::vector<double> votes(support.size(), 0.0);
        std::vector<double> summed(support.size(), 0.0);
        for (const auto& d : aligned) {
          // Alignment only adds zeros, so each batch's argmax is unchanged.
          votes[kernels::argmax(d.probs())] += 1.0;
          kernels::axpy(1.0, d.probs(), summed);
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i < support.size(); ++i) {
          if (votes[i] > votes[best] ||
              (votes[i] == votes[best] && summed[i] > summed[best])) {
            best = i;  // strict comparisons keep the lowest id on full ties
          }
        }

        StepSelection sel;
        sel.token = support[best];
        sel.record.batch_dists = aligned;
        sel.record.head = full_support(aligned[0]);
        sel.record.support = support;
        sel.record.scores = std::move(votes);
        sel.record.selected = sel.token;
        sel.record.selected_prob = summed[best] / s;
        return sel;
      });
}

DecodeResult decode_contrastive_paraicl(const std::vector<BatchPrompt>& positive_prompts,
                                        const BatchWeights& positive_weights,
                                        const std::vector<BatchPrompt>& contrastive_prompts,
                                        LmBackend& backend, const GenerationConfig& config,
                                        double floor_prob) {
  if (positive_prompts.empty()) throw ConfigError("contrastive: no positive prompts");
  if (contrastive_prompts.empty()) throw ConfigError("contrastive: no contrastive prompts");
  if (positive_prompts.size() != positive_weights.weights.size()) {
    throw LengthMismatch("contrastive: " +
                         std::to_string(positive_weights.weights.size()) + " weights for " +
                         std::to_string(positive_prompts.size()) + " positive prompts");
  }
  if (!(floor_prob > 0.0)) throw ConfigError("contrastive: floor_prob must be > 0");

  std::vector<std::string> all_prompts = prompt_texts(positive_prompts);
  for (const auto& p : contrastive_prompts) all_prompts.push_back(p.text);
  const std::size_t n_pos = positive_prompts.size();
  const std::size_t n_neg = contrastive_prompts.size();

  return run_decode_loop(
      all_prompts, backend, config,
      [&, n_pos, n_neg, floor_prob](const std::vector<TokenDistribution>& aligned) {
        check_aligned(aligned);
        const std::vector<TokenId>& support = aligned[0].ids();

        std::vector<double> pos(support.size(), 0.0);
        for (std::size_t z = 0; z < n_pos; ++z) {
          kernels::axpy(positive_weights.weights[z], aligned[z].probs(), pos);
        }
        std::vector<double> neg(support.size(), 0.0);
        for (std::size_t z = n_pos; z < aligned.size(); ++z) {
          kernels::axpy(1.0 / static_cast<double>(n_neg), aligned[z].probs(), neg);
        }

        // The constraint anchors to positive batch 1.
        PlausibleTokenSet head = config.use_plausibility_constraint
                                     ? plausible_token_set(aligned[0], config.alpha)
                                     : full_support(aligned[0]);

        std::vector<double> scores(support.size(), kNegInf);
        for (std::size_t i = 0; i < support.size(); ++i) {
          if (!head.contains(support[i])) continue;
          // Floored before the logs: truncated supports put hard zeros on
          // both sides and -inf minus -inf has no useful order.
          scores[i] = std::log(std::max(pos[i], floor_prob)) -
                      std::log(std::max(neg[i], floor_prob));
        }

        const std::size_t best = kernels::argmax(scores);
        StepSelection sel;
        sel.token = support[best];
        sel.record.batch_dists = aligned;
        sel.record.head = std::move(head);
        sel.record.support = support;
        sel.record.scores = std::move(scores);
        sel.record.selected = sel.token;
        sel.record.selected_prob = pos[best];
        return sel;
      });
}

}  // namespace paraicl
