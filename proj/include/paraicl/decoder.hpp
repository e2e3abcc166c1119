#pragma once

#include <string>
#include <vector>

#include "paraicl/batching.hpp"
#include "paraicl/lm_backend.hpp"
#include "paraicl/trace.hpp"
#include "paraicl/types.hpp"

namespace paraicl {

// {t : p1(t) >= alpha * max p1}. The foremost batch's argmax is always in.
PlausibleTokenSet plausible_token_set(const TokenDistribution& batch1_dist, double alpha);

// Weighted-average score of one token: sum_z weights[z] * p_z(token) when the
// token is plausible, kNegInf otherwise. Inputs must be aligned.
double was_score(TokenId token, const BatchWeights& weights,
                 const std::vector<TokenDistribution>& aligned_dists,
                 const PlausibleTokenSet& head);

struct StepSelection {
  TokenId token = -1;
  StepRecord record;
};

// One step of constrained weighted-average decoding over aligned per-batch
// distributions. head anchors to aligned_dists[0]; with use_constraint off it
// widens to the full support. Ties resolve to the lowest token id.
StepSelection select_next_token(const BatchWeights& weights,
                                const std::vector<TokenDistribution>& aligned_dists,
                                double alpha, bool use_constraint);

/**
 * The parallel decoding loop: per step, every batch prompt (plus the shared
 * generated prefix) is queried concurrently, supports are aligned, and the
 * plausibility-constrained weighted-average argmax extends the prefix.
 * Generation stops on EOS (before emission), on a stop sequence appearing in
 * the detokenized text (truncated out of the result), or at max_new_tokens.
 */
DecodeResult decode_paraicl(const std::vector<BatchPrompt>& prompts,
                            const BatchWeights& weights, LmBackend& backend,
                            const GenerationConfig& config);

// Plain greedy decoding of one prompt; the baseline every ensemble strategy
// must collapse to at s=1.
DecodeResult decode_standard(const std::string& prompt, LmBackend& backend,
                             const GenerationConfig& config);

// decode_paraicl with forced uniform weights 1/s (constraint still applies).
DecodeResult decode_standard_average(const std::vector<BatchPrompt>& prompts,
                                     LmBackend& backend, const GenerationConfig& config);

// Per step each batch votes for its own argmax; most votes wins, ties go to
// the higher summed probability, then the lowest token id. No constraint.
DecodeResult decode_majority_vote(const std::vector<BatchPrompt>& prompts,
                                  LmBackend& backend, const GenerationConfig& config);

/**
 * Contrastive variant: P+ is the weighted average over positive batches, P-
 * the uniform average over contrastive batches; tokens (within the plausible
 * set of positive batch 1) are ranked by log(max(P+,floor)) - log(max(P-,floor)).
 */
DecodeResult decode_contrastive_paraicl(const std::vector<BatchPrompt>& positive_prompts,
                                        const BatchWeights& positive_weights,
                                        const std::vector<BatchPrompt>& contrastive_prompts,
                                        LmBackend& backend, const GenerationConfig& config,
                                        double floor_prob = 1e-10);

}  // namespace paraicl
