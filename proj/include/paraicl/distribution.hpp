#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "paraicl/types.hpp"

namespace paraicl {

/**
 * Probability table over token ids for one next-token step. Entries are kept
 * sorted by id in two parallel arrays so vocabulary-wide arithmetic can run
 * through the kernels. `complete` distinguishes a full distribution from a
 * truncated top-k one; truncated distributions are never renormalized.
 */
class TokenDistribution {
 public:
  TokenDistribution() = default;

  // Entries may arrive in any order; duplicates are invalid. Probabilities
  // must be non-negative; a complete distribution must sum to 1 within 1e-6.
  static TokenDistribution from_entries(std::vector<std::pair<TokenId, double>> entries,
                                        bool complete);
  // Fast path for a dense table: ids 0..probs.size()-1.
  static TokenDistribution from_dense(std::vector<double> probs, bool complete);

  const std::vector<TokenId>& ids() const { return ids_; }
  const std::vector<double>& probs() const { return probs_; }
  bool complete() const { return complete_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  // 0.0 for absent ids.
  double prob(TokenId id) const;
  bool contains(TokenId id) const;

  double sum() const;
  double max_prob() const;
  // Highest-probability id; ties resolve to the lowest id. Throws
  // EmptyDistribution when there are no entries.
  TokenId argmax() const;

 private:
  std::vector<TokenId> ids_;    // ascending
  std::vector<double> probs_;  // parallel to ids_
  bool complete_ = true;
};

// Scales positive weights to a complete distribution summing to 1 (within
// 1e-9). Throws AllZeroWeights when the input is empty or all-zero.
TokenDistribution normalize_distribution(const std::map<TokenId, double>& raw);

// Keeps the k highest-probability entries (ties to the lower id) with their
// probabilities unchanged and marks the result incomplete. k >= size returns
// the same entries, still marked incomplete.
TokenDistribution top_k_truncate(const TokenDistribution& dist, int k);

}  // namespace paraicl
