#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

#include "paraicl/types.hpp"

namespace paraicl::testing {

// Brute-force reference for one constrained weighted-average selection step,
// written against plain maps with none of the library's alignment, span or
// kernel machinery. Missing ids count as probability zero. The per-token sum
// runs over batches in the same order as the library so agreement is exact.
struct OracleStep {
  TokenId selected = -1;
  double selected_score = 0.0;
  std::vector<TokenId> head;  // ascending
};

inline OracleStep oracle_select(const std::vector<std::map<TokenId, double>>& batches,
                                const std::vector<double>& weights, double alpha,
                                bool use_constraint) {
  std::map<TokenId, double> unified;
  for (const auto& batch : batches) {
    for (const auto& [id, p] : batch) unified.emplace(id, 0.0);
  }

  auto prob = [](const std::map<TokenId, double>& batch, TokenId id) {
    auto it = batch.find(id);
    return it == batch.end() ? 0.0 : it->second;
  };

  double max1 = 0.0;
  for (const auto& [id, p] : batches.front()) max1 = std::max(max1, p);
  const double threshold = alpha * max1;

  OracleStep out;
  bool have = false;
  for (const auto& [id, unused] : unified) {
    if (use_constraint && prob(batches.front(), id) < threshold) continue;
    out.head.push_back(id);
    double score = 0.0;
    for (std::size_t z = 0; z < batches.size(); ++z) {
      score += weights[z] * prob(batches[z], id);
    }
    // Strict comparison over ascending ids keeps the lowest id on ties.
    if (!have || score > out.selected_score) {
      have = true;
      out.selected = id;
      out.selected_score = score;
    }
  }
  return out;
}

}  // namespace paraicl::testing
