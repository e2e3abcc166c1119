#include "paraicl/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paraicl/kernels.hpp"

namespace paraicl {

TokenDistribution TokenDistribution::from_entries(
    std::vector<std::pair<TokenId, double>> entries, bool complete) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  TokenDistribution d;
  d.complete_ = complete;
  d.ids_.reserve(entries.size());
  d.probs_.reserve(entries.size());
  for (const auto& [id, p] : entries) {
    if (!d.ids_.empty() && d.ids_.back() == id) {
      throw Error("duplicate token id in distribution: " + std::to_string(id));
    }
    if (!(p >= 0.0)) {
      throw Error("negative or NaN probability for token " + std::to_string(id));
    }
    d.ids_.push_back(id);
    d.probs_.push_back(p);
  }
  if (complete && !d.probs_.empty()) {
    const double s = kernels::sum(d.probs_);
    if (std::abs(s - 1.0) > 1e-6) {
      throw Error("complete distribution sums to " + std::to_string(s));
    }
  }
  return d;
}

TokenDistribution TokenDistribution::from_dense(std::vector<double> probs, bool complete) {
  TokenDistribution d;
  d.complete_ = complete;
  d.probs_ = std::move(probs);
  d.ids_.resize(d.probs_.size());
  std::iota(d.ids_.begin(), d.ids_.end(), 0);
  return d;
}

double TokenDistribution::prob(TokenId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return 0.0;
  return probs_[static_cast<std::size_t>(it - ids_.begin())];
}

bool TokenDistribution::contains(TokenId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

double TokenDistribution::sum() const { return kernels::sum(probs_); }

double TokenDistribution::max_prob() const {
  if (probs_.empty()) throw EmptyDistribution("max_prob of empty distribution");
  return kernels::max_value(probs_);
}

TokenId TokenDistribution::argmax() const {
  if (probs_.empty()) throw EmptyDistribution("argmax of empty distribution");
  // ids_ ascending, so the first maximum is the lowest id.
  return ids_[kernels::argmax(probs_)];
}

TokenDistribution normalize_distribution(const std::map<TokenId, double>& raw) {
  std::vector<std::pair<TokenId, double>> entries(raw.begin(), raw.end());
  double total = 0.0;
  for (const auto& [id, w] : entries) {
    if (!(w >= 0.0)) {
      throw Error("negative weight for token " + std::to_string(id));
    }
    total += w;
  }
  if (entries.empty() || total <= 0.0) {
    throw AllZeroWeights("normalize_distribution: no positive weight");
  }
  std::vector<double> probs;
  probs.reserve(entries.size());
  for (const auto& [id, w] : entries) probs.push_back(w);
  kernels::scale(probs, 1.0 / total);
  std::vector<std::pair<TokenId, double>> scaled;
  scaled.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    scaled.emplace_back(entries[i].first, probs[i]);
  }
  return TokenDistribution::from_entries(std::move(scaled), /*complete=*/true);
}

TokenDistribution top_k_truncate(const TokenDistribution& dist, int k) {
  if (!dist.complete()) throw Error("top_k_truncate requires a complete distribution");
  if (k <= 0) throw Error("top_k_truncate: k must be positive");
  std::vector<std::pair<TokenId, double>> entries;
  entries.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    entries.emplace_back(dist.ids()[i], dist.probs()[i]);
  }
  if (static_cast<std::size_t>(k) < entries.size()) {
    // Highest probability first; equal probabilities keep the lower id.
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    entries.resize(static_cast<std::size_t>(k));
  }
  return TokenDistribution::from_entries(std::move(entries), /*complete=*/false);
}

}  // namespace paraicl
