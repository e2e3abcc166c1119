#include "paraicl/lm_backend.hpp"

#include <algorithm>

namespace paraicl {

TokenId SurfaceInterner::intern(const std::string& surface) {
  std::lock_guard lock(mutex_);
  auto it = ids_.find(surface);
  if (it != ids_.end()) return it->second;
  const TokenId id = static_cast<TokenId>(surfaces_.size());
  surfaces_.push_back(surface);
  ids_.emplace(surface, id);
  return id;
}

std::optional<TokenId> SurfaceInterner::find(const std::string& surface) const {
  std::lock_guard lock(mutex_);
  auto it = ids_.find(surface);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string SurfaceInterner::surface(TokenId id) const {
  std::lock_guard lock(mutex_);
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size()) {
    throw Error("interner: unknown token id " + std::to_string(id));
  }
  return surfaces_[static_cast<std::size_t>(id)];
}

std::size_t SurfaceInterner::size() const {
  std::lock_guard lock(mutex_);
  return surfaces_.size();
}

std::vector<TokenDistribution> align_truncated_distributions(
    const std::vector<TokenDistribution>& dists) {
  if (dists.empty()) throw Error("align_truncated_distributions: no distributions");

  std::vector<TokenId> support;
  for (const auto& d : dists) {
    support.insert(support.end(), d.ids().begin(), d.ids().end());
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  std::vector<TokenDistribution> out;
  out.reserve(dists.size());
  for (const auto& d : dists) {
    std::vector<std::pair<TokenId, double>> entries;
    entries.reserve(support.size());
    for (TokenId id : support) entries.emplace_back(id, d.prob(id));
    out.push_back(TokenDistribution::from_entries(std::move(entries), d.complete()));
  }
  return out;
}

}  // namespace paraicl
