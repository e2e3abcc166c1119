#pragma once

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "paraicl/distribution.hpp"
#include "paraicl/types.hpp"

namespace paraicl {

struct NextTokenRequest {
  std::string prompt;           // rendered batch prompt, non-empty
  std::vector<TokenId> prefix;  // shared generated prefix, appended to every prompt
  std::optional<int> want_top_k;
};

/**
 * Next-token distribution source. The decoder fans out one call per batch
 * per step and joins, so implementations must tolerate concurrent calls.
 */
class LmBackend {
 public:
  virtual ~LmBackend() = default;

  virtual TokenDistribution next_token_distribution(const NextTokenRequest& request) = 0;
  virtual std::string detokenize(std::span<const TokenId> ids) const = 0;
  virtual bool is_eos(TokenId id) const = 0;
  virtual std::string name() const = 0;
};

/**
 * Run-scoped surface-string to id table for backends without tokenizer ids.
 * Ids are assigned in first-seen order and never change within a run.
 */
class SurfaceInterner {
 public:
  TokenId intern(const std::string& surface);
  std::optional<TokenId> find(const std::string& surface) const;
  std::string surface(TokenId id) const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Rewrites every distribution over the union of all supports, filling zeros
// for absent ids. Nonzero entries pass through exactly; complete flags are
// preserved. Requires at least one distribution.
std::vector<TokenDistribution> align_truncated_distributions(
    const std::vector<TokenDistribution>& dists);

}  // namespace paraicl
