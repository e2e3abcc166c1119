#pragma once

#include <atomic>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paraicl/distribution.hpp"
#include "paraicl/lm_backend.hpp"

namespace paraicl::testing {

// Backend with a fixed vocabulary and per-(prompt, step) scripted
// distributions; step is the prefix length at call time. Detokenize is plain
// surface concatenation. The script must be written before decoding starts;
// concurrent reads share the immutable map.
class ScriptedBackend : public LmBackend {
 public:
  ScriptedBackend(std::vector<std::string> surfaces, const std::string& eos_surface)
      : surfaces_(std::move(surfaces)) {
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
      if (surfaces_[i] == eos_surface) eos_id_ = static_cast<TokenId>(i);
    }
    if (eos_id_ < 0) throw std::invalid_argument("eos surface not in vocabulary");
  }

  TokenId id_of(const std::string& surface) const {
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
      if (surfaces_[i] == surface) return static_cast<TokenId>(i);
    }
    throw std::invalid_argument("unknown surface: " + surface);
  }

  TokenDistribution dist(const std::map<std::string, double>& probs, bool complete) const {
    std::vector<std::pair<TokenId, double>> entries;
    entries.reserve(probs.size());
    for (const auto& [surface, p] : probs) entries.emplace_back(id_of(surface), p);
    return TokenDistribution::from_entries(std::move(entries), complete);
  }

  void script(const std::string& prompt, int step, TokenDistribution dist) {
    script_[{prompt, step}] = std::move(dist);
  }

  TokenDistribution next_token_distribution(const NextTokenRequest& request) override {
    calls_.fetch_add(1);
    auto it = script_.find({request.prompt, static_cast<int>(request.prefix.size())});
    if (it == script_.end()) {
      throw std::out_of_range("unscripted: '" + request.prompt + "' step " +
                              std::to_string(request.prefix.size()));
    }
    return it->second;
  }

  std::string detokenize(std::span<const TokenId> ids) const override {
    std::string out;
    for (TokenId id : ids) out += surfaces_.at(static_cast<std::size_t>(id));
    return out;
  }

  bool is_eos(TokenId id) const override { return id == eos_id_; }
  std::string name() const override { return "scripted"; }

  int calls() const { return calls_.load(); }

 private:
  std::vector<std::string> surfaces_;
  TokenId eos_id_ = -1;
  std::map<std::pair<std::string, int>, TokenDistribution> script_;
  std::atomic<int> calls_{0};
};

}  // namespace paraicl::testing
