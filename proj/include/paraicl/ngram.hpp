#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "paraicl/lm_backend.hpp"
#include "paraicl/types.hpp"

namespace paraicl {

/**
 * Word-level add-k n-gram model: a deterministic, fully-inspectable stand-in
 * for a real LM. Distributions are complete, sum to 1 and keep every token
 * above the smoothing floor, so only the plausibility filter ever removes
 * candidates. Immutable after training.
 *
 * Training counts, per corpus line with words w_1..w_n, one event per w_j
 * with context = the up-to-(order-1) preceding words of that line, plus (for
 * order >= 2) one end-of-line event targeting EOS. The vocabulary is the
 * corpus types in first-seen order with EOS and UNK appended.
 */
class NGramModel : public LmBackend {
 public:
  static constexpr const char* kEosSurface = "</s>";
  static constexpr const char* kUnkSurface = "<unk>";

  // order >= 1, smoothing_k > 0; corpus must contain at least one word.
  static NGramModel train(const std::string& corpus_text, int order, double smoothing_k);

  static NGramModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  TokenDistribution next_token_distribution(const NextTokenRequest& request) override;
  std::string detokenize(std::span<const TokenId> ids) const override;
  bool is_eos(TokenId id) const override;
  std::string name() const override { return "ngram"; }

  const Vocabulary& vocabulary() const { return vocab_; }
  int order() const { return order_; }
  double smoothing_k() const { return smoothing_k_; }

  // Conditional over the full vocabulary given the last (order-1) context ids.
  TokenDistribution conditional(std::span<const TokenId> context) const;

 private:
  NGramModel() = default;

  static std::string context_key(std::span<const TokenId> context);

  int order_ = 1;
  double smoothing_k_ = 0.5;
  Vocabulary vocab_;
  // context key ("id,id,...") -> sparse target counts
  std::unordered_map<std::string, std::unordered_map<TokenId, double>> counts_;
};

}  // namespace paraicl
