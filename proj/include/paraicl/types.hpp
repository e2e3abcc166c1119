#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "paraicl/errors.hpp"

namespace paraicl {

using TokenId = std::int32_t;

struct Token {
  TokenId id = 0;
  std::string surface;
};

/**
 * Dense token table with ids 0..size-1 plus designated EOS/UNK entries.
 * Tokenization is whitespace word-level; unknown words map to UNK.
 */
class Vocabulary {
 public:
  Vocabulary() = default;

  // Appends a token; the surface must be new. Returns its id.
  TokenId add(std::string surface);

  std::size_t size() const { return tokens_.size(); }
  const Token& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::string& surface(TokenId id) const { return token(id).surface; }
  std::optional<TokenId> find(const std::string& surface) const;

  TokenId eos_id() const { return eos_id_; }
  TokenId unk_id() const { return unk_id_; }
  void set_eos_id(TokenId id);
  void set_unk_id(TokenId id);

  // Whitespace split; unknown words become unk_id.
  std::vector<TokenId> tokenize(const std::string& text) const;
  // Joins surfaces with single spaces.
  std::string detokenize(std::span<const TokenId> ids) const;

  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  std::vector<Token> tokens_;
  std::unordered_map<std::string, TokenId> by_surface_;
  TokenId eos_id_ = -1;
  TokenId unk_id_ = -1;
};

struct Demonstration {
  std::string question;
  std::string answer;
};

struct TestSample {
  std::string question;
  std::optional<std::string> gold_answer;
  std::string sample_id;
};

struct GenerationConfig {
  double alpha = 0.1;
  int max_new_tokens = 64;
  std::vector<std::string> stop_sequences;
  bool use_plausibility_constraint = true;

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");
    if (max_new_tokens < 0) throw ConfigError("max_new_tokens must be >= 0");
  }
};

}  // namespace paraicl
