#include "paraicl/types.hpp"

#include <sstream>

namespace paraicl {

TokenId Vocabulary::add(std::string surface) {
  if (by_surface_.count(surface) != 0) {
    throw Error("duplicate token surface: '" + surface + "'");
  }
  const TokenId id = static_cast<TokenId>(tokens_.size());
  by_surface_.emplace(surface, id);
  tokens_.push_back(Token{id, std::move(surface)});
  return id;
}

std::optional<TokenId> Vocabulary::find(const std::string& surface) const {
  auto it = by_surface_.find(surface);
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::set_eos_id(TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error("eos id out of range");
  }
  eos_id_ = id;
}

void Vocabulary::set_unk_id(TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error("unk id out of range");
  }
  unk_id_ = id;
}

std::vector<TokenId> Vocabulary::tokenize(const std::string& text) const {
  std::vector<TokenId> out;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    auto id = find(word);
    out.push_back(id ? *id : unk_id_);
  }
  return out;
}

std::string Vocabulary::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += surface(ids[i]);
  }
  return out;
}

}  // namespace paraicl
