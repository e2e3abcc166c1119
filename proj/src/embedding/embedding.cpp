#include "paraicl/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>

#include "paraicl/kernels.hpp"

namespace paraicl {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw DimMismatch("cosine_similarity: dims " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
  const double na = std::sqrt(kernels::dot(a.values, a.values));
  const double nb = std::sqrt(kernels::dot(b.values, b.values));
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine_similarity: zero-norm input");
  return kernels::dot(a.values, b.values) / (na * nb);
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= kFnvPrime;
  }
  return h;
}

unsigned char ascii_lower(unsigned char b) {
  return (b >= 'A' && b <= 'Z') ? static_cast<unsigned char>(b + 0x20) : b;
}

}  // namespace

EmbeddingVector hashed_ngram_embed(const std::string& text, std::size_t dim) {
  if (text.empty()) throw EmptyText("hashed_ngram_embed: empty text");
  if (dim < 64) throw ConfigError("hashed_ngram_embed: dim must be >= 64");

  // '^' prefix and '$' suffix so one-character texts still yield a trigram.
  std::vector<unsigned char> padded;
  padded.reserve(text.size() + 2);
  padded.push_back('^');
  for (unsigned char b : text) padded.push_back(ascii_lower(b));
  padded.push_back('$');

  EmbeddingVector v;
  v.values.assign(dim, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    v.values[fnv1a64(padded.data() + i, 3) % dim] += 1.0;
  }
  const double norm = std::sqrt(kernels::dot(v.values, v.values));
  kernels::scale(v.values, 1.0 / norm);
  return v;
}

HashedNgramProvider::HashedNgramProvider(std::size_t dim) : dim_(dim) {
  if (dim < 64) throw ConfigError("hashed_ngram provider: dim must be >= 64");
}

EmbeddingVector HashedNgramProvider::embed(const std::string& text) {
  return hashed_ngram_embed(text, dim_);
}

void EmbeddingProviderConfig::validate() const {
  if (kind == Kind::remote) {
    if (endpoint.empty()) throw ConfigError("remote embedding provider requires an endpoint");
  } else {
    if (dim < 64) throw ConfigError("embedding.dim must be >= 64");
  }
}

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner)
    : inner_(std::move(inner)) {}

EmbeddingVector CachingEmbeddingProvider::embed(const std::string& text) {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
  }
  EmbeddingVector computed = inner_->embed(text);
  std::unique_lock lock(mutex_);
  // try_emplace keeps the first stored value canonical under a racing miss.
  auto [it, inserted] = cache_.try_emplace(text, std::move(computed));
  return it->second;
}

std::vector<EmbeddingVector> CachingEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

std::size_t CachingEmbeddingProvider::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& config) {
  config.validate();
  std::shared_ptr<EmbeddingProvider> inner;
  if (config.kind == EmbeddingProviderConfig::Kind::remote) {
    inner = std::make_shared<RemoteEmbeddingProvider>(config);
  } else {
    inner = std::make_shared<HashedNgramProvider>(config.dim);
  }
  return std::make_shared<CachingEmbeddingProvider>(std::move(inner));
}

}  // namespace paraicl
