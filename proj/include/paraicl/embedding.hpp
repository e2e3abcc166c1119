#pragma once

#include <cstddef>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "paraicl/errors.hpp"

namespace paraicl {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

// (a.b) / (|a||b|). Throws DimMismatch on unequal dims, ZeroVector when
// either input has zero norm.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/**
 * Text to fixed-dim vector. Implementations must tolerate concurrent embed
 * calls; wrap them in CachingEmbeddingProvider to compute each unique text
 * once per run.
 */
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual EmbeddingVector embed(const std::string& text) = 0;
  // Order-preserving; default loops over embed.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
};

// Deterministic local embedding: lowercased character trigrams over the text
// padded with '^' and '$', FNV-1a 64-bit hashed into dim buckets, counts
// L2-normalized. Requires dim >= 64 and non-empty text.
EmbeddingVector hashed_ngram_embed(const std::string& text, std::size_t dim);

class HashedNgramProvider : public EmbeddingProvider {
 public:
  explicit HashedNgramProvider(std::size_t dim = 1024);

  EmbeddingVector embed(const std::string& text) override;
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "hashed_ngram"; }

 private:
  std::size_t dim_;
};

struct EmbeddingProviderConfig {
  enum class Kind { hashed_ngram, remote };

  Kind kind = Kind::hashed_ngram;
  std::size_t dim = 1024;
  std::string endpoint;    // remote only
  std::string model_name;  // remote only

  // remote requires an endpoint; hashed_ngram requires dim >= 64.
  void validate() const;
};

// POSTs {"input": [texts], "model": model} to {endpoint}/v1/embeddings and
// reads {"data": [{"embedding": [...]}, ...]}. One request per embed_batch.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(EmbeddingProviderConfig config);

  EmbeddingVector embed(const std::string& text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return config_.dim; }
  std::string name() const override { return "remote:" + config_.model_name; }

 private:
  EmbeddingProviderConfig config_;
};

// Read-mostly cache keyed by text. A miss may compute twice under
// contention; the first stored value is the canonical one.
class CachingEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner);

  EmbeddingVector embed(const std::string& text) override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::size_t dim() const override { return inner_->dim(); }
  std::string name() const override { return inner_->name(); }

  std::size_t cache_size() const;

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

// Builds the configured provider wrapped in a cache.
std::shared_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config);

}  // namespace paraicl
