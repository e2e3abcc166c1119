#include "paraicl/ngram.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace paraicl {

using nlohmann::json;

std::string NGramModel::context_key(std::span<const TokenId> context) {
  std::string key;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i > 0) key += ',';
    key += std::to_string(context[i]);
  }
  return key;
}

NGramModel NGramModel::train(const std::string& corpus_text, int order, double smoothing_k) {
  if (order < 1) throw ConfigError("ngram: order must be >= 1");
  if (!(smoothing_k > 0.0)) throw ConfigError("ngram: smoothing_k must be > 0");

  NGramModel model;
  model.order_ = order;
  model.smoothing_k_ = smoothing_k;

  std::vector<std::vector<std::string>> lines;
  std::istringstream in(corpus_text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ws(line);
    std::vector<std::string> words;
    std::string w;
    while (ws >> w) {
      if (!model.vocab_.find(w)) model.vocab_.add(w);
      words.push_back(std::move(w));
    }
    if (!words.empty()) lines.push_back(std::move(words));
  }
  if (lines.empty()) throw EmptyCorpus("ngram: corpus has no words");

  // EOS/UNK appended after the corpus types (reused if the corpus happens to
  // contain the literal surfaces).
  auto ensure = [&](const char* surface) {
    auto found = model.vocab_.find(surface);
    return found ? *found : model.vocab_.add(surface);
  };
  model.vocab_.set_eos_id(ensure(kEosSurface));
  model.vocab_.set_unk_id(ensure(kUnkSurface));

  const std::size_t ctx_len = static_cast<std::size_t>(order - 1);
  for (const auto& words : lines) {
    std::vector<TokenId> ids;
    ids.reserve(words.size());
    for (const auto& w : words) ids.push_back(*model.vocab_.find(w));

    // One event per word, context truncated at the line start.
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const std::size_t start = j > ctx_len ? j - ctx_len : 0;
      std::span<const TokenId> ctx(ids.data() + start, j - start);
      model.counts_[context_key(ctx)][ids[j]] += 1.0;
    }
    // Line-end event: only contextful models can see where a line ends; an
    // order-1 model counting EOS would skew every unigram estimate.
    if (order >= 2) {
      const std::size_t start = ids.size() > ctx_len ? ids.size() - ctx_len : 0;
      std::span<const TokenId> ctx(ids.data() + start, ids.size() - start);
      model.counts_[context_key(ctx)][model.vocab_.eos_id()] += 1.0;
    }
  }
  return model;
}

TokenDistribution NGramModel::conditional(std::span<const TokenId> context) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  if (context.size() > ctx_len) context = context.subspan(context.size() - ctx_len);

  std::vector<double> counts(vocab_.size(), 0.0);
  double total = 0.0;
  auto it = counts_.find(context_key(context));
  if (it != counts_.end()) {
    for (const auto& [id, c] : it->second) {
      counts[static_cast<std::size_t>(id)] = c;
      total += c;
    }
  }

  const double denom = total + smoothing_k_ * static_cast<double>(vocab_.size());
  std::vector<double> probs(vocab_.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = (counts[i] + smoothing_k_) / denom;
  }
  return TokenDistribution::from_dense(std::move(probs), /*complete=*/true);
}

TokenDistribution NGramModel::next_token_distribution(const NextTokenRequest& request) {
  if (request.prompt.empty()) throw ConfigError("ngram: empty prompt");
  std::vector<TokenId> context = vocab_.tokenize(request.prompt);
  context.insert(context.end(), request.prefix.begin(), request.prefix.end());
  return conditional(context);
}

std::string NGramModel::detokenize(std::span<const TokenId> ids) const {
  return vocab_.detokenize(ids);
}

bool NGramModel::is_eos(TokenId id) const { return id == vocab_.eos_id(); }

void NGramModel::save(const std::filesystem::path& path) const {
  json j;
  j["order"] = order_;
  j["smoothing_k"] = smoothing_k_;
  std::vector<std::string> surfaces;
  surfaces.reserve(vocab_.size());
  for (const auto& t : vocab_.tokens()) surfaces.push_back(t.surface);
  j["vocab"] = surfaces;
  j["eos_id"] = vocab_.eos_id();
  j["unk_id"] = vocab_.unk_id();
  json counts = json::object();
  for (const auto& [key, targets] : counts_) {
    json row = json::object();
    for (const auto& [id, c] : targets) row[std::to_string(id)] = c;
    counts[key] = std::move(row);
  }
  j["counts"] = std::move(counts);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write ngram model to " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("short write saving ngram model to " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read ngram model from " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("ngram model " + path.string() + " is not valid JSON: " + e.what());
  }

  NGramModel model;
  try {
    model.order_ = j.at("order").get<int>();
    model.smoothing_k_ = j.at("smoothing_k").get<double>();
    for (const auto& surface : j.at("vocab")) {
      model.vocab_.add(surface.get<std::string>());
    }
    model.vocab_.set_eos_id(j.at("eos_id").get<TokenId>());
    model.vocab_.set_unk_id(j.at("unk_id").get<TokenId>());
    for (const auto& [key, row] : j.at("counts").items()) {
      auto& targets = model.counts_[key];
      for (const auto& [id, c] : row.items()) {
        targets[static_cast<TokenId>(std::stoi(id))] = c.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("ngram model " + path.string() + " is malformed: " + e.what());
  }
  if (model.order_ < 1 || !(model.smoothing_k_ > 0.0)) {
    throw ConfigError("ngram model " + path.string() + " has invalid parameters");
  }
  return model;
}

}  // namespace paraicl
