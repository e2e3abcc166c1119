#include "paraicl/batching.hpp"

#include <algorithm>

#include "paraicl/kernels.hpp"

namespace paraicl {

void BatchingConfig::validate() const {
  if (m < 1) throw ConfigError("batching: m must be >= 1");
  if (k < 1) throw ConfigError("batching: k must be >= 1");
  if (m > k) throw ConfigError("batching: m must be <= k");
  if (strict_divisibility && k % m != 0) {
    throw ConfigError("batching: k=" + std::to_string(k) + " is not divisible by m=" +
                      std::to_string(m));
  }
}

void PromptTemplate::validate() const {
  if (demonstration_template.find("{q}") == std::string::npos ||
      demonstration_template.find("{a}") == std::string::npos) {
    throw TemplateError("demonstration_template needs {q} and {a} placeholders");
  }
  if (test_template.find("{test}") == std::string::npos) {
    throw TemplateError("test_template needs a {test} placeholder");
  }
}

std::vector<ScoredDemonstration> sort_by_similarity(const std::vector<Demonstration>& demos,
                                                    const std::string& test_question,
                                                    EmbeddingProvider& provider) {
  if (demos.empty()) throw ConfigError("sort_by_similarity: no demonstrations");

  const EmbeddingVector test_vec = provider.embed(test_question);
  std::vector<std::string> questions;
  questions.reserve(demos.size());
  for (const auto& d : demos) questions.push_back(d.question);
  const std::vector<EmbeddingVector> vecs = provider.embed_batch(questions);

  std::vector<ScoredDemonstration> scored;
  scored.reserve(demos.size());
  for (std::size_t i = 0; i < demos.size(); ++i) {
    scored.push_back({demos[i], cosine_similarity(vecs[i], test_vec)});
  }
  // Stable: equal similarities keep input order.
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.similarity > b.similarity;
  });
  return scored;
}

std::vector<Batch> partition_batches(std::vector<ScoredDemonstration> sorted,
                                     const BatchingConfig& config) {
  config.validate();
  if (sorted.size() != static_cast<std::size_t>(config.k)) {
    throw ConfigError("partition_batches: got " + std::to_string(sorted.size()) +
                      " demonstrations, config.k=" + std::to_string(config.k));
  }
  const std::size_t m = static_cast<std::size_t>(config.m);
  std::vector<Batch> batches;
  batches.reserve((sorted.size() + m - 1) / m);
  for (std::size_t start = 0; start < sorted.size(); start += m) {
    Batch b;
    b.index = static_cast<int>(batches.size()) + 1;
    const std::size_t end = std::min(start + m, sorted.size());
    b.members.assign(sorted.begin() + static_cast<std::ptrdiff_t>(start),
                     sorted.begin() + static_cast<std::ptrdiff_t>(end));
    batches.push_back(std::move(b));
  }
  return batches;
}

BatchWeights compute_batch_weights(const std::vector<Batch>& batches) {
  if (batches.empty()) throw ConfigError("compute_batch_weights: no batches");

  std::vector<double> sums;
  sums.reserve(batches.size());
  for (const auto& b : batches) {
    std::vector<double> clamped;
    clamped.reserve(b.members.size());
    // Cosine can go negative; negative mass would push weights outside [0,1].
    for (const auto& mbr : b.members) clamped.push_back(std::max(mbr.similarity, 0.0));
    sums.push_back(kernels::sum(clamped));
  }

  const double total = kernels::sum(sums);
  BatchWeights w;
  if (total <= 0.0) {
    w.weights.assign(batches.size(), 1.0 / static_cast<double>(batches.size()));
  } else {
    kernels::scale(sums, 1.0 / total);
    w.weights = std::move(sums);
  }
  return w;
}

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string render_prompt(const std::vector<Demonstration>& demos,
                          const std::string& test_question, const PromptTemplate& tmpl) {
  tmpl.validate();
  std::string out;
  for (const auto& d : demos) {
    std::string block = tmpl.demonstration_template;
    replace_all(block, "{q}", d.question);
    replace_all(block, "{a}", d.answer);
    out += block;
    out += tmpl.separator;
  }
  std::string test_block = tmpl.test_template;
  replace_all(test_block, "{test}", test_question);
  out += test_block;
  // The model continues right after the answer cue.
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t' || out.back() == '\n' ||
                          out.back() == '\r')) {
    out.pop_back();
  }
  return out;
}

std::vector<BatchPrompt> assemble_prompts(const std::vector<Batch>& batches,
                                          const std::string& test_question,
                                          const PromptTemplate& tmpl, WithinBatchOrder order) {
  std::vector<BatchPrompt> prompts;
  prompts.reserve(batches.size());
  for (const auto& b : batches) {
    std::vector<Demonstration> demos;
    demos.reserve(b.members.size());
    for (const auto& mbr : b.members) demos.push_back(mbr.demo);
    // Members sit in rank (descending-similarity) order; ascending rendering
    // reverses them so the most similar demonstration touches the question.
    if (order == WithinBatchOrder::ascending_similarity) {
      std::reverse(demos.begin(), demos.end());
    }
    prompts.push_back({b.index, render_prompt(demos, test_question, tmpl)});
  }
  return prompts;
}

}  // namespace paraicl
