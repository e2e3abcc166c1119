#pragma once

#include <string>
#include <vector>

#include "paraicl/embedding.hpp"
#include "paraicl/types.hpp"

namespace paraicl {

// Order demonstrations are rendered in inside one batch prompt. Ascending
// puts the most similar demonstration adjacent to the test question.
enum class WithinBatchOrder { ascending_similarity, descending_similarity };

struct BatchingConfig {
  int k = 0;  // total demonstrations
  int m = 0;  // demonstrations per batch
  WithinBatchOrder within_batch_order = WithinBatchOrder::ascending_similarity;
  // When set, k must be divisible by m; otherwise the final batch may be
  // smaller (the leftover, lowest-similarity demonstrations).
  bool strict_divisibility = false;

  void validate() const;
};

struct ScoredDemonstration {
  Demonstration demo;
  double similarity = 0.0;
};

struct Batch {
  int index = 0;  // z, 1-based; batch 1 holds the top-similarity ranks
  std::vector<ScoredDemonstration> members;  // descending similarity (rank order)
};

struct BatchWeights {
  std::vector<double> weights;  // o_1..o_s, each in [0,1], summing to 1
};

struct BatchPrompt {
  int batch_index = 0;
  std::string text;
};

struct PromptTemplate {
  std::string demonstration_template = "Q: {q}\nA: {a}";
  std::string test_template = "Q: {test}\nA:";
  std::string separator = "\n\n";

  // TemplateError unless {q} and {a} appear in demonstration_template and
  // {test} in test_template.
  void validate() const;
};

// Descending cosine similarity between each demonstration question and the
// test question; equal similarities keep input order.
std::vector<ScoredDemonstration> sort_by_similarity(const std::vector<Demonstration>& demos,
                                                    const std::string& test_question,
                                                    EmbeddingProvider& provider);

// Batch z takes similarity ranks (z-1)m+1 .. min(zm, k); s = ceil(k/m).
std::vector<Batch> partition_batches(std::vector<ScoredDemonstration> sorted,
                                     const BatchingConfig& config);

// o_z = sum(max(sim,0) over batch z) / sum over all batches; uniform 1/s
// when every clamped similarity is zero.
BatchWeights compute_batch_weights(const std::vector<Batch>& batches);

// Demonstration blocks in the given order, then the test block, joined by
// the separator. Trailing whitespace is stripped so the prompt ends at the
// answer cue. Zero demonstrations renders just the test block.
std::string render_prompt(const std::vector<Demonstration>& demos,
                          const std::string& test_question, const PromptTemplate& tmpl);

std::vector<BatchPrompt> assemble_prompts(
    const std::vector<Batch>& batches, const std::string& test_question,
    const PromptTemplate& tmpl,
    WithinBatchOrder order = WithinBatchOrder::ascending_similarity);

}  // namespace paraicl
