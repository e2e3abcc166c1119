#pragma once

#include <string>
#include <vector>

#include "paraicl/batching.hpp"
#include "paraicl/decoder.hpp"
#include "paraicl/embedding.hpp"
#include "paraicl/lm_backend.hpp"

namespace paraicl {

enum class DecodeStrategy {
  paraicl,
  standard,
  sorted_plus,   // all demos in one prompt, ascending similarity
  sorted_minus,  // all demos in one prompt, descending similarity
  standard_average,
  majority_vote,
  paraicl_no_constraint,
  contrastive_paraicl,
};

DecodeStrategy parse_strategy(const std::string& name);  // ConfigError on unknown
std::string strategy_name(DecodeStrategy strategy);
const std::vector<std::string>& strategy_names();

// False for the single-prompt baselines (standard, sorted_plus, sorted_minus),
// whose batching configuration is irrelevant.
bool strategy_uses_batches(DecodeStrategy strategy);

struct ContrastiveConfig {
  std::vector<Demonstration> contrastive_demos;  // rendered as one extra batch
  double floor_prob = 1e-10;
};

struct StrategyRequest {
  DecodeStrategy strategy = DecodeStrategy::paraicl;
  std::vector<Demonstration> demos;  // the k demonstrations for this sample
  std::string test_question;
  BatchingConfig batching;
  GenerationConfig generation;
  PromptTemplate prompt_template;
  ContrastiveConfig contrastive;  // used by contrastive_paraicl only
};

// For the single-prompt baselines: demonstration arrangement inside the prompt.
enum class DemonstrationOrder { input, sorted_ascending, sorted_descending };

// Renders all demonstrations into one prompt in the requested order.
// sorted_* orders need the provider to compute similarities.
std::string standard_prompt(const std::vector<Demonstration>& demos,
                            const std::string& test_question, const PromptTemplate& tmpl,
                            DemonstrationOrder order, EmbeddingProvider& provider);

// Sorts and batches the demonstrations, then runs the requested decoding
// strategy. The single entry point used by the harness and the CLI.
DecodeResult run_strategy(const StrategyRequest& request, LmBackend& backend,
                          EmbeddingProvider& provider);

}  // namespace paraicl
