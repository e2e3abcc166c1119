#include "paraicl/strategy.hpp"

#include <algorithm>
#include <utility>

#include "paraicl/errors.hpp"

namespace paraicl {

namespace {

constexpr std::pair<DecodeStrategy, const char*> kStrategyTable[] = {
    {DecodeStrategy::paraicl, "paraicl"},
    {DecodeStrategy::standard, "standard"},
    {DecodeStrategy::sorted_plus, "sorted_plus"},
    {DecodeStrategy::sorted_minus, "sorted_minus"},
    {DecodeStrategy::standard_average, "standard_average"},
    {DecodeStrategy::majority_vote, "majority_vote"},
    {DecodeStrategy::paraicl_no_constraint, "paraicl_no_constraint"},
    {DecodeStrategy::contrastive_paraicl, "contrastive_paraicl"},
};

}  // namespace

bool strategy_uses_batches(DecodeStrategy strategy) {
  switch (strategy) {
    case DecodeStrategy::standard:
    case DecodeStrategy::sorted_plus:
    case DecodeStrategy::sorted_minus:
      return false;
    default:
      return true;
  }
}

DecodeStrategy parse_strategy(const std::string& name) {
  for (const auto& [strategy, tag] : kStrategyTable) {
    if (name == tag) return strategy;
  }
  std::string known;
  for (const auto& entry : kStrategyTable) {
    if (!known.empty()) known += ", ";
    known += entry.second;
  }
  throw ConfigError("unknown strategy '" + name + "' (known: " + known + ")");
}

std::string strategy_name(DecodeStrategy strategy) {
  for (const auto& [candidate, tag] : kStrategyTable) {
    if (candidate == strategy) return tag;
  }
  throw ConfigError("unnamed strategy value");
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : kStrategyTable) out.emplace_back(entry.second);
    return out;
  }();
  return names;
}

std::string standard_prompt(const std::vector<Demonstration>& demos,
                            const std::string& test_question, const PromptTemplate& tmpl,
                            DemonstrationOrder order, EmbeddingProvider& provider) {
  if (order == DemonstrationOrder::input) {
    return render_prompt(demos, test_question, tmpl);
  }
  std::vector<ScoredDemonstration> sorted = sort_by_similarity(demos, test_question, provider);
  std::vector<Demonstration> arranged;
  arranged.reserve(sorted.size());
  for (const auto& scored : sorted) arranged.push_back(scored.demo);
  // sort_by_similarity is descending; ascending puts the most similar
  // demonstration adjacent to the test question.
  if (order == DemonstrationOrder::sorted_ascending) {
    std::reverse(arranged.begin(), arranged.end());
  }
  return render_prompt(arranged, test_question, tmpl);
}

DecodeResult run_strategy(const StrategyRequest& request, LmBackend& backend,
                          EmbeddingProvider& provider) {
  request.generation.validate();
  request.prompt_template.validate();

  if (!strategy_uses_batches(request.strategy)) {
    DemonstrationOrder order = DemonstrationOrder::input;
    if (request.strategy == DecodeStrategy::sorted_plus) {
      order = DemonstrationOrder::sorted_ascending;
    } else if (request.strategy == DecodeStrategy::sorted_minus) {
      order = DemonstrationOrder::sorted_descending;
    }
    std::string prompt = standard_prompt(request.demos, request.test_question,
                                         request.prompt_template, order, provider);
    return decode_standard(prompt, backend, request.generation);
  }

  request.batching.validate();
  std::vector<ScoredDemonstration> sorted =
      sort_by_similarity(request.demos, request.test_question, provider);
  std::vector<Batch> batches = partition_batches(std::move(sorted), request.batching);
  std::vector<BatchPrompt> prompts =
      assemble_prompts(batches, request.test_question, request.prompt_template,
                       request.batching.within_batch_order);
  BatchWeights weights = compute_batch_weights(batches);

  switch (request.strategy) {
    case DecodeStrategy::paraicl:
      return decode_paraicl(prompts, weights, backend, request.generation);
    case DecodeStrategy::paraicl_no_constraint: {
      GenerationConfig config = request.generation;
      config.use_plausibility_constraint = false;
      return decode_paraicl(prompts, weights, backend, config);
    }
    case DecodeStrategy::standard_average:
      return decode_standard_average(prompts, backend, request.generation);
    case DecodeStrategy::majority_vote:
      return decode_majority_vote(prompts, backend, request.generation);
    case DecodeStrategy::contrastive_paraicl: {
      if (request.contrastive.contrastive_demos.empty()) {
        throw ConfigError("contrastive_paraicl needs contrastive demonstrations");
      }
      // The contrastive demonstrations form one extra prompt rendered with
      // the same template, in the order given.
      BatchPrompt contrast{1, render_prompt(request.contrastive.contrastive_demos,
                                            request.test_question, request.prompt_template)};
      return decode_contrastive_paraicl(prompts, weights, {contrast}, backend,
                                        request.generation, request.contrastive.floor_prob);
    }
    default:
      throw ConfigError("unhandled strategy");
  }
}

}  // namespace paraicl
