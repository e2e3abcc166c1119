#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <string>
#include <vector>

#include "paraicl/errors.hpp"
#include "paraicl/strategy.hpp"
#include "support/fake_embedding.hpp"
#include "support/scripted_backend.hpp"

using namespace paraicl;
using paraicl::testing::ScriptedBackend;

namespace {

// Four demonstrations with preset similarities to the test question "tq".
// Sorted: d1 (0.9), d2 (0.7), d3 (0.4), d4 (0.1); k=4, m=2 gives batches
// [d1,d2] and [d3,d4] with weights 1.6/2.1 and 0.5/2.1.
FakeEmbeddingProvider make_provider() {
  return FakeEmbeddingProvider{
      {{"d1q", 0.9}, {"d2q", 0.7}, {"d3q", 0.4}, {"d4q", 0.1}, {"cq", 0.0}}};
}

std::vector<Demonstration> make_demos() {
  return {{"d1q", "d1a"}, {"d2q", "d2a"}, {"d3q", "d3a"}, {"d4q", "d4a"}};
}

StrategyRequest make_request(DecodeStrategy strategy) {
  StrategyRequest req;
  req.strategy = strategy;
  req.demos = make_demos();
  req.test_question = "tq";
  req.batching.k = 4;
  req.batching.m = 2;
  req.generation.max_new_tokens = 1;
  return req;
}

// Within-batch ascending order puts the less similar member first.
const std::string kPrompt1 = "Q: d2q\nA: d2a\n\nQ: d1q\nA: d1a\n\nQ: tq\nA:";
const std::string kPrompt2 = "Q: d4q\nA: d4a\n\nQ: d3q\nA: d3a\n\nQ: tq\nA:";
const std::string kContrastPrompt = "Q: cq\nA: ca\n\nQ: tq\nA:";

}  // namespace

TEST_CASE("strategy names parse and print consistently") {
  REQUIRE(strategy_names().size() == 8);
  for (const std::string& name : strategy_names()) {
    CHECK(strategy_name(parse_strategy(name)) == name);
  }
  CHECK(parse_strategy("paraicl") == DecodeStrategy::paraicl);
  CHECK(parse_strategy("majority_vote") == DecodeStrategy::majority_vote);
  CHECK_THROWS_AS(parse_strategy("parallel"), ConfigError);
  CHECK_THROWS_AS(parse_strategy(""), ConfigError);
}

TEST_CASE("standard_prompt renders input, ascending and descending orders") {
  auto provider = make_provider();
  auto demos = make_demos();
  PromptTemplate tmpl;

  CHECK(standard_prompt(demos, "tq", tmpl, DemonstrationOrder::input, provider) ==
        "Q: d1q\nA: d1a\n\nQ: d2q\nA: d2a\n\nQ: d3q\nA: d3a\n\nQ: d4q\nA: d4a\n\n"
        "Q: tq\nA:");

  const std::string ascending = standard_prompt(
      demos, "tq", tmpl, DemonstrationOrder::sorted_ascending, provider);
  const std::string descending = standard_prompt(
      demos, "tq", tmpl, DemonstrationOrder::sorted_descending, provider);
  CHECK(ascending ==
        "Q: d4q\nA: d4a\n\nQ: d3q\nA: d3a\n\nQ: d2q\nA: d2a\n\nQ: d1q\nA: d1a\n\n"
        "Q: tq\nA:");
  CHECK(descending ==
        "Q: d1q\nA: d1a\n\nQ: d2q\nA: d2a\n\nQ: d3q\nA: d3a\n\nQ: d4q\nA: d4a\n\n"
        "Q: tq\nA:");
}

TEST_CASE("run_strategy routes the batch strategies through sorted batch prompts") {
  auto provider = make_provider();
  ScriptedBackend lm({"X", "Y", "<eos>"}, "<eos>");
  lm.script(kPrompt1, 0, lm.dist({{"X", 0.6}, {"Y", 0.4}}, true));
  lm.script(kPrompt2, 0, lm.dist({{"X", 0.2}, {"Y", 0.5}}, false));

  // Weighted average: X scores 0.505, Y 0.424; the uniform average flips to
  // Y (0.45 vs 0.40); majority votes tie 1:1 and Y's sum 0.9 beats X's 0.8.
  CHECK(run_strategy(make_request(DecodeStrategy::paraicl), lm, provider).text == "X");
  CHECK(run_strategy(make_request(DecodeStrategy::standard_average), lm, provider).text ==
        "Y");
  CHECK(run_strategy(make_request(DecodeStrategy::majority_vote), lm, provider).text ==
        "Y");
}

TEST_CASE("run_strategy: the no-constraint variant widens the candidate set") {
  auto provider = make_provider();
  ScriptedBackend lm({"X", "Y", "<eos>"}, "<eos>");
  lm.script(kPrompt1, 0, lm.dist({{"X", 0.4}, {"Y", 0.15}}, false));
  lm.script(kPrompt2, 0, lm.dist({{"Y", 0.9}}, false));

  // alpha=0.5 keeps only X in the head (0.15 < 0.2); without the constraint
  // Y's average 0.329 beats X's 0.305.
  auto constrained = make_request(DecodeStrategy::paraicl);
  constrained.generation.alpha = 0.5;
  CHECK(run_strategy(constrained, lm, provider).text == "X");

  auto open = make_request(DecodeStrategy::paraicl_no_constraint);
  open.generation.alpha = 0.5;
  CHECK(run_strategy(open, lm, provider).text == "Y");
}

TEST_CASE("run_strategy renders one prompt for the single-prompt baselines") {
  auto provider = make_provider();
  ScriptedBackend lm({"I", "P", "M", "<eos>"}, "<eos>");
  const std::string input_prompt =
      "Q: d1q\nA: d1a\n\nQ: d2q\nA: d2a\n\nQ: d3q\nA: d3a\n\nQ: d4q\nA: d4a\n\nQ: tq\nA:";
  const std::string ascending_prompt =
      "Q: d4q\nA: d4a\n\nQ: d3q\nA: d3a\n\nQ: d2q\nA: d2a\n\nQ: d1q\nA: d1a\n\nQ: tq\nA:";
  lm.script(input_prompt, 0, lm.dist({{"I", 1.0}}, false));
  lm.script(ascending_prompt, 0, lm.dist({{"P", 1.0}}, false));

  CHECK(run_strategy(make_request(DecodeStrategy::standard), lm, provider).text == "I");
  CHECK(run_strategy(make_request(DecodeStrategy::sorted_plus), lm, provider).text == "P");
  // Descending order coincides with the input order of this fixture.
  CHECK(run_strategy(make_request(DecodeStrategy::sorted_minus), lm, provider).text ==
        "I");
}

TEST_CASE("run_strategy wires the contrastive batch through the same template") {
  auto provider = make_provider();
  ScriptedBackend lm({"X", "Y", "<eos>"}, "<eos>");
  lm.script(kPrompt1, 0, lm.dist({{"X", 0.6}, {"Y", 0.4}}, true));
  lm.script(kPrompt2, 0, lm.dist({{"X", 0.2}, {"Y", 0.5}}, false));
  lm.script(kContrastPrompt, 0, lm.dist({{"X", 0.9}, {"Y", 0.05}}, false));

  auto req = make_request(DecodeStrategy::contrastive_paraicl);
  req.contrastive.contrastive_demos = {{"cq", "ca"}};
  // log(0.505/0.9) < 0 < log(0.424/0.05): the contrastive prompt's preference
  // for X flips the plain weighted-average decision.
  CHECK(run_strategy(req, lm, provider).text == "Y");

  auto missing = make_request(DecodeStrategy::contrastive_paraicl);
  CHECK_THROWS_AS(run_strategy(missing, lm, provider), ConfigError);
}

TEST_CASE("run_strategy validates configuration upfront") {
  auto provider = make_provider();
  ScriptedBackend lm({"X", "<eos>"}, "<eos>");

  auto bad_alpha = make_request(DecodeStrategy::paraicl);
  bad_alpha.generation.alpha = 1.5;
  CHECK_THROWS_AS(run_strategy(bad_alpha, lm, provider), ConfigError);

  auto wrong_k = make_request(DecodeStrategy::paraicl);
  wrong_k.batching.k = 3;  // four demos supplied
  CHECK_THROWS_AS(run_strategy(wrong_k, lm, provider), ConfigError);

  auto bad_template = make_request(DecodeStrategy::paraicl);
  bad_template.prompt_template.test_template = "no placeholder";
  CHECK_THROWS_AS(run_strategy(bad_template, lm, provider), TemplateError);

  auto strict = make_request(DecodeStrategy::paraicl);
  strict.batching.m = 3;
  strict.batching.strict_divisibility = true;
  CHECK_THROWS_AS(run_strategy(strict, lm, provider), ConfigError);
}

TEST_CASE("run_strategy with a ragged tail batch still decodes") {
  auto provider = make_provider();
  ScriptedBackend lm({"X", "Y", "<eos>"}, "<eos>");
  // m=3: batch 1 = [d1,d2,d3], batch 2 = [d4] (the leftover).
  const std::string p1 = "Q: d3q\nA: d3a\n\nQ: d2q\nA: d2a\n\nQ: d1q\nA: d1a\n\nQ: tq\nA:";
  const std::string p2 = "Q: d4q\nA: d4a\n\nQ: tq\nA:";
  lm.script(p1, 0, lm.dist({{"X", 0.8}, {"Y", 0.2}}, true));
  lm.script(p2, 0, lm.dist({{"X", 0.5}, {"Y", 0.5}}, true));

  auto req = make_request(DecodeStrategy::paraicl);
  req.batching.m = 3;
  CHECK(run_strategy(req, lm, provider).text == "X");
}
