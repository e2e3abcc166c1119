#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "paraicl/batching.hpp"
#include "paraicl/kernels.hpp"
#include "support/fake_embedding.hpp"
#include "support/test_paths.hpp"

using namespace paraicl;

namespace {

std::vector<ScoredDemonstration> scored_from(const std::vector<double>& sims) {
  std::vector<ScoredDemonstration> out;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    out.push_back({{"q" + std::to_string(i), "a" + std::to_string(i)}, sims[i]});
  }
  return out;
}

BatchingConfig config_for(int k, int m) {
  BatchingConfig cfg;
  cfg.k = k;
  cfg.m = m;
  return cfg;
}

}  // namespace

TEST_CASE("sort_by_similarity orders descending with stable ties") {
  FakeEmbeddingProvider provider({{"first", 0.2}, {"second", 0.9}, {"third", 0.5}});
  std::vector<Demonstration> demos = {
      {"first", "a1"}, {"second", "a2"}, {"third", "a3"}};

  auto sorted = sort_by_similarity(demos, "the test question", provider);
  REQUIRE(sorted.size() == 3);
  CHECK(sorted[0].demo.question == "second");
  CHECK(sorted[1].demo.question == "third");
  CHECK(sorted[2].demo.question == "first");
  CHECK(sorted[0].similarity == doctest::Approx(0.9));
  CHECK(sorted[1].similarity == doctest::Approx(0.5));
  CHECK(sorted[2].similarity == doctest::Approx(0.2));

  // Single demonstration maps to itself.
  auto single = sort_by_similarity({{"first", "a1"}}, "q", provider);
  REQUIRE(single.size() == 1);
  CHECK(single[0].demo.question == "first");

  // Identical question text gives equal similarity; input order survives.
  std::vector<Demonstration> twins = {{"first", "original"}, {"first", "copy"}};
  auto tied = sort_by_similarity(twins, "q", provider);
  CHECK(tied[0].demo.answer == "original");
  CHECK(tied[1].demo.answer == "copy");

  CHECK_THROWS_AS(sort_by_similarity({}, "q", provider), ConfigError);
}

TEST_CASE("sort_by_similarity output is a permutation with non-increasing similarity") {
  std::map<std::string, double> sims;
  std::vector<Demonstration> demos;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    std::string q = "question " + std::to_string(i);
    sims[q] = dist(gen);
    demos.push_back({q, "answer"});
  }
  FakeEmbeddingProvider provider(sims);
  auto sorted = sort_by_similarity(demos, "test", provider);
  REQUIRE(sorted.size() == demos.size());
  std::multiset<std::string> in, out;
  for (const auto& d : demos) in.insert(d.question);
  for (const auto& s : sorted) out.insert(s.demo.question);
  CHECK(in == out);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    CHECK(sorted[i - 1].similarity >= sorted[i].similarity);
  }
}

TEST_CASE("partition_batches splits rank ranges") {
  auto six = partition_batches(scored_from({0.9, 0.8, 0.7, 0.6, 0.5, 0.4}), config_for(6, 2));
  REQUIRE(six.size() == 3);
  for (int z = 0; z < 3; ++z) {
    CHECK(six[z].index == z + 1);
    REQUIRE(six[z].members.size() == 2);
  }
  CHECK(six[0].members[0].demo.question == "q0");
  CHECK(six[0].members[1].demo.question == "q1");
  CHECK(six[2].members[1].demo.question == "q5");

  auto ragged = partition_batches(scored_from({7, 6, 5, 4, 3, 2, 1}), config_for(7, 3));
  REQUIRE(ragged.size() == 3);
  CHECK(ragged[0].members.size() == 3);
  CHECK(ragged[1].members.size() == 3);
  CHECK(ragged[2].members.size() == 1);
  CHECK(ragged[2].members[0].similarity == 1.0);  // lowest-similarity leftover

  auto whole = partition_batches(scored_from({3, 2, 1}), config_for(3, 3));
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].members.size() == 3);
}

TEST_CASE("partition_batches is a bijection over its input") {
  auto sorted = scored_from({10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0});
  auto batches = partition_batches(sorted, config_for(11, 4));
  std::multiset<std::string> seen;
  for (const auto& b : batches) {
    for (const auto& m : b.members) seen.insert(m.demo.question);
  }
  CHECK(seen.size() == sorted.size());
  std::multiset<std::string> expected;
  for (const auto& s : sorted) expected.insert(s.demo.question);
  CHECK(seen == expected);
}

TEST_CASE("batching config validation") {
  CHECK_THROWS_AS(config_for(0, 1).validate(), ConfigError);
  CHECK_THROWS_AS(config_for(4, 0).validate(), ConfigError);
  CHECK_THROWS_AS(config_for(2, 3).validate(), ConfigError);
  CHECK_NOTHROW(config_for(6, 2).validate());

  BatchingConfig strict = config_for(7, 3);
  strict.strict_divisibility = true;
  CHECK_THROWS_AS(strict.validate(), ConfigError);
  strict.k = 9;
  CHECK_NOTHROW(strict.validate());

  CHECK_THROWS_AS(partition_batches(scored_from({1, 2}), config_for(3, 1)), ConfigError);
}

TEST_CASE("compute_batch_weights normalizes clamped similarity mass") {
  auto batches = partition_batches(scored_from({0.9, 0.7, 0.5, 0.3}), config_for(4, 2));
  auto w = compute_batch_weights(batches);
  REQUIRE(w.weights.size() == 2);
  CHECK(w.weights[0] == doctest::Approx(0.6666666666666667).epsilon(1e-12));
  CHECK(w.weights[1] == doctest::Approx(0.33333333333333337).epsilon(1e-12));

  auto equal = compute_batch_weights(partition_batches(
      scored_from({0.4, 0.4, 0.4, 0.4, 0.4, 0.4}), config_for(6, 2)));
  for (double o : equal.weights) CHECK(o == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto clamped = compute_batch_weights(
      partition_batches(scored_from({0.5, -0.2}), config_for(2, 1)));
  CHECK(clamped.weights[0] == doctest::Approx(1.0));
  CHECK(clamped.weights[1] == doctest::Approx(0.0));

  auto fallback = compute_batch_weights(
      partition_batches(scored_from({-0.3, -0.1, -0.9, -0.5}), config_for(4, 2)));
  CHECK(fallback.weights[0] == doctest::Approx(0.5));
  CHECK(fallback.weights[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(compute_batch_weights({}), ConfigError);
}

TEST_CASE("batch weights: normalization, scale invariance, ordering") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> sim_dist(0.0, 1.0);
  std::uniform_int_distribution<int> k_dist(1, 32);

  for (int trial = 0; trial < 200; ++trial) {
    const int k = k_dist(gen);
    const int m = std::uniform_int_distribution<int>(1, k)(gen);
    std::vector<double> sims(static_cast<std::size_t>(k));
    for (double& s : sims) s = sim_dist(gen);
    std::sort(sims.rbegin(), sims.rend());

    auto batches = partition_batches(scored_from(sims), config_for(k, m));
    auto w = compute_batch_weights(batches);
    CHECK(kernels::sum(w.weights) == doctest::Approx(1.0).epsilon(1e-9));
    for (double o : w.weights) {
      CHECK(o >= 0.0);
      CHECK(o <= 1.0 + 1e-12);
    }

    for (double c : {1e-3, 1e3}) {
      std::vector<double> scaled = sims;
      for (double& s : scaled) s *= c;
      auto ws = compute_batch_weights(partition_batches(scored_from(scaled), config_for(k, m)));
      for (std::size_t z = 0; z < w.weights.size(); ++z) {
        CHECK(ws.weights[z] == doctest::Approx(w.weights[z]).epsilon(1e-9));
      }
    }

    // Batch 1 holds the top-m similarities, so weights are non-increasing
    // whenever batches are equal-sized.
    if (k % m == 0) {
      for (std::size_t z = 1; z < w.weights.size(); ++z) {
        CHECK(w.weights[z - 1] >= w.weights[z] - 1e-12);
      }
    }
  }
}

TEST_CASE("render_prompt substitutes the template") {
  PromptTemplate tmpl;
  std::vector<Demonstration> demos = {{"What is 2+2?", "4"}};
  CHECK(render_prompt(demos, "What is 5+5?", tmpl) ==
        "Q: What is 2+2?\nA: 4\n\nQ: What is 5+5?\nA:");

  CHECK(render_prompt({}, "Only the question", tmpl) == "Q: Only the question\nA:");

  std::vector<Demonstration> two = {{"qa", "aa"}, {"qb", "ab"}};
  CHECK(render_prompt(two, "t", tmpl) == "Q: qa\nA: aa\n\nQ: qb\nA: ab\n\nQ: t\nA:");
}

TEST_CASE("render_prompt strips trailing whitespace after the answer cue") {
  PromptTemplate tmpl;
  tmpl.test_template = "Q: {test}\nA: ";
  auto prompt = render_prompt({}, "x", tmpl);
  CHECK(prompt == "Q: x\nA:");
}

TEST_CASE("templates without placeholders are rejected") {
  PromptTemplate missing_a;
  missing_a.demonstration_template = "Q: {q}";
  CHECK_THROWS_AS(missing_a.validate(), TemplateError);

  PromptTemplate missing_test;
  missing_test.test_template = "Answer:";
  CHECK_THROWS_AS(missing_test.validate(), TemplateError);

  PromptTemplate none;
  none.demonstration_template = "no placeholders";
  none.test_template = "still none";
  CHECK_THROWS_AS(render_prompt({}, "x", none), TemplateError);
}

TEST_CASE("assemble_prompts renders ascending similarity by default") {
  auto batches = partition_batches(scored_from({0.9, 0.5}), config_for(2, 2));
  PromptTemplate tmpl;

  auto ascending = assemble_prompts(batches, "test?", tmpl);
  REQUIRE(ascending.size() == 1);
  CHECK(ascending[0].batch_index == 1);
  // Most similar demonstration (q0) rendered last, adjacent to the question.
  CHECK(ascending[0].text == "Q: q1\nA: a1\n\nQ: q0\nA: a0\n\nQ: test?\nA:");

  auto descending =
      assemble_prompts(batches, "test?", tmpl, WithinBatchOrder::descending_similarity);
  CHECK(descending[0].text == "Q: q0\nA: a0\n\nQ: q1\nA: a1\n\nQ: test?\nA:");
}

TEST_CASE("rendered prompt matches the pinned golden file") {
  std::ifstream in(test_data_dir() / "golden_prompt.txt");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string golden = buf.str();
  // The golden file is a POSIX text file; drop its final newline.
  REQUIRE(!golden.empty());
  REQUIRE(golden.back() == '\n');
  golden.pop_back();

  auto batches =
      partition_batches({{{"What is 2+2?", "4"}, 0.9}, {{"What is 3+3?", "6"}, 0.4}},
                        config_for(2, 2));
  auto prompts = assemble_prompts(batches, "What is 5+5?", PromptTemplate{});
  REQUIRE(prompts.size() == 1);
  CHECK(prompts[0].text == golden);
}
