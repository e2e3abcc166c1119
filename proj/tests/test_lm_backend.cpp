#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <vector>

#include "paraicl/lm_backend.hpp"
#include "paraicl/ngram.hpp"

using namespace paraicl;

TEST_CASE("bigram model learns 'a b' alternation") {
  auto model = NGramModel::train("a b a b a b", 2, 0.5);

  // vocab: a=0, b=1, </s>=2, <unk>=3
  REQUIRE(model.vocabulary().size() == 4);
  CHECK(model.vocabulary().surface(0) == "a");
  CHECK(model.vocabulary().surface(1) == "b");
  CHECK(model.vocabulary().surface(2) == NGramModel::kEosSurface);
  CHECK(model.vocabulary().surface(3) == NGramModel::kUnkSurface);

  auto dist = model.next_token_distribution({"a b a", {}, std::nullopt});
  CHECK(dist.complete());
  CHECK(dist.size() == 4);
  // context "a": 3 observed continuations, all "b" -> (3+0.5)/(3+0.5*4)
  CHECK(dist.argmax() == 1);
  CHECK(dist.prob(1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(dist.prob(0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unseen context gives the uniform smoothed distribution") {
  auto model = NGramModel::train("a b a b", 2, 0.5);
  // <unk> never appears as context in training.
  auto dist = model.next_token_distribution({"zzz", {}, std::nullopt});
  REQUIRE(dist.size() == 4);
  for (double p : dist.probs()) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("vocabulary is corpus types plus EOS and UNK") {
  auto model = NGramModel::train("x y", 2, 0.5);
  REQUIRE(model.vocabulary().size() == 4);
  CHECK(model.vocabulary().surface(0) == "x");
  CHECK(model.vocabulary().surface(1) == "y");
  CHECK(model.vocabulary().eos_id() == 2);
  CHECK(model.vocabulary().unk_id() == 3);
  CHECK(model.is_eos(2));
  CHECK_FALSE(model.is_eos(0));
}

TEST_CASE("unigram counts match the add-k formula with no line-end event") {
  // "a a b": 3 word events; an order-1 model counts no EOS targets.
  auto model = NGramModel::train("a a b", 1, 1.0);
  auto dist = model.next_token_distribution({"anything", {}, std::nullopt});
  REQUIRE(dist.size() == 4);
  CHECK(dist.prob(0) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(dist.prob(0) == doctest::Approx(0.42857142857142855).epsilon(1e-12));
  CHECK(dist.prob(1) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(dist.prob(2) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(dist.prob(3) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("line ends train an EOS continuation for order >= 2") {
  auto model = NGramModel::train("a b", 2, 0.5);
  // context "b" saw exactly one continuation: end of line.
  auto dist = model.next_token_distribution({"a b", {}, std::nullopt});
  CHECK(dist.argmax() == model.vocabulary().eos_id());
  CHECK(dist.prob(model.vocabulary().eos_id()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("retraining is deterministic and the prefix extends the context") {
  const std::string corpus = "the cat sat\nthe dog sat\nthe cat ran";
  auto m1 = NGramModel::train(corpus, 2, 0.5);
  auto m2 = NGramModel::train(corpus, 2, 0.5);

  NextTokenRequest req{"the", {}, std::nullopt};
  auto d1 = m1.next_token_distribution(req);
  auto d2 = m2.next_token_distribution(req);
  CHECK(d1.probs() == d2.probs());
  CHECK(d1.ids() == d2.ids());

  // Appending prefix ids shifts the conditioning context.
  auto cat = m1.vocabulary().find("cat");
  REQUIRE(cat.has_value());
  auto with_prefix = m1.next_token_distribution({"the", {*cat}, std::nullopt});
  auto spelled_out = m1.next_token_distribution({"the cat", {}, std::nullopt});
  CHECK(with_prefix.probs() == spelled_out.probs());

  // Every probability sits above the smoothing floor.
  const double floor =
      m1.smoothing_k() /
      (6.0 + m1.smoothing_k() * static_cast<double>(m1.vocabulary().size()));
  for (double p : d1.probs()) CHECK(p >= floor - 1e-15);
}

TEST_CASE("ngram training rejects bad input") {
  CHECK_THROWS_AS(NGramModel::train("", 2, 0.5), EmptyCorpus);
  CHECK_THROWS_AS(NGramModel::train("   \n  \n", 2, 0.5), EmptyCorpus);
  CHECK_THROWS_AS(NGramModel::train("a b", 0, 0.5), ConfigError);
  CHECK_THROWS_AS(NGramModel::train("a b", 2, 0.0), ConfigError);
  auto model = NGramModel::train("a b", 2, 0.5);
  CHECK_THROWS_AS(model.next_token_distribution({"", {}, std::nullopt}), ConfigError);
}

TEST_CASE("ngram model survives a save/load round trip") {
  auto model = NGramModel::train("the cat sat on the mat\nthe dog sat", 3, 0.25);
  auto path = std::filesystem::temp_directory_path() / "paraicl_ngram_roundtrip.json";
  model.save(path);
  auto loaded = NGramModel::load(path);
  std::filesystem::remove(path);

  CHECK(loaded.order() == model.order());
  CHECK(loaded.smoothing_k() == model.smoothing_k());
  CHECK(loaded.vocabulary().size() == model.vocabulary().size());

  for (const char* prompt : {"the", "the cat", "sat on", "never seen words"}) {
    auto a = model.next_token_distribution({prompt, {}, std::nullopt});
    auto b = loaded.next_token_distribution({prompt, {}, std::nullopt});
    CHECK(a.probs() == b.probs());
  }

  CHECK_THROWS_AS(NGramModel::load("/nonexistent/path/model.json"), IoError);
}

TEST_CASE("surface interner assigns stable first-seen ids") {
  SurfaceInterner interner;
  CHECK(interner.intern(" the") == 0);
  CHECK(interner.intern(" cat") == 1);
  CHECK(interner.intern(" the") == 0);
  CHECK(interner.size() == 2);
  CHECK(interner.surface(1) == " cat");
  CHECK(interner.find(" cat") == TokenId{1});
  CHECK_FALSE(interner.find("missing").has_value());
  CHECK_THROWS_AS(interner.surface(99), Error);
}

TEST_CASE("align fills zeros over the union support") {
  auto a = TokenDistribution::from_entries({{0, 0.6}}, false);
  auto b = TokenDistribution::from_entries({{1, 0.7}}, false);
  auto aligned = align_truncated_distributions({a, b});
  REQUIRE(aligned.size() == 2);
  CHECK(aligned[0].ids() == std::vector<TokenId>{0, 1});
  CHECK(aligned[1].ids() == std::vector<TokenId>{0, 1});
  CHECK(aligned[0].prob(0) == 0.6);
  CHECK(aligned[0].prob(1) == 0.0);
  CHECK(aligned[1].prob(0) == 0.0);
  CHECK(aligned[1].prob(1) == 0.7);
  CHECK_FALSE(aligned[0].complete());
}

TEST_CASE("align keeps identical supports unchanged") {
  auto a = TokenDistribution::from_entries({{3, 0.5}, {7, 0.5}}, true);
  auto b = TokenDistribution::from_entries({{3, 0.2}, {7, 0.8}}, true);
  auto aligned = align_truncated_distributions({a, b});
  CHECK(aligned[0].ids() == a.ids());
  CHECK(aligned[0].probs() == a.probs());
  CHECK(aligned[1].probs() == b.probs());
  CHECK(aligned[0].complete());
  CHECK(aligned[1].complete());
}

TEST_CASE("align unions overlapping supports") {
  auto a = TokenDistribution::from_entries({{0, 0.5}, {1, 0.3}}, false);
  auto b = TokenDistribution::from_entries({{0, 0.2}, {2, 0.4}}, false);
  auto aligned = align_truncated_distributions({a, b});
  for (const auto& d : aligned) {
    CHECK(d.ids() == std::vector<TokenId>{0, 1, 2});
  }
  CHECK(aligned[0].probs() == std::vector<double>{0.5, 0.3, 0.0});
  CHECK(aligned[1].probs() == std::vector<double>{0.2, 0.0, 0.4});

  CHECK_THROWS_AS(align_truncated_distributions({}), Error);
}
