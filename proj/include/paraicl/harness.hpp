#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "paraicl/batching.hpp"
#include "paraicl/embedding.hpp"
#include "paraicl/lm_backend.hpp"
#include "paraicl/openai_client.hpp"
#include "paraicl/strategy.hpp"
#include "paraicl/types.hpp"

namespace paraicl {

enum class AnswerMode { gsm8k_hash, option_letter, exact, raw };

AnswerMode parse_answer_mode(const std::string& name);  // ConfigError on unknown
std::string answer_mode_name(AnswerMode mode);

// JSONL, one object per line: {"question": ..., "answer": ...} for
// demonstrations; tests take an optional "answer" and optional "id"
// (defaulting to the line number). Order preserving.
std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path);
std::vector<TestSample> load_testset(const std::filesystem::path& path);

/**
 * Draws k distinct demonstrations with a pinned PRNG so a seed means the same
 * selection everywhere: std::mt19937_64 seeded directly, k steps of a partial
 * Fisher-Yates shuffle, each pick at index gen() % remaining. Throws
 * PoolTooSmall when the pool has fewer than k items.
 */
std::vector<Demonstration> sample_demonstrations(const std::vector<Demonstration>& pool,
                                                 int k, std::uint64_t seed);

// gsm8k_hash: substring after the last "####", trimmed, commas stripped;
// option_letter: first standalone A-E; exact: trimmed continuation; raw:
// unmodified. Throws NoAnswerFound for the first two when nothing matches.
std::string extract_answer(const std::string& continuation, AnswerMode mode);

// Numeric comparison when both sides parse fully as numbers, otherwise
// case-insensitive equality with whitespace runs collapsed.
bool score_exact_match(const std::string& extracted, const std::string& gold);

struct BackendDescriptor {
  enum class Kind { ngram, openai_compat };

  Kind kind = Kind::ngram;
  // ngram: load a saved model, or train one from a corpus.
  std::string ngram_model_path;
  std::string ngram_corpus_path;
  int ngram_order = 2;
  double ngram_smoothing_k = 0.5;
  // openai_compat
  OpenAiConfig openai;

  // ngram needs a model or corpus path; openai_compat needs an endpoint.
  void validate() const;
};

std::unique_ptr<LmBackend> make_backend(const BackendDescriptor& descriptor);

struct RunConfig {
  DecodeStrategy strategy = DecodeStrategy::paraicl;
  BatchingConfig batching;
  GenerationConfig generation;
  BackendDescriptor backend;
  EmbeddingProviderConfig embedding;
  PromptTemplate prompt_template;
  std::vector<std::uint64_t> seeds = {1};
  std::string demo_path;
  std::string test_path;
  std::string output_path;
  AnswerMode answer_mode = AnswerMode::exact;
  int parallelism = 1;  // concurrent samples within a seed
  std::string contrastive_path;  // demonstrations for contrastive_paraicl
  double contrastive_floor = 1e-10;

  void validate() const;
};

// key = value lines, '#' comments, dotted keys for nesting (embedding.*,
// backend.*, template.*). Unknown keys raise ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
// One assignment, shared by the config file and CLI overrides.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);
// Decodes the \n, \t and \\ escapes used in config values; other backslash
// pairs pass through verbatim.
std::string unescape_config_value(const std::string& text);

struct SampleResult {
  std::string sample_id;
  std::string strategy;
  std::uint64_t seed = 0;
  std::string continuation;
  std::optional<std::string> extracted_answer;
  std::optional<bool> correct;  // absent without a gold answer or in raw mode
  int step_count = 0;
  double wall_time_ms = 0.0;
  std::optional<std::string> error;  // backend failure, sample skipped
};

struct RunSummary {
  int samples = 0;
  int failures = 0;
  std::vector<double> per_seed_accuracy;  // seeds with scored samples only
  std::optional<double> accuracy_mean;
  std::optional<double> accuracy_stddev;  // population stddev across seeds
  double wall_time_ms_total = 0.0;
};

struct RunResult {
  std::vector<SampleResult> samples;
  RunSummary summary;
};

// Recomputes the summary statistics from the sample records.
RunSummary summarize(const std::vector<SampleResult>& samples);

std::string sample_result_to_json(const SampleResult& result);
SampleResult sample_result_from_json(const std::string& line);

/**
 * Runs every seed x test sample job in a deterministic order (seeds in config
 * order, samples in file order), streaming one JSONL record per job to
 * output_path and a summary object last. Jobs whose (sample_id, seed,
 * strategy) key already has a clean record in an existing output file are
 * reused, not recomputed; failed records are retried. Backend failures are
 * recorded per sample and counted, never fatal.
 */
RunResult run_eval(const RunConfig& config);

// Rewrites path with one record per sample and the summary line last.
void write_results(const RunResult& result, const RunConfig& config,
                   const std::filesystem::path& path);

}  // namespace paraicl
