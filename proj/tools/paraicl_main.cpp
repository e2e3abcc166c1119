// Command-line front end: one-off decoding, dataset evaluation, batch-count
// sweeps, and n-gram model training.
//
// Exit codes: 0 success, 1 configuration error, 2 backend failure,
// 3 partial (an eval completed but some samples failed).

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "paraicl/decoder.hpp"
#include "paraicl/embedding.hpp"
#include "paraicl/errors.hpp"
#include "paraicl/harness.hpp"
#include "paraicl/ngram.hpp"
#include "paraicl/strategy.hpp"
#include "paraicl/trace.hpp"

namespace {

using namespace paraicl;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBackend = 2;
constexpr int kExitPartial = 3;

int exit_code_for(const Error& e) {
  if (dynamic_cast<const RemoteUnavailable*>(&e) != nullptr ||
      dynamic_cast<const MalformedResponse*>(&e) != nullptr ||
      dynamic_cast<const AuthError*>(&e) != nullptr ||
      dynamic_cast<const ContextTooLong*>(&e) != nullptr ||
      dynamic_cast<const BudgetExceeded*>(&e) != nullptr) {
    return kExitBackend;
  }
  return kExitConfig;
}

// Failure accounting shared by eval and sweep: every sample failing means the
// backend was effectively down; a strict subset failing is a partial run.
int exit_code_for(const RunSummary& summary) {
  if (summary.failures == 0) return kExitOk;
  if (summary.failures == summary.samples) return kExitBackend;
  return kExitPartial;
}

void print_summary(const RunSummary& summary, const std::string& output_path) {
  std::ostringstream line;
  line << "samples " << summary.samples << ", failures " << summary.failures;
  if (summary.accuracy_mean.has_value()) {
    line << std::fixed << std::setprecision(4) << ", accuracy "
         << *summary.accuracy_mean;
    if (summary.accuracy_stddev.has_value()) {
      line << " +/- " << *summary.accuracy_stddev;
    }
    line << " over " << summary.per_seed_accuracy.size() << " seed(s)";
  }
  line << ", wall time " << std::fixed << std::setprecision(0)
       << summary.wall_time_ms_total << " ms";
  std::cout << line.str() << "\n" << "results written to " << output_path << "\n";
}

struct DecodeCli {
  std::string demos_path;
  std::string question;
  std::string strategy = "paraicl";
  int k = 0;  // 0: use the whole pool
  int m = 0;  // 0: one batch holding all k demonstrations
  double alpha = 0.1;
  std::string backend = "ngram";
  int max_new_tokens = 64;
  std::string trace_path;
  std::uint64_t seed = 1;
  std::vector<std::string> stop_sequences;
  std::string contrastive_path;
  int embedding_dim = 1024;
  std::string ngram_model;
  std::string ngram_corpus;
  int ngram_order = 2;
  double ngram_smoothing = 0.5;
  std::string endpoint;
  std::string model;
  int max_top_k = 5;
  std::string template_demo;
  std::string template_test;
  std::string template_separator;
};

int run_decode(const DecodeCli& cli) {
  const std::vector<Demonstration> pool = load_demonstrations(cli.demos_path);
  const int k = cli.k > 0 ? cli.k : static_cast<int>(pool.size());

  StrategyRequest request;
  request.strategy = parse_strategy(cli.strategy);
  request.demos = sample_demonstrations(pool, k, cli.seed);
  request.test_question = cli.question;
  request.batching.k = k;
  request.batching.m = cli.m > 0 ? cli.m : k;
  request.generation.alpha = cli.alpha;
  request.generation.max_new_tokens = cli.max_new_tokens;
  for (const std::string& stop : cli.stop_sequences) {
    request.generation.stop_sequences.push_back(unescape_config_value(stop));
  }
  if (!cli.template_demo.empty()) {
    request.prompt_template.demonstration_template = unescape_config_value(cli.template_demo);
  }
  if (!cli.template_test.empty()) {
    request.prompt_template.test_template = unescape_config_value(cli.template_test);
  }
  if (!cli.template_separator.empty()) {
    request.prompt_template.separator = unescape_config_value(cli.template_separator);
  }
  if (!cli.contrastive_path.empty()) {
    request.contrastive.contrastive_demos = load_demonstrations(cli.contrastive_path);
  }

  BackendDescriptor descriptor;
  if (cli.backend == "openai") {
    descriptor.kind = BackendDescriptor::Kind::openai_compat;
    descriptor.openai.endpoint = cli.endpoint;
    descriptor.openai.model = cli.model;
    descriptor.openai.max_top_k = cli.max_top_k;
  } else {
    descriptor.ngram_model_path = cli.ngram_model;
    descriptor.ngram_corpus_path = cli.ngram_corpus;
    descriptor.ngram_order = cli.ngram_order;
    descriptor.ngram_smoothing_k = cli.ngram_smoothing;
  }
  descriptor.validate();
  const std::unique_ptr<LmBackend> backend = make_backend(descriptor);

  EmbeddingProviderConfig embedding;
  embedding.dim = static_cast<std::size_t>(cli.embedding_dim);
  const std::shared_ptr<EmbeddingProvider> provider = make_embedding_provider(embedding);

  const DecodeResult result = run_strategy(request, *backend, *provider);

  if (!cli.trace_path.empty()) {
    std::ofstream trace(cli.trace_path, std::ios::trunc);
    trace << trace_to_json(result.trace) << "\n";
    if (!trace) throw IoError("cannot write trace file: " + cli.trace_path);
  }
  std::cout << result.text << "\n";
  return kExitOk;
}

struct EvalCli {
  std::string config_path;
  // Flag overrides, applied to the file config in this order. Values are kept
  // as strings so apply_config_entry does all parsing and validation.
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_option(CLI::App* cmd, EvalCli& cli, const std::string& flag,
                         const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&cli, key](const std::string& value) { cli.overrides.emplace_back(key, value); },
      help);
}

// include_batch_flags is false for sweep, which owns k and m itself.
void add_eval_overrides(CLI::App* cmd, EvalCli& cli, bool include_batch_flags = true) {
  add_override_option(cmd, cli, "--strategy", "strategy", "Decoding strategy");
  if (include_batch_flags) {
    add_override_option(cmd, cli, "--k", "k", "Demonstrations per sample");
    add_override_option(cmd, cli, "--m", "m", "Demonstrations per batch");
  }
  add_override_option(cmd, cli, "--alpha", "alpha", "Plausibility threshold ratio");
  add_override_option(cmd, cli, "--max-new-tokens", "max_new_tokens",
                      "Generation length cap");
  add_override_option(cmd, cli, "--seeds", "seeds", "Comma-separated sampling seeds");
  add_override_option(cmd, cli, "--demos", "demo_path", "Demonstration pool JSONL");
  add_override_option(cmd, cli, "--tests", "test_path", "Test set JSONL");
  add_override_option(cmd, cli, "--output", "output_path", "Results JSONL path");
  add_override_option(cmd, cli, "--answer-mode", "answer_mode",
                      "gsm8k_hash, option_letter, exact or raw");
  add_override_option(cmd, cli, "--parallelism", "parallelism",
                      "Concurrent samples per seed");
  cmd->add_option_function<std::vector<std::string>>(
      "--set",
      [&cli](const std::vector<std::string>& entries) {
        for (const std::string& entry : entries) {
          const std::size_t eq = entry.find('=');
          if (eq == std::string::npos) {
            throw CLI::ValidationError("--set", "expected key=value, got '" + entry + "'");
          }
          cli.overrides.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
        }
      },
      "Any config-file key, as key=value (repeatable)");
}

RunConfig build_eval_config(const EvalCli& cli) {
  RunConfig config = load_run_config(cli.config_path);
  for (const auto& [key, value] : cli.overrides) {
    apply_config_entry(config, key, value);
  }
  return config;
}

int run_eval_cmd(const EvalCli& cli) {
  const RunConfig config = build_eval_config(cli);
  const RunResult result = run_eval(config);
  print_summary(result.summary, config.output_path);
  return exit_code_for(result.summary);
}

struct SweepCli {
  EvalCli eval;
  int m = 0;
  std::string batches_list = "1,2,3,5,8";
};

// out.jsonl -> out.s3.jsonl for a 3-batch run.
std::string sweep_output_path(const std::string& base, int batches) {
  const std::filesystem::path path(base);
  std::filesystem::path renamed = path.parent_path() / path.stem();
  renamed += ".s" + std::to_string(batches);
  renamed += path.extension();
  return renamed.string();
}

int run_sweep(const SweepCli& cli) {
  std::vector<int> batch_counts;
  std::stringstream list(cli.batches_list);
  std::string item;
  while (std::getline(list, item, ',')) {
    try {
      std::size_t used = 0;
      const int s = std::stoi(item, &used);
      if (used != item.size() || s < 1) throw std::invalid_argument(item);
      batch_counts.push_back(s);
    } catch (const std::exception&) {
      throw ConfigError("--batches-list expects positive integers, got '" + item + "'");
    }
  }
  if (batch_counts.empty()) throw ConfigError("--batches-list is empty");

  const RunConfig base = build_eval_config(cli.eval);
  std::size_t samples_total = 0;
  std::size_t failures_total = 0;
  for (const int s : batch_counts) {
    RunConfig config = base;
    config.batching.m = cli.m;
    config.batching.k = cli.m * s;
    config.output_path = sweep_output_path(base.output_path, s);

    const RunResult result = run_eval(config);
    samples_total += result.summary.samples;
    failures_total += result.summary.failures;

    std::ostringstream line;
    line << "batches " << s << " (k=" << config.batching.k << "): ";
    if (result.summary.accuracy_mean.has_value()) {
      line << std::fixed << std::setprecision(4) << "accuracy "
           << *result.summary.accuracy_mean;
      if (result.summary.accuracy_stddev.has_value()) {
        line << " +/- " << *result.summary.accuracy_stddev;
      }
    } else {
      line << "no scored samples";
    }
    line << ", failures " << result.summary.failures << ", results "
         << config.output_path;
    std::cout << line.str() << "\n";
  }

  RunSummary total;
  total.samples = samples_total;
  total.failures = failures_total;
  return exit_code_for(total);
}

struct TrainCli {
  std::string corpus_path;
  int order = 2;
  double smoothing = 0.5;
  std::string out_path;
};

int run_train(const TrainCli& cli) {
  std::ifstream in(cli.corpus_path);
  if (!in) throw IoError("cannot read corpus: " + cli.corpus_path);
  std::stringstream text;
  text << in.rdbuf();

  const NGramModel model = NGramModel::train(text.str(), cli.order, cli.smoothing);
  model.save(cli.out_path);
  std::cout << "trained order-" << model.order() << " model over "
            << model.vocabulary().size() << " token types, saved to " << cli.out_path
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched in-context decoding over weighted parallel prompts"};
  app.require_subcommand(1);

  DecodeCli decode_cli;
  CLI::App* decode = app.add_subcommand("decode", "Generate one continuation");
  decode->add_option("--demos", decode_cli.demos_path, "Demonstration pool JSONL")
      ->required();
  decode->add_option("--question", decode_cli.question, "Test question text")->required();
  decode->add_option("--strategy", decode_cli.strategy, "Decoding strategy")
      ->capture_default_str();
  decode->add_option("--k", decode_cli.k, "Demonstrations to sample (0 = whole pool)")
      ->capture_default_str();
  decode->add_option("--m", decode_cli.m, "Demonstrations per batch (0 = single batch)")
      ->capture_default_str();
  decode->add_option("--alpha", decode_cli.alpha, "Plausibility threshold ratio")
      ->capture_default_str();
  decode->add_option("--backend", decode_cli.backend, "Language model backend")
      ->check(CLI::IsMember({"ngram", "openai"}))
      ->capture_default_str();
  decode->add_option("--max-new-tokens", decode_cli.max_new_tokens, "Generation length cap")
      ->capture_default_str();
  decode->add_option("--trace", decode_cli.trace_path, "Write a step-by-step JSON trace");
  decode->add_option("--seed", decode_cli.seed, "Demonstration sampling seed")
      ->capture_default_str();
  decode->add_option("--stop", decode_cli.stop_sequences,
                     "Stop sequence, truncates the continuation; \\n, \\t and \\\\ "
                     "escapes are decoded (repeatable)");
  decode->add_option("--template-demo", decode_cli.template_demo,
                     "Demonstration template with {q} and {a} placeholders");
  decode->add_option("--template-test", decode_cli.template_test,
                     "Test template with a {test} placeholder");
  decode->add_option("--template-separator", decode_cli.template_separator,
                     "Separator between prompt sections, escapes decoded");
  decode->add_option("--contrastive", decode_cli.contrastive_path,
                     "Contrastive demonstration JSONL (contrastive_paraicl only)");
  decode->add_option("--embedding-dim", decode_cli.embedding_dim,
                     "Hashed n-gram embedding dimension")
      ->capture_default_str();
  decode->add_option("--ngram-model", decode_cli.ngram_model, "Saved n-gram model path");
  decode->add_option("--ngram-corpus", decode_cli.ngram_corpus,
                     "Corpus to train a fresh n-gram model from");
  decode->add_option("--ngram-order", decode_cli.ngram_order, "N-gram order")
      ->capture_default_str();
  decode->add_option("--ngram-smoothing", decode_cli.ngram_smoothing,
                     "Add-k smoothing constant")
      ->capture_default_str();
  decode->add_option("--endpoint", decode_cli.endpoint,
                     "OpenAI-compatible server, scheme://host:port");
  decode->add_option("--model", decode_cli.model, "Remote model name");
  decode->add_option("--max-top-k", decode_cli.max_top_k, "Logprobs requested per call")
      ->capture_default_str();

  EvalCli eval_cli;
  CLI::App* eval = app.add_subcommand("eval", "Run a dataset evaluation");
  eval->add_option("--config", eval_cli.config_path, "key = value run configuration")
      ->required();
  add_eval_overrides(eval, eval_cli);

  SweepCli sweep_cli;
  CLI::App* sweep = app.add_subcommand("sweep", "Eval across batch counts, k = m * s");
  sweep->add_option("--config", sweep_cli.eval.config_path, "key = value run configuration")
      ->required();
  sweep->add_option("--m", sweep_cli.m, "Demonstrations per batch")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--batches-list", sweep_cli.batches_list,
                    "Comma-separated batch counts")
      ->capture_default_str();
  add_eval_overrides(sweep, sweep_cli.eval, /*include_batch_flags=*/false);

  TrainCli train_cli;
  CLI::App* train = app.add_subcommand("train-ngram", "Train and save an n-gram model");
  train->add_option("--corpus", train_cli.corpus_path, "Plain-text corpus, one line per doc")
      ->required();
  train->add_option("--order", train_cli.order, "N-gram order")->capture_default_str();
  train->add_option("--smoothing", train_cli.smoothing, "Add-k smoothing constant")
      ->capture_default_str();
  train->add_option("--out", train_cli.out_path, "Model output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (app.got_subcommand(decode)) return run_decode(decode_cli);
    if (app.got_subcommand(eval)) return run_eval_cmd(eval_cli);
    if (app.got_subcommand(sweep)) return run_sweep(sweep_cli);
    if (app.got_subcommand(train)) return run_train(train_cli);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
