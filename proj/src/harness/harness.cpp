#include "paraicl/harness.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "json.hpp"
#include "paraicl/errors.hpp"
#include "paraicl/ngram.hpp"

namespace paraicl {

using nlohmann::json;

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

// Lowercased with whitespace runs collapsed to single spaces.
std::string normalize(const std::string& text) {
  std::string out;
  bool in_space = false;
  for (char raw : trim(text)) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out += ' ';
    in_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

bool parse_number(const std::string& text, double& value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  value = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::vector<std::string> split(const std::string& text, const std::string& sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t at = text.find(sep, begin);
    if (at == std::string::npos) {
      parts.push_back(text.substr(begin));
      return parts;
    }
    parts.push_back(text.substr(begin, at - begin));
    begin = at + sep.size();
  }
}

}  // namespace

// \n, \t and \\ escapes, so templates and stop sequences fit on one line.
std::string unescape_config_value(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    switch (text[++i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      default: out += '\\'; out += text[i];
    }
  }
  return out;
}

namespace {

int parse_int(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_number(value, v) || v != std::floor(v)) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_number(value, v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string require_string_field(const json& j, const char* field, int line) {
  if (!j.contains(field)) throw MissingField(line, field);
  if (!j[field].is_string()) {
    throw ParseError(line, std::string("field '") + field + "' must be a string");
  }
  return j[field].get<std::string>();
}

json parse_line(const std::string& line, int line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(line_number, "not valid JSON");
  if (!j.is_object()) throw ParseError(line_number, "expected a JSON object");
  return j;
}

}  // namespace

AnswerMode parse_answer_mode(const std::string& name) {
  if (name == "gsm8k_hash") return AnswerMode::gsm8k_hash;
  if (name == "option_letter") return AnswerMode::option_letter;
  if (name == "exact") return AnswerMode::exact;
  if (name == "raw") return AnswerMode::raw;
  throw ConfigError("unknown answer_mode '" + name +
                    "' (known: gsm8k_hash, option_letter, exact, raw)");
}

std::string answer_mode_name(AnswerMode mode) {
  switch (mode) {
    case AnswerMode::gsm8k_hash: return "gsm8k_hash";
    case AnswerMode::option_letter: return "option_letter";
    case AnswerMode::exact: return "exact";
    case AnswerMode::raw: return "raw";
  }
  throw ConfigError("unnamed answer_mode value");
}

std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<Demonstration> demos;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const json j = parse_line(line, line_number);
    demos.push_back({require_string_field(j, "question", line_number),
                     require_string_field(j, "answer", line_number)});
  }
  return demos;
}

std::vector<TestSample> load_testset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<TestSample> samples;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const json j = parse_line(line, line_number);
    TestSample sample;
    sample.question = require_string_field(j, "question", line_number);
    if (j.contains("answer")) {
      sample.gold_answer = require_string_field(j, "answer", line_number);
    }
    sample.sample_id = j.contains("id") ? require_string_field(j, "id", line_number)
                                        : std::to_string(line_number);
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::vector<Demonstration> sample_demonstrations(const std::vector<Demonstration>& pool,
                                                 int k, std::uint64_t seed) {
  if (k < 0) throw ConfigError("sample_demonstrations: k must be >= 0");
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw PoolTooSmall("need " + std::to_string(k) + " demonstrations, pool has " +
                       std::to_string(pool.size()));
  }

  // Pinned scheme: mt19937_64 seeded directly; k partial Fisher-Yates steps,
  // each picking index i + gen() % (n - i). The modulo bias is irrelevant
  // here; identical draws everywhere is what matters.
  std::mt19937_64 gen(seed);
  std::vector<std::size_t> indices(pool.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

  std::vector<Demonstration> drawn;
  drawn.reserve(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
    drawn.push_back(pool[indices[i]]);
  }
  return drawn;
}

std::string extract_answer(const std::string& continuation, AnswerMode mode) {
  switch (mode) {
    case AnswerMode::raw:
      return continuation;
    case AnswerMode::exact:
      return trim(continuation);
    case AnswerMode::gsm8k_hash: {
      const std::size_t at = continuation.rfind("####");
      if (at == std::string::npos) {
        throw NoAnswerFound("no '####' marker in continuation");
      }
      std::string answer = trim(continuation.substr(at + 4));
      std::erase(answer, ',');
      if (answer.empty()) throw NoAnswerFound("empty answer after '####'");
      return answer;
    }
    case AnswerMode::option_letter: {
      for (std::size_t i = 0; i < continuation.size(); ++i) {
        const char c = continuation[i];
        if (c < 'A' || c > 'E') continue;
        const bool left_ok =
            i == 0 || !std::isalnum(static_cast<unsigned char>(continuation[i - 1]));
        const bool right_ok =
            i + 1 == continuation.size() ||
            !std::isalnum(static_cast<unsigned char>(continuation[i + 1]));
        if (left_ok && right_ok) return std::string(1, c);
      }
      throw NoAnswerFound("no standalone option letter A-E in continuation");
    }
  }
  throw ConfigError("unnamed answer_mode value");
}

bool score_exact_match(const std::string& extracted, const std::string& gold) {
  double a = 0.0;
  double b = 0.0;
  if (parse_number(extracted, a) && parse_number(gold, b)) return a == b;
  return normalize(extracted) == normalize(gold);
}

void BackendDescriptor::validate() const {
  switch (kind) {
    case Kind::ngram:
      if (ngram_model_path.empty() && ngram_corpus_path.empty()) {
        throw ConfigError("ngram backend needs backend.ngram.model_path or "
                          "backend.ngram.corpus_path");
      }
      if (ngram_order < 1) throw ConfigError("backend.ngram.order must be >= 1");
      if (!(ngram_smoothing_k > 0.0)) {
        throw ConfigError("backend.ngram.smoothing_k must be > 0");
      }
      return;
    case Kind::openai_compat:
      openai.validate();
      return;
  }
  throw ConfigError("unknown backend kind");
}

std::unique_ptr<LmBackend> make_backend(const BackendDescriptor& descriptor) {
  descriptor.validate();
  if (descriptor.kind == BackendDescriptor::Kind::openai_compat) {
    return std::make_unique<OpenAiClient>(descriptor.openai);
  }
  if (!descriptor.ngram_model_path.empty()) {
    return std::make_unique<NGramModel>(NGramModel::load(descriptor.ngram_model_path));
  }
  std::ifstream in(descriptor.ngram_corpus_path);
  if (!in) throw IoError("cannot open " + descriptor.ngram_corpus_path);
  std::ostringstream corpus;
  corpus << in.rdbuf();
  return std::make_unique<NGramModel>(
      NGramModel::train(corpus.str(), descriptor.ngram_order, descriptor.ngram_smoothing_k));
}

void RunConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (demo_path.empty()) throw ConfigError("demo_path is required");
  if (test_path.empty()) throw ConfigError("test_path is required");
  if (output_path.empty()) throw ConfigError("output_path is required");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (batching.k < 1) throw ConfigError("batching: k must be >= 1");
  if (strategy_uses_batches(strategy)) batching.validate();
  if (strategy == DecodeStrategy::contrastive_paraicl && contrastive_path.empty()) {
    throw ConfigError("contrastive_paraicl needs contrastive_path");
  }
  if (!(contrastive_floor > 0.0)) throw ConfigError("contrastive_floor must be > 0");
  generation.validate();
  prompt_template.validate();
  embedding.validate();
  backend.validate();
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "strategy") {
    config.strategy = parse_strategy(value);
  } else if (key == "k") {
    config.batching.k = parse_int(key, value);
  } else if (key == "m") {
    config.batching.m = parse_int(key, value);
  } else if (key == "within_batch_order") {
    if (value == "ascending") {
      config.batching.within_batch_order = WithinBatchOrder::ascending_similarity;
    } else if (value == "descending") {
      config.batching.within_batch_order = WithinBatchOrder::descending_similarity;
    } else {
      throw ConfigError("within_batch_order: expected ascending or descending");
    }
  } else if (key == "strict_divisibility") {
    config.batching.strict_divisibility = parse_bool(key, value);
  } else if (key == "alpha") {
    config.generation.alpha = parse_double(key, value);
  } else if (key == "max_new_tokens") {
    config.generation.max_new_tokens = parse_int(key, value);
  } else if (key == "use_plausibility_constraint") {
    config.generation.use_plausibility_constraint = parse_bool(key, value);
  } else if (key == "stop_sequences") {
    config.generation.stop_sequences.clear();
    if (!trim(value).empty()) {
      for (const std::string& stop : split(value, "||")) {
        config.generation.stop_sequences.push_back(unescape_config_value(stop));
      }
    }
  } else if (key == "seeds") {
    config.seeds.clear();
    for (const std::string& part : split(value, ",")) {
      const int seed = parse_int(key, part);
      if (seed < 0) throw ConfigError("seeds must be non-negative");
      config.seeds.push_back(static_cast<std::uint64_t>(seed));
    }
    if (config.seeds.empty()) throw ConfigError("seeds must be non-empty");
  } else if (key == "demo_path") {
    config.demo_path = trim(value);
  } else if (key == "test_path") {
    config.test_path = trim(value);
  } else if (key == "output_path") {
    config.output_path = trim(value);
  } else if (key == "contrastive_path") {
    config.contrastive_path = trim(value);
  } else if (key == "contrastive_floor") {
    config.contrastive_floor = parse_double(key, value);
  } else if (key == "answer_mode") {
    config.answer_mode = parse_answer_mode(trim(value));
  } else if (key == "parallelism") {
    config.parallelism = parse_int(key, value);
  } else if (key == "embedding.kind") {
    if (value == "hashed_ngram") {
      config.embedding.kind = EmbeddingProviderConfig::Kind::hashed_ngram;
    } else if (value == "remote") {
      config.embedding.kind = EmbeddingProviderConfig::Kind::remote;
    } else {
      throw ConfigError("embedding.kind: expected hashed_ngram or remote");
    }
  } else if (key == "embedding.dim") {
    const int dim = parse_int(key, value);
    if (dim < 1) throw ConfigError("embedding.dim must be >= 1");
    config.embedding.dim = static_cast<std::size_t>(dim);
  } else if (key == "embedding.endpoint") {
    config.embedding.endpoint = trim(value);
  } else if (key == "embedding.model") {
    config.embedding.model_name = trim(value);
  } else if (key == "backend.kind") {
    if (value == "ngram") {
      config.backend.kind = BackendDescriptor::Kind::ngram;
    } else if (value == "openai" || value == "openai_compat") {
      config.backend.kind = BackendDescriptor::Kind::openai_compat;
    } else {
      throw ConfigError("backend.kind: expected ngram or openai");
    }
  } else if (key == "backend.endpoint") {
    config.backend.openai.endpoint = trim(value);
  } else if (key == "backend.model") {
    config.backend.openai.model = trim(value);
  } else if (key == "backend.max_top_k") {
    config.backend.openai.max_top_k = parse_int(key, value);
  } else if (key == "backend.eos_surface") {
    config.backend.openai.eos_surface = unescape_config_value(trim(value));
  } else if (key == "backend.max_calls") {
    config.backend.openai.max_calls = parse_int(key, value);
  } else if (key == "backend.max_in_flight") {
    config.backend.openai.max_in_flight = parse_int(key, value);
  } else if (key == "backend.ngram.model_path") {
    config.backend.ngram_model_path = trim(value);
  } else if (key == "backend.ngram.corpus_path") {
    config.backend.ngram_corpus_path = trim(value);
  } else if (key == "backend.ngram.order") {
    config.backend.ngram_order = parse_int(key, value);
  } else if (key == "backend.ngram.smoothing_k") {
    config.backend.ngram_smoothing_k = parse_double(key, value);
  } else if (key == "template.demonstration") {
    config.prompt_template.demonstration_template = unescape_config_value(value);
  } else if (key == "template.test") {
    config.prompt_template.test_template = unescape_config_value(value);
  } else if (key == "template.separator") {
    config.prompt_template.separator = unescape_config_value(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  RunConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + " line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    try {
      apply_config_entry(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + " line " + std::to_string(line_number) + ": " +
                        e.what());
    }
  }
  return config;
}

RunSummary summarize(const std::vector<SampleResult>& samples) {
  RunSummary summary;
  summary.samples = static_cast<int>(samples.size());

  // Seeds in first-appearance order (job order is seed-major).
  std::vector<std::uint64_t> seed_order;
  std::unordered_map<std::uint64_t, std::pair<int, int>> tallies;  // correct, scored
  for (const SampleResult& s : samples) {
    if (s.error) ++summary.failures;
    summary.wall_time_ms_total += s.wall_time_ms;
    if (tallies.emplace(s.seed, std::pair<int, int>{0, 0}).second) {
      seed_order.push_back(s.seed);
    }
    if (s.correct.has_value()) {
      auto& [correct, scored] = tallies[s.seed];
      ++scored;
      if (*s.correct) ++correct;
    }
  }

  for (std::uint64_t seed : seed_order) {
    const auto& [correct, scored] = tallies[seed];
    if (scored > 0) {
      summary.per_seed_accuracy.push_back(static_cast<double>(correct) / scored);
    }
  }

  if (!summary.per_seed_accuracy.empty()) {
    double mean = 0.0;
    for (double a : summary.per_seed_accuracy) mean += a;
    mean /= static_cast<double>(summary.per_seed_accuracy.size());
    double variance = 0.0;
    for (double a : summary.per_seed_accuracy) variance += (a - mean) * (a - mean);
    variance /= static_cast<double>(summary.per_seed_accuracy.size());
    summary.accuracy_mean = mean;
    summary.accuracy_stddev = std::sqrt(variance);
  }
  return summary;
}

std::string sample_result_to_json(const SampleResult& result) {
  json j = {{"sample_id", result.sample_id},
            {"strategy", result.strategy},
            {"seed", result.seed},
            {"continuation", result.continuation},
            {"extracted_answer",
             result.extracted_answer ? json(*result.extracted_answer) : json(nullptr)},
            {"correct", result.correct ? json(*result.correct) : json(nullptr)},
            {"step_count", result.step_count},
            {"wall_time_ms", result.wall_time_ms}};
  if (result.error) j["error"] = *result.error;
  return j.dump();
}

SampleResult sample_result_from_json(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(0, "not a JSON object");
  try {
    SampleResult r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.continuation = j.at("continuation").get<std::string>();
    if (j.contains("extracted_answer") && !j["extracted_answer"].is_null()) {
      r.extracted_answer = j["extracted_answer"].get<std::string>();
    }
    if (j.contains("correct") && !j["correct"].is_null()) {
      r.correct = j["correct"].get<bool>();
    }
    r.step_count = j.at("step_count").get<int>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    if (j.contains("error") && !j["error"].is_null()) {
      r.error = j["error"].get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

namespace {

void create_parent_dirs(const std::filesystem::path& path) {
  const std::filesystem::path parent = path.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
}

json summary_to_json(const RunSummary& summary, const RunConfig& config) {
  json per_seed = json::array();
  for (double a : summary.per_seed_accuracy) per_seed.push_back(a);
  return {{"summary", true},
          {"config",
           {{"strategy", strategy_name(config.strategy)},
            {"k", config.batching.k},
            {"m", config.batching.m},
            {"alpha", config.generation.alpha},
            {"max_new_tokens", config.generation.max_new_tokens},
            {"use_plausibility_constraint", config.generation.use_plausibility_constraint},
            {"answer_mode", answer_mode_name(config.answer_mode)},
            {"seeds", config.seeds},
            {"backend",
             config.backend.kind == BackendDescriptor::Kind::ngram ? "ngram" : "openai"},
            {"demo_path", config.demo_path},
            {"test_path", config.test_path}}},
          {"samples", summary.samples},
          {"failures", summary.failures},
          {"per_seed_accuracy", per_seed},
          {"accuracy_mean",
           summary.accuracy_mean ? json(*summary.accuracy_mean) : json(nullptr)},
          {"accuracy_stddev",
           summary.accuracy_stddev ? json(*summary.accuracy_stddev) : json(nullptr)},
          {"wall_time_ms_total", summary.wall_time_ms_total}};
}

std::string job_key(const std::string& sample_id, std::uint64_t seed,
                    const std::string& strategy) {
  return sample_id + '\x1f' + std::to_string(seed) + '\x1f' + strategy;
}

// Clean records from an earlier, possibly interrupted run; failed records are
// left out so they get retried. Unparseable lines (e.g. a torn final write)
// and the old summary are simply ignored.
std::unordered_map<std::string, SampleResult> load_resume_cache(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, SampleResult> cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      SampleResult r = sample_result_from_json(line);
      if (!r.error) cache[job_key(r.sample_id, r.seed, r.strategy)] = std::move(r);
    } catch (const ParseError&) {
      continue;
    }
  }
  return cache;
}

}  // namespace

RunResult run_eval(const RunConfig& config) {
  config.validate();

  const std::vector<Demonstration> pool = load_demonstrations(config.demo_path);
  const std::vector<TestSample> tests = load_testset(config.test_path);
  if (static_cast<std::size_t>(config.batching.k) > pool.size()) {
    throw PoolTooSmall("need " + std::to_string(config.batching.k) +
                       " demonstrations, pool has " + std::to_string(pool.size()));
  }
  std::vector<Demonstration> contrastive_pool;
  if (config.strategy == DecodeStrategy::contrastive_paraicl) {
    contrastive_pool = load_demonstrations(config.contrastive_path);
    if (contrastive_pool.empty()) {
      throw ConfigError("contrastive_path holds no demonstrations");
    }
  }

  std::unique_ptr<LmBackend> backend = make_backend(config.backend);
  std::shared_ptr<EmbeddingProvider> provider = make_embedding_provider(config.embedding);
  const std::string strategy = strategy_name(config.strategy);

  auto cache = load_resume_cache(config.output_path);
  create_parent_dirs(config.output_path);
  std::ofstream out(config.output_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + config.output_path);

  auto evaluate_one = [&](const TestSample& sample, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    SampleResult r;
    r.sample_id = sample.sample_id;
    r.strategy = strategy;
    r.seed = seed;
    try {
      StrategyRequest request;
      request.strategy = config.strategy;
      request.demos = sample_demonstrations(pool, config.batching.k, seed);
      request.test_question = sample.question;
      request.batching = config.batching;
      request.generation = config.generation;
      request.prompt_template = config.prompt_template;
      request.contrastive.contrastive_demos = contrastive_pool;
      request.contrastive.floor_prob = config.contrastive_floor;

      const DecodeResult decoded = run_strategy(request, *backend, *provider);
      r.continuation = decoded.text;
      r.step_count = static_cast<int>(decoded.trace.steps.size());

      if (config.answer_mode == AnswerMode::raw) {
        r.extracted_answer = decoded.text;  // recorded, never scored
      } else {
        try {
          r.extracted_answer = extract_answer(decoded.text, config.answer_mode);
        } catch (const NoAnswerFound&) {
          // Extraction failure scores as incorrect below, never aborts.
        }
        if (sample.gold_answer) {
          r.correct = r.extracted_answer.has_value() &&
                      score_exact_match(*r.extracted_answer, *sample.gold_answer);
        }
      }
    } catch (const Error& e) {
      r.error = e.what();
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return r;
  };

  RunResult result;
  const std::size_t stride = static_cast<std::size_t>(config.parallelism);

  for (std::uint64_t seed : config.seeds) {
    for (std::size_t begin = 0; begin < tests.size(); begin += stride) {
      const std::size_t end = std::min(begin + stride, tests.size());

      // Launch the chunk's uncached jobs concurrently, then join and write in
      // sample order so the output order never depends on scheduling.
      std::vector<std::optional<std::future<SampleResult>>> futures(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        if (cache.contains(job_key(tests[i].sample_id, seed, strategy))) continue;
        futures[i - begin] = std::async(std::launch::async, evaluate_one,
                                        std::cref(tests[i]), seed);
      }
      for (std::size_t i = begin; i < end; ++i) {
        auto& slot = futures[i - begin];
        SampleResult r = slot ? slot->get()
                              : cache.at(job_key(tests[i].sample_id, seed, strategy));
        out << sample_result_to_json(r) << '\n';
        out.flush();
        result.samples.push_back(std::move(r));
      }
    }
  }

  result.summary = summarize(result.samples);
  out << summary_to_json(result.summary, config).dump() << '\n';
  if (!out) throw IoError("failed writing " + config.output_path);
  return result;
}

void write_results(const RunResult& result, const RunConfig& config,
                   const std::filesystem::path& path) {
  create_parent_dirs(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const SampleResult& r : result.samples) {
    out << sample_result_to_json(r) << '\n';
  }
  out << summary_to_json(result.summary, config).dump() << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace paraicl
