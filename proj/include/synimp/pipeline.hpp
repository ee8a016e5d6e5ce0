#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "synimp/baselines.hpp"
#include "synimp/corpus.hpp"
#include "synimp/experiment.hpp"
#include "synimp/generator.hpp"
#include "synimp/http_providers.hpp"
#include "synimp/run_store.hpp"
#include "synimp/validator.hpp"

namespace synimp {

struct ProviderSettings {
  std::string kind = "mock";  // mock | http
  double similarity = 0.5;    // mock only
  ChatEndpointConfig http;
  double requests_per_second = 0.0;  // 0 = unlimited
};

// Everything a run needs. Parsed from a JSON file whose keys mirror the CLI
// flags; relative paths resolve against the file's directory.
struct RunConfig {
  std::string run_id;
  std::filesystem::path corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  std::size_t max_words = kDefaultMaxWords;
  std::string category;
  std::vector<std::size_t> original_sizes;
  std::optional<std::size_t> target_total;
  std::size_t min_originals = kMinOriginals;
  std::string template_name = "nostalgia";
  std::string template_body;  // resolved body; wins over template_name
  ProviderSettings provider;
  GenerationParams params;
  std::size_t parallel = 4;
  bool distinct_examples = false;
  int max_attempts = 5;
  std::uint64_t master_seed = 0;
  SimilarityThresholds thresholds;
  std::size_t k = 10;
  std::size_t repeats = 10;
  std::vector<Strategy> strategies = {Strategy::none, Strategy::imputation, Strategy::ssmba,
                                      Strategy::eda};
  double alpha = 1.0;
  std::string trainer_command;  // empty = built-in naive Bayes
  BaselineSettings baselines;
  std::filesystem::path output_dir;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ConfigError for unknown keys, bad values or a missing template
// file. The corpus is only read when a run is created or evaluated.
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
// Canonical snapshot: absolute corpus path, resolved template body.
nlohmann::json to_json(const RunConfig& c);

std::unique_ptr<GenerationProvider> make_provider(const ProviderSettings& s);

// A run directory plus its replayed in-memory state. All methods are
// thread-safe; appends are serialized through one writer.
class Run {
 public:
  // Creates the directory; fails if a run already lives there.
  static std::unique_ptr<Run> create(const std::filesystem::path& dir, RunConfig config);
  static std::unique_ptr<Run> open(const std::filesystem::path& dir);

  std::string id() const;
  const std::filesystem::path& dir() const { return store_.dir(); }
  RunRecord record() const;
  const RunConfig& config() const { return config_; }
  std::vector<GenerationRecord> candidates() const;
  std::optional<GenerationRecord> candidate(const std::string& cid) const;

  // Loaded and truncated corpus; its digest must match the snapshot.
  const Corpus& corpus() const;
  std::vector<GridCell> grid() const;
  Corpus pool_for(std::size_t original_count) const;

  // Worker cap for later generate() calls; output does not depend on it.
  void set_parallel(std::size_t n) { config_.parallel = n ? n : 1; }

  void transition(RunState to);
  // Appends a new prompt version; allowed in created and reviewing.
  PromptVersion edit_prompt(const std::string& body);
  // accept/reject by a reviewer, flag by the validator.
  GenerationRecord decide(const std::string& cid, CandidateStatus status, const std::string& note,
                          const std::string& actor = "reviewer");

  // Fills each cell's remaining deficit (synthetic target minus non-rejected
  // candidates). created|reviewing -> generating -> reviewing, or failed.
  // A run left in generating by a crash resumes where its log ends.
  GenerationResult generate(GenerationProvider* provider_override = nullptr,
                            RetryPolicy retry = {});
  // Scores candidates per cell, flags pending ones, writes similarity.json.
  nlohmann::json validate();
  // reviewing -> evaluating -> done; writes metrics.json and report.csv and
  // returns the metrics.json bytes.
  // `strategies` replaces the configured strategy list for this evaluation.
  std::string evaluate(Trainer* trainer_override = nullptr,
                       std::optional<std::vector<Strategy>> strategies = std::nullopt);

  std::optional<std::string> metrics() const;
  std::optional<nlohmann::json> similarity() const;

 private:
  Run(const std::filesystem::path& dir, RunConfig config);

  RunStore store_;
  RunConfig config_;
  mutable std::mutex mu_;
  RunRecord record_;
  std::vector<GenerationRecord> candidates_;
  mutable std::once_flag corpus_once_;
  mutable std::optional<Corpus> corpus_;
};

// Markdown + JSON summary of a run directory.
struct RunSummary {
  nlohmann::json json;
  std::string markdown;
  std::string csv;
};
RunSummary summarize_run(const Run& run);

}  // namespace synimp
