#include "synimp/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "synimp/classifier.hpp"
#include "synimp/json_io.hpp"
#include "synimp/planner.hpp"

namespace synimp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kConfigKeys = {
    "run_id",        "corpus",          "format",         "max_words",       "category",
    "original_sizes", "target_total",   "min_originals",  "template",        "template_body",
    "provider",      "temperature",     "max_output_words", "parallel",      "distinct_examples",
    "max_attempts",  "master_seed",     "thresholds",     "k",               "repeats",
    "strategies",    "alpha",           "trainer_command", "mask_rate",      "mask_token",
    "eda_ops",       "eda_strength",    "output_dir"};

const std::set<std::string> kProviderKeys = {"kind",        "similarity",  "url",
                                             "model",       "api_key_env", "requests_per_second",
                                             "timeout_s"};

const std::set<std::string> kThresholdKeys = {"near_duplicate_jaccard", "overlap_n",
                                              "high_overlap_containment", "min_length_ratio",
                                              "max_length_ratio"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return fs::weakly_canonical(base / p);
}

std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, kConfigKeys, "run config");
  RunConfig c;
  read(j, "run_id", c.run_id);
  std::string corpus;
  read(j, "corpus", corpus);
  if (corpus.empty()) throw ConfigError("run config needs 'corpus'");
  c.corpus_path = resolve(base_dir, corpus);
  c.corpus_format = format_from_path(c.corpus_path);
  if (j.contains("format")) c.corpus_format = format_from_string(j.at("format").get<std::string>());
  read(j, "max_words", c.max_words);
  if (c.max_words == 0) throw ConfigError("max_words must be >= 1");
  read(j, "category", c.category);
  read(j, "original_sizes", c.original_sizes);
  if (j.contains("target_total") && !j.at("target_total").is_null())
    c.target_total = j.at("target_total").get<std::size_t>();
  read(j, "min_originals", c.min_originals);

  read(j, "template", c.template_name);
  read(j, "template_body", c.template_body);
  if (c.template_body.empty()) {
    auto names = builtin_template_names();
    if (std::find(names.begin(), names.end(), c.template_name) != names.end()) {
      c.template_body = builtin_template(c.template_name).body;
    } else {
      auto path = resolve(base_dir, c.template_name);
      c.template_body = read_text_file(path);
      c.template_name = path.stem().string();
    }
  }
  try {
    PromptTemplate{c.template_name, c.template_body, c.category, {}}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.params.max_output_words = c.template_name == "speeches" ? kSpeechMaxWords : kNostalgiaMaxWords;

  if (j.contains("provider")) {
    const auto& p = j.at("provider");
    check_keys(p, kProviderKeys, "provider");
    read(p, "kind", c.provider.kind);
    read(p, "similarity", c.provider.similarity);
    read(p, "url", c.provider.http.url);
    read(p, "model", c.provider.http.model);
    read(p, "api_key_env", c.provider.http.api_key_env);
    read(p, "requests_per_second", c.provider.requests_per_second);
    long long timeout = c.provider.http.timeout.count();
    read(p, "timeout_s", timeout);
    c.provider.http.timeout = std::chrono::seconds(timeout);
  }
  if (c.provider.kind != "mock" && c.provider.kind != "http")
    throw ConfigError("provider kind must be 'mock' or 'http'");
  if (!(c.provider.similarity >= 0.0 && c.provider.similarity <= 1.0))
    throw ConfigError("mock similarity must be in [0, 1]");

  read(j, "temperature", c.params.temperature);
  read(j, "max_output_words", c.params.max_output_words);
  read(j, "parallel", c.parallel);
  if (c.parallel == 0) throw ConfigError("parallel must be >= 1");
  read(j, "distinct_examples", c.distinct_examples);
  read(j, "max_attempts", c.max_attempts);
  read(j, "master_seed", c.master_seed);

  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    check_keys(t, kThresholdKeys, "thresholds");
    read(t, "near_duplicate_jaccard", c.thresholds.near_duplicate_jaccard);
    read(t, "overlap_n", c.thresholds.overlap_n);
    read(t, "high_overlap_containment", c.thresholds.high_overlap_containment);
    read(t, "min_length_ratio", c.thresholds.min_length_ratio);
    read(t, "max_length_ratio", c.thresholds.max_length_ratio);
  }
  read(j, "k", c.k);
  read(j, "repeats", c.repeats);
  if (c.k < 2) throw ConfigError("k must be >= 2");
  if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (j.contains("strategies")) {
    c.strategies.clear();
    try {
      for (const auto& s : j.at("strategies")) c.strategies.push_back(strategy_from_string(s.get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  read(j, "alpha", c.alpha);
  if (!(c.alpha > 0)) throw ConfigError("alpha must be positive");
  read(j, "trainer_command", c.trainer_command);
  read(j, "mask_rate", c.baselines.masking.rate);
  read(j, "mask_token", c.baselines.masking.mask_token);
  try {
    c.baselines.masking.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("eda_ops")) {
    c.baselines.eda_ops.clear();
    try {
      for (const auto& s : j.at("eda_ops")) c.baselines.eda_ops.insert(eda_op_from_string(s.get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  read(j, "eda_strength", c.baselines.eda_strength);
  std::string out;
  read(j, "output_dir", out);
  c.output_dir = resolve(base_dir, out);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, fs::absolute(path).parent_path());
}

json to_json(const RunConfig& c) {
  json strategies = json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  json eda_ops = json::array();
  for (auto op : c.baselines.eda_ops) eda_ops.push_back(std::string(to_string(op)));
  json j = {
      {"run_id", c.run_id},
      {"corpus", c.corpus_path.empty() ? std::string() : fs::absolute(c.corpus_path).string()},
      {"format", c.corpus_format == CorpusFormat::csv ? "csv" : "jsonl"},
      {"max_words", c.max_words},
      {"category", c.category},
      {"original_sizes", c.original_sizes},
      {"target_total", c.target_total ? json(*c.target_total) : json(nullptr)},
      {"min_originals", c.min_originals},
      {"template", c.template_name},
      {"template_body", c.template_body},
      {"provider",
       {{"kind", c.provider.kind},
        {"similarity", c.provider.similarity},
        {"url", c.provider.http.url},
        {"model", c.provider.http.model},
        {"api_key_env", c.provider.http.api_key_env},
        {"requests_per_second", c.provider.requests_per_second},
        {"timeout_s", c.provider.http.timeout.count()}}},
      {"temperature", c.params.temperature},
      {"max_output_words", c.params.max_output_words},
      {"parallel", c.parallel},
      {"distinct_examples", c.distinct_examples},
      {"max_attempts", c.max_attempts},
      {"master_seed", c.master_seed},
      {"thresholds",
       {{"near_duplicate_jaccard", c.thresholds.near_duplicate_jaccard},
        {"overlap_n", c.thresholds.overlap_n},
        {"high_overlap_containment", c.thresholds.high_overlap_containment},
        {"min_length_ratio", c.thresholds.min_length_ratio},
        {"max_length_ratio", c.thresholds.max_length_ratio}}},
      {"k", c.k},
      {"repeats", c.repeats},
      {"strategies", strategies},
      {"alpha", c.alpha},
      {"trainer_command", c.trainer_command},
      {"mask_rate", c.baselines.masking.rate},
      {"mask_token", c.baselines.masking.mask_token},
      {"eda_ops", eda_ops},
      {"eda_strength", c.baselines.eda_strength},
      {"output_dir", c.output_dir.string()}};
  return j;
}

std::unique_ptr<GenerationProvider> make_provider(const ProviderSettings& s) {
  if (s.kind == "mock") return std::make_unique<MockProvider>(s.similarity);
  if (s.kind == "http") return std::make_unique<HttpChatProvider>(s.http);
  throw ConfigError("unknown provider kind '" + s.kind + "'");
}

Run::Run(const fs::path& dir, RunConfig config) : store_(dir), config_(std::move(config)) {}

namespace {

Corpus load_run_corpus(const RunConfig& c) {
  return truncate_corpus(load_corpus(c.corpus_path, c.corpus_format), c.max_words);
}

std::string smallest_category(const Corpus& c) {
  auto dist = label_distribution(c);
  std::string best;
  std::size_t best_n = 0;
  for (const auto& [label, n] : dist.counts)
    if (best.empty() || n < best_n) {
      best = label;
      best_n = n;
    }
  return best;
}

ExperimentConfig experiment_config(const RunConfig& c) {
  ExperimentConfig e;
  e.category = c.category;
  e.original_sizes = c.original_sizes;
  e.target_total = c.target_total;
  e.strategies = c.strategies;
  e.master_seed = c.master_seed;
  e.cv.k = c.k;
  e.cv.repeats = c.repeats;
  e.cv.hyperparams = json{{"alpha", c.alpha}};
  e.baselines = c.baselines;
  e.thresholds = c.thresholds;
  return e;
}

}  // namespace

std::unique_ptr<Run> Run::create(const fs::path& dir, RunConfig config) {
  auto corpus = load_run_corpus(config);
  if (config.category.empty()) config.category = smallest_category(corpus);
  if (!corpus.contains_label(config.category))
    throw ConfigError("category '" + config.category + "' not present in corpus");
  const auto dist = label_distribution(corpus);
  const std::size_t full = dist.counts.at(config.category);
  if (config.original_sizes.empty()) config.original_sizes = {full};
  if (config.run_id.empty()) config.run_id = dir.filename().string();
  if (config.output_dir.empty()) config.output_dir = dir;

  std::unique_ptr<Run> run(new Run(dir, config));
  if (run->store_.exists()) throw StateError("a run already exists at " + dir.string());

  json cells = json::array();
  std::vector<std::string> warnings;
  for (const auto& cell : experiment_grid(full, experiment_config(config))) {
    LabelDistribution d;
    d.counts[config.category] = cell.original;
    d.total = cell.original;
    auto plan = make_plan(d, cell.original + cell.synthetic, config.min_originals);
    warnings.insert(warnings.end(), plan.warnings.begin(), plan.warnings.end());
    cells.push_back({{"original_count", cell.original},
                     {"synthetic_needed", plan.entries.at(config.category).synthetic_needed},
                     {"target_total", cell.original + cell.synthetic}});
  }
  auto& r = run->record_;
  r.run_id = config.run_id;
  r.config = to_json(config);
  r.corpus_digest = corpus_digest(corpus);
  r.plan = {{"category", config.category},
            {"category_count", full},
            {"cells", cells},
            {"warnings", warnings},
            {"distribution", dist}};
  r.created_at = utc_timestamp();
  r.updated_at = r.created_at;
  r.prompts.push_back({1, config.template_body, r.created_at});
  r.state = RunState::created;
  r.history.push_back({RunState::created, r.created_at});
  run->corpus_ = std::move(corpus);
  std::call_once(run->corpus_once_, [] {});
  run->store_.write_record(r);
  return run;
}

std::unique_ptr<Run> Run::open(const fs::path& dir) {
  RunStore probe(dir);
  auto replayed = probe.replay();
  auto config = run_config_from_json(replayed.record.config);
  std::unique_ptr<Run> run(new Run(dir, std::move(config)));
  run->record_ = std::move(replayed.record);
  run->candidates_ = std::move(replayed.candidates);
  return run;
}

std::string Run::id() const {
  std::lock_guard lock(mu_);
  return record_.run_id;
}

RunRecord Run::record() const {
  std::lock_guard lock(mu_);
  return record_;
}

std::vector<GenerationRecord> Run::candidates() const {
  std::lock_guard lock(mu_);
  return candidates_;
}

std::optional<GenerationRecord> Run::candidate(const std::string& cid) const {
  std::lock_guard lock(mu_);
  for (const auto& c : candidates_)
    if (c.candidate_id == cid) return c;
  return std::nullopt;
}

const Corpus& Run::corpus() const {
  std::call_once(corpus_once_, [this] {
    auto c = load_run_corpus(config_);
    if (corpus_digest(c) != record_.corpus_digest)
      throw ConfigError("corpus at " + config_.corpus_path.string() +
                        " changed since the run was created");
    corpus_ = std::move(c);
  });
  return *corpus_;
}

std::vector<GridCell> Run::grid() const {
  const auto& c = corpus();
  std::size_t full = c.with_label(config_.category).size();
  return experiment_grid(full, experiment_config(config_));
}

Corpus Run::pool_for(std::size_t original_count) const {
  return cell_pool(corpus(), config_.category, original_count, config_.master_seed);
}

void Run::transition(RunState to) {
  std::lock_guard lock(mu_);
  if (!is_legal_transition(record_.state, to))
    throw StateError("run " + record_.run_id + " cannot go from " +
                     std::string(to_string(record_.state)) + " to " + std::string(to_string(to)));
  record_.state = to;
  record_.updated_at = utc_timestamp();
  record_.history.push_back({to, record_.updated_at});
  store_.write_record(record_);
}

PromptVersion Run::edit_prompt(const std::string& body) {
  PromptTemplate{"edit", body, config_.category, {}}.validate();
  std::lock_guard lock(mu_);
  if (record_.state != RunState::created && record_.state != RunState::reviewing)
    throw StateError("prompt can only be edited while the run is created or reviewing");
  PromptVersion v{record_.current_prompt().version + 1, body, utc_timestamp()};
  record_.prompts.push_back(v);
  record_.updated_at = v.created_at;
  store_.write_record(record_);
  return v;
}

GenerationRecord Run::decide(const std::string& cid, CandidateStatus status,
                             const std::string& note, const std::string& actor) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(candidates_.begin(), candidates_.end(),
                         [&](const auto& c) { return c.candidate_id == cid; });
  if (it == candidates_.end()) throw NotFoundError("unknown candidate '" + cid + "'");
  if (record_.state == RunState::done || record_.state == RunState::failed ||
      record_.state == RunState::evaluating)
    throw StateError("run " + record_.run_id + " no longer accepts decisions");
  if (!is_legal_transition(it->status, status))
    throw StateError("candidate " + cid + " cannot go from " + std::string(to_string(it->status)) +
                     " to " + std::string(to_string(status)));
  store_.append_decision({cid, status, note, actor, utc_timestamp()});
  it->status = status;
  return *it;
}

GenerationResult Run::generate(GenerationProvider* provider_override, RetryPolicy retry) {
  if (record().state != RunState::generating) transition(RunState::generating);
  GenerationResult total;
  try {
    std::unique_ptr<GenerationProvider> owned;
    GenerationProvider* provider = provider_override;
    if (!provider) {
      owned = make_provider(config_.provider);
      provider = owned.get();
    }
    RateLimiter limiter(config_.provider.requests_per_second);
    retry.max_attempts = config_.max_attempts;

    std::uint64_t next_index = 0;
    std::map<std::size_t, std::size_t> live;  // original_count -> non-rejected candidates
    PromptVersion prompt;
    {
      std::lock_guard lock(mu_);
      for (const auto& c : candidates_) {
        next_index = std::max(next_index, c.index + 1);
        if (c.status != CandidateStatus::rejected) ++live[c.original_count];
      }
      prompt = record_.current_prompt();
    }
    PromptTemplate tmpl{config_.template_name, prompt.body, config_.category, {}};
    for (const auto& cell : grid()) {
      std::size_t have = live[cell.original];
      if (have >= cell.synthetic) continue;
      const std::size_t deficit = cell.synthetic - have;
      GenerationOptions opts;
      opts.master_seed = config_.master_seed;
      opts.start_index = next_index;
      opts.id_prefix = record_.run_id;
      opts.original_count = cell.original;
      opts.prompt_version = prompt.version;
      opts.distinct_examples = config_.distinct_examples;
      opts.parallel = config_.parallel;
      opts.params = config_.params;
      opts.retry = retry;
      opts.limiter = &limiter;
      opts.on_record = [this](const GenerationRecord& r) {
        std::lock_guard lock(mu_);
        store_.append_candidate(r);
        candidates_.push_back(r);
      };
      auto result = run_generation(pool_for(cell.original), deficit, tmpl, *provider, opts);
      next_index += deficit;
      for (auto& r : result.records) total.records.push_back(std::move(r));
      for (auto& f : result.failures) total.failures.push_back(std::move(f));
    }
    {
      std::lock_guard lock(mu_);
      std::sort(candidates_.begin(), candidates_.end(),
                [](const auto& a, const auto& b) { return a.index < b.index; });
    }
    transition(RunState::reviewing);
  } catch (...) {
    try {
      transition(RunState::failed);
    } catch (...) {
    }
    throw;
  }
  return total;
}

json Run::validate() {
  const auto cands = candidates();
  json cells = json::array();
  SimilaritySummary overall;
  std::vector<CandidateSimilarity> all_entries;
  json entries = json::array();
  for (const auto& cell : grid()) {
    std::vector<GenerationRecord> batch;
    for (const auto& c : cands)
      if (c.original_count == cell.original) batch.push_back(c);
    auto before = batch;
    auto report = validate_batch(batch, pool_for(cell.original), config_.thresholds);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].status == CandidateStatus::flagged && before[i].status != CandidateStatus::flagged) {
        std::string note = "validator:";
        for (auto f : report.entries[i].flags) note += " " + std::string(to_string(f));
        decide(batch[i].candidate_id, CandidateStatus::flagged, note, "validator");
      }
      json e = report.entries[i];
      e["original_count"] = cell.original;
      entries.push_back(std::move(e));
    }
    cells.push_back({{"original_count", cell.original}, {"summary", report.summary}});
    all_entries.insert(all_entries.end(), report.entries.begin(), report.entries.end());
  }
  json out = {{"entries", entries}, {"cells", cells}, {"summary", summarize_similarity(all_entries)}};
  store_.write_file("similarity.json", out.dump(2) + "\n");
  return out;
}

std::string Run::evaluate(Trainer* trainer_override,
                          std::optional<std::vector<Strategy>> strategies) {
  if (strategies && strategies->empty()) throw ConfigError("strategy list is empty");
  transition(RunState::evaluating);
  try {
    std::unique_ptr<Trainer> owned;
    Trainer* trainer = trainer_override;
    if (!trainer) {
      if (config_.trainer_command.empty()) owned = std::make_unique<NaiveBayesTrainer>();
      else owned = std::make_unique<SubprocessTrainer>(config_.trainer_command);
      trainer = owned.get();
    }
    const auto cands = candidates();
    const std::string category = config_.category;
    ImputationSource imputation = [&](const GridCell& cell, const Corpus&) {
      std::vector<LabeledExample> rows;
      for (const auto& c : cands) {
        if (c.original_count != cell.original || c.status == CandidateStatus::rejected) continue;
        rows.push_back({c.candidate_id, c.text, category, Origin::synthetic_llm});
      }
      return Corpus(std::move(rows));
    };
    auto ecfg = experiment_config(config_);
    if (strategies) ecfg.strategies = *strategies;
    auto report = run_experiment(corpus(), ecfg, imputation, *trainer);
    json j = report;
    json names = json::array();
    for (auto s : ecfg.strategies) names.push_back(std::string(to_string(s)));
    j["settings"] = {{"master_seed", config_.master_seed},
                     {"k", config_.k},
                     {"repeats", config_.repeats},
                     {"strategies", names},
                     {"trainer", trainer->name()}};
    std::string metrics = j.dump(2) + "\n";
    store_.write_file("metrics.json", metrics);
    store_.write_file("report.csv", experiment_csv(report));
    transition(RunState::done);
    return metrics;
  } catch (...) {
    try {
      transition(RunState::failed);
    } catch (...) {
    }
    throw;
  }
}

std::optional<std::string> Run::metrics() const { return store_.read_file("metrics.json"); }

std::optional<json> Run::similarity() const {
  auto s = store_.read_file("similarity.json");
  if (!s) return std::nullopt;
  return json::parse(*s);
}

namespace {

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

RunSummary summarize_run(const Run& run) {
  RunSummary out;
  const auto rec = run.record();
  const auto cands = run.candidates();
  const std::string& category = run.config().category;
  json counts = json::object();
  for (const auto& c : cands) {
    auto key = std::to_string(c.original_count);
    if (!counts.contains(key)) counts[key] = json::object();
    auto& slot = counts[key][std::string(to_string(c.status))];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
  }
  out.json = {{"run_id", rec.run_id},
              {"state", std::string(to_string(rec.state))},
              {"category", category},
              {"plan", rec.plan},
              {"prompt_versions", rec.prompts.size()},
              {"candidate_status_by_cell", counts}};
  if (auto sim = run.similarity()) out.json["similarity"] = (*sim)["summary"];

  std::ostringstream md;
  md << "# Run " << rec.run_id << "\n\n";
  md << "- state: " << to_string(rec.state) << "\n";
  md << "- category: " << category << "\n";
  md << "- candidates: " << cands.size() << "\n";
  md << "- prompt versions: " << rec.prompts.size() << "\n\n";

  if (auto m = run.metrics()) {
    auto metrics = json::parse(*m);
    std::map<std::pair<std::string, std::size_t>, double> f1;
    std::optional<double> truth;
    md << "| strategy | originals | synthetic | " << category << " F1 | sd | weighted F1 |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& cell : metrics["cells"]) {
      if (cell.value("failed", false)) continue;
      const auto strategy = cell["strategy"].get<std::string>();
      const auto n = cell["original_count"].get<std::size_t>();
      const auto& s = cell["class_f1"][category];
      f1[{strategy, n}] = s["mean"].get<double>();
      if (strategy == "true") truth = s["mean"].get<double>();
      md << "| " << strategy << " | " << n << " | " << cell["synthetic_count"].get<std::size_t>()
         << " | " << fmt3(s["mean"].get<double>()) << " | " << fmt3(s["sd_fits"].get<double>())
         << " | " << fmt3(cell["weighted_f1"]["mean"].get<double>()) << " |\n";
    }
    json derived = json::array();
    if (truth && *truth > 0) {
      md << "\n| originals | overfit ratio (imputation) | gain over none | overfit reduction vs SSMBA | penalized |\n";
      md << "|---|---|---|---|---|\n";
      for (const auto& [key, value] : f1) {
        if (key.first != "imputation") continue;
        json d = {{"original_count", key.second},
                  {"overfit_ratio", overfit_ratio(value, *truth)}};
        std::string gain = "-", reduction = "-";
        if (auto it = f1.find({"none", key.second}); it != f1.end() && it->second > 0) {
          d["relative_gain_over_none"] = relative_gain(*truth, it->second);
          gain = fmt3(d["relative_gain_over_none"].get<double>());
        }
        if (auto it = f1.find({"ssmba", key.second}); it != f1.end() && it->second > 0) {
          d["overfit_reduction_vs_ssmba"] = overfit_reduction(it->second, value);
          reduction = fmt3(d["overfit_reduction_vs_ssmba"].get<double>());
        }
        d["penalized_f1"] = penalized_score(value);
        md << "| " << key.second << " | " << fmt3(d["overfit_ratio"].get<double>()) << " | " << gain
           << " | " << reduction << " | " << fmt3(d["penalized_f1"].get<double>()) << " |\n";
        derived.push_back(std::move(d));
      }
      out.json["true_f1"] = *truth;
    }
    out.json["derived"] = derived;
    out.csv = run.dir().empty() ? "" : [&] {
      std::ifstream in(run.dir() / "report.csv");
      std::ostringstream os;
      os << in.rdbuf();
      return os.str();
    }();
  } else {
    md << "No evaluation yet.\n";
  }
  out.markdown = md.str();
  return out;
}

}  // namespace synimp
