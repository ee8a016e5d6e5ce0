// synimp: command line front end for the augmentation pipeline.
//
// Exit codes: 0 ok, 1 error, 2 validation flagged near-duplicates.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synimp/baselines.hpp"
#include "synimp/classifier.hpp"
#include "synimp/corpus.hpp"
#include "synimp/json_io.hpp"
#include "synimp/pipeline.hpp"
#include "synimp/planner.hpp"
#include "synimp/service.hpp"
#include "synimp/validator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace synimp;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFlagged = 2;

struct OutputFlags {
  bool json_stdout = false;
  std::string json_out;
};

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
  cmd->add_flag("--json", o.json_stdout, "Print JSON instead of the table");
  cmd->add_option("--json-out", o.json_out, "Also write the JSON result to this file");
}

// Prints either the table or the JSON, and writes the JSON file if asked.
void emit(const OutputFlags& o, const json& j, const std::string& table) {
  if (o.json_stdout) std::cout << j.dump(2) << "\n";
  else std::cout << table;
  if (!o.json_out.empty()) {
    std::ofstream out(o.json_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + o.json_out);
    out << j.dump(2) << "\n";
  }
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const {
    std::vector<std::size_t> width(rows_[0].size(), 0);
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    std::ostringstream os;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      for (std::size_t i = 0; i < rows_[k].size(); ++i) {
        os << rows_[k][i];
        if (i + 1 < rows_[k].size()) os << std::string(width[i] - rows_[k][i].size() + 2, ' ');
      }
      os << "\n";
      if (k == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w + 2;
        os << std::string(total - 2, '-') << "\n";
      }
    }
    return os.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

Corpus read_input(const std::string& path, const std::string& format, std::size_t max_words) {
  auto fmt = format.empty() ? format_from_path(path) : format_from_string(format);
  auto c = load_corpus(path, fmt);
  return max_words ? truncate_corpus(c, max_words) : c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// A run directory holds run.json; anything else is read as a config file.
std::unique_ptr<Run> open_or_create(const std::string& target, const std::string& run_dir_flag,
                                    bool create) {
  if (fs::is_directory(target) && fs::exists(fs::path(target) / "run.json")) return Run::open(target);
  auto config = load_run_config(target);
  fs::path dir = run_dir_flag.empty() ? config.output_dir : fs::path(run_dir_flag);
  if (dir.empty())
    dir = fs::absolute(target).parent_path() / "runs" / (config.run_id.empty() ? "run" : config.run_id);
  if (fs::exists(dir / "run.json")) return Run::open(dir);
  if (!create) throw std::runtime_error("no run at " + dir.string() + "; run `synimp generate` first");
  fs::create_directories(dir);
  return Run::create(dir, std::move(config));
}

int cmd_analyze(const std::string& path, const std::string& format, std::size_t batch_size,
                const OutputFlags& o) {
  auto corpus = read_input(path, format, 0);
  auto dist = label_distribution(corpus);
  auto coverage = batch_coverage_table(dist, batch_size);
  Table t({"label", "count", "share", "batches", "per_batch_avg"});
  for (const auto& b : coverage)
    t.add({b.category, std::to_string(b.category_count), num(dist.shares.at(b.category)),
           std::to_string(b.num_batches), num(b.per_batch_avg, 2)});
  json j = {{"corpus", path}, {"distribution", dist}, {"batch_size", batch_size}, {"batch_coverage", coverage}};
  emit(o, j, "total " + std::to_string(dist.total) + "\n" + t.str());
  return kOk;
}

int cmd_plan(const std::string& path, const std::string& format, std::optional<std::size_t> target,
             std::size_t min_originals, const std::string& category,
             std::optional<std::size_t> originals, const OutputFlags& o) {
  auto dist = label_distribution(read_input(path, format, 0));
  if (!category.empty()) {
    if (!dist.counts.count(category)) throw std::invalid_argument("category '" + category + "' not in corpus");
    std::size_t n = originals ? *originals : dist.counts.at(category);
    if (n > dist.counts.at(category))
      throw std::invalid_argument("--originals exceeds the " + std::to_string(dist.counts.at(category)) +
                                  " available");
    dist.counts = {{category, n}};
    dist.total = n;
    dist.shares = {{category, 1.0}};
  } else if (originals) {
    throw std::invalid_argument("--originals needs --category");
  }
  std::size_t total = target ? *target : default_target_total(dist);
  auto plan = make_plan(dist, total, min_originals);
  Table t({"label", "original", "target", "synthetic_needed"});
  for (const auto& [label, e] : plan.entries)
    t.add({label, std::to_string(e.original_count), std::to_string(e.target_total),
           std::to_string(e.synthetic_needed)});
  std::string table = t.str();
  for (const auto& w : plan.warnings) table += "warning: " + w + "\n";
  emit(o, plan, table);
  return kOk;
}

int cmd_generate(const std::string& target, const std::string& run_dir, std::optional<std::size_t> parallel,
                 const OutputFlags& o) {
  auto run = open_or_create(target, run_dir, true);
  if (parallel) run->set_parallel(*parallel);
  auto result = run->generate();
  Table t({"originals", "synthetic_target", "candidates", "live"});
  json cells = json::array();
  const auto cands = run->candidates();
  for (const auto& cell : run->grid()) {
    std::size_t all = 0, live = 0;
    for (const auto& c : cands)
      if (c.original_count == cell.original) {
        ++all;
        live += c.status != CandidateStatus::rejected;
      }
    t.add({std::to_string(cell.original), std::to_string(cell.synthetic), std::to_string(all),
           std::to_string(live)});
    cells.push_back({{"original_count", cell.original}, {"synthetic_target", cell.synthetic},
                     {"candidates", all}, {"live", live}});
  }
  json failures = json::array();
  for (const auto& f : result.failures) failures.push_back({{"index", f.index}, {"error", f.message}});
  json j = {{"run_id", run->id()},
            {"run_dir", fs::absolute(run->dir()).string()},
            {"state", std::string(to_string(run->record().state))},
            {"generated", result.records.size()},
            {"failures", failures},
            {"cells", cells}};
  std::string table = "run " + run->id() + " at " + run->dir().string() + ": generated " +
                      std::to_string(result.records.size()) + "\n" + t.str();
  for (const auto& f : result.failures) table += "failed #" + std::to_string(f.index) + ": " + f.message + "\n";
  emit(o, j, table);
  return result.failures.empty() ? kOk : kError;
}

int cmd_validate(const std::string& dir, const OutputFlags& o) {
  auto run = Run::open(dir);
  auto report = run->validate();
  const auto& s = report["summary"];
  Table t({"originals", "candidates", "mean_jaccard", "max_jaccard", "near_duplicate", "high_overlap",
           "length", "empty"});
  for (const auto& c : report["cells"]) {
    const auto& cs = c["summary"];
    t.add({std::to_string(c["original_count"].get<std::size_t>()),
           std::to_string(cs["candidates"].get<std::size_t>()),
           num(cs["mean_max_jaccard_vs_original"].get<double>()),
           num(cs["max_jaccard_vs_original"].get<double>()),
           std::to_string(cs["flag_counts"]["near_duplicate"].get<std::size_t>()),
           std::to_string(cs["flag_counts"]["high_overlap"].get<std::size_t>()),
           std::to_string(cs["flag_counts"]["length_out_of_band"].get<std::size_t>()),
           std::to_string(cs["flag_counts"]["empty"].get<std::size_t>())});
  }
  emit(o, report, t.str());
  return s["flag_counts"]["near_duplicate"].get<std::size_t>() > 0 ? kFlagged : kOk;
}

struct BaselineArgs {
  std::string corpus, format, method = "ssmba", category, out, fill_mask_url, ops = "swap,delete,insert";
  std::size_t count = 0, max_words = kDefaultMaxWords, originals = 0;
  double rate = kDefaultMaskRate, strength = 0.1;
  std::string mask_token = "<mask>";
  std::uint64_t seed = 0;
};

int cmd_augment(const BaselineArgs& a, const OutputFlags& o) {
  auto corpus = read_input(a.corpus, a.format, a.max_words);
  if (a.category.empty()) throw std::invalid_argument("--category is required");
  Corpus pool = a.originals ? draw_category_subset(corpus, a.category, a.originals, a.seed)
                            : corpus.with_label(a.category);
  if (pool.empty()) throw std::invalid_argument("category '" + a.category + "' not in corpus");
  std::size_t count = a.count ? a.count : pool.size();
  std::vector<AugmentedExample> batch;
  std::vector<std::string> warnings;
  if (a.method == "ssmba") {
    MaskingConfig m{a.rate, a.mask_token, a.seed};
    warnings = m.validate();
    std::unique_ptr<FillMaskProvider> provider;
    if (a.fill_mask_url.empty()) provider = std::make_unique<BuiltinLexicalProvider>(a.seed);
    else provider = std::make_unique<HttpFillMaskProvider>(a.fill_mask_url);
    batch = ssmba_augment(pool, count, m, *provider, a.seed);
  } else if (a.method == "eda") {
    std::set<EdaOp> ops;
    for (const auto& s : split_list(a.ops)) ops.insert(eda_op_from_string(s));
    batch = eda_augment(pool, count, ops, a.strength, a.seed);
  } else {
    throw std::invalid_argument("--method must be ssmba or eda");
  }
  auto out = to_corpus(batch);
  if (!a.out.empty()) save_corpus(a.out, out, format_from_path(a.out));
  std::vector<SimilarityInput> inputs;
  for (const auto& b : batch) inputs.push_back({b.example.id, b.example.text, {b.source_id}});
  auto sim = assess_similarity(inputs, pool);
  json j = {{"method", a.method}, {"category", a.category}, {"count", out.size()},
            {"output", a.out}, {"similarity", sim.summary}, {"warnings", warnings}};
  std::string table = a.method + ": " + std::to_string(out.size()) + " examples of '" + a.category + "'" +
                      (a.out.empty() ? std::string() : " -> " + a.out) + "\n";
  table += "mean max Jaccard vs originals " + num(sim.summary.mean_max_jaccard_vs_original) + "\n";
  for (const auto& w : warnings) table += "warning: " + w + "\n";
  if (a.out.empty() && !o.json_stdout) write_corpus(std::cout, out, CorpusFormat::jsonl);
  emit(o, j, table);
  return kOk;
}

int cmd_cv(const std::string& target, const std::string& run_dir, const std::string& strategies,
           const std::string& trainer_command, const OutputFlags& o) {
  auto run = open_or_create(target, run_dir, false);
  std::optional<std::vector<Strategy>> override;
  if (!strategies.empty()) {
    override.emplace();
    for (const auto& s : split_list(strategies)) override->push_back(strategy_from_string(s));
  }
  std::unique_ptr<Trainer> trainer;
  if (!trainer_command.empty()) trainer = std::make_unique<SubprocessTrainer>(trainer_command);
  auto metrics = json::parse(run->evaluate(trainer.get(), override));
  Table t({"strategy", "originals", "synthetic", "class", "f1_mean", "f1_sd"});
  for (const auto& cell : metrics["cells"]) {
    if (cell.value("failed", false)) {
      t.add({cell["strategy"].get<std::string>(), std::to_string(cell["original_count"].get<std::size_t>()),
             "-", "-", "failed", cell.value("error", std::string())});
      continue;
    }
    for (const auto& [label, s] : cell["class_f1"].items())
      t.add({cell["strategy"].get<std::string>(), std::to_string(cell["original_count"].get<std::size_t>()),
             std::to_string(cell["synthetic_count"].get<std::size_t>()), label,
             num(s["mean"].get<double>()), num(s["sd_fits"].get<double>())});
  }
  emit(o, metrics,
       t.str() + "wrote " + (run->dir() / "metrics.json").string() + " and " +
           (run->dir() / "report.csv").string() + "\n");
  return kOk;
}

int cmd_report(const std::string& dir, const std::string& format, const OutputFlags& o) {
  auto run = Run::open(dir);
  auto summary = summarize_run(*run);
  {
    std::ofstream(run->dir() / "summary.json", std::ios::binary) << summary.json.dump(2) << "\n";
    std::ofstream(run->dir() / "summary.md", std::ios::binary) << summary.markdown;
  }
  if (format == "csv") {
    std::cout << summary.csv;
    return kOk;
  }
  emit(o, summary.json, format == "json" ? summary.json.dump(2) + "\n" : summary.markdown);
  return kOk;
}

int cmd_decide(const std::string& dir, const std::string& cid, const std::string& decision,
               const std::string& note) {
  auto run = Run::open(dir);
  CandidateStatus status;
  if (decision == "accept") status = CandidateStatus::accepted;
  else if (decision == "reject") status = CandidateStatus::rejected;
  else throw std::invalid_argument("decision must be accept or reject");
  json j = run->decide(cid, status, note);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

int cmd_prompt(const std::string& dir, const std::string& body_file) {
  auto run = Run::open(dir);
  std::ifstream in(body_file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + body_file);
  std::ostringstream os;
  os << in.rdbuf();
  auto v = run->edit_prompt(os.str());
  std::cout << "prompt version " << v.version << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic imputation toolkit: plan, generate, validate and evaluate augmented text data"};
  app.require_subcommand(1);
  OutputFlags out;

  std::string corpus, format, category, target_arg, run_dir, strategies, trainer_command, report_format = "md";
  std::size_t batch_size = 16, min_originals = kMinOriginals;
  std::optional<std::size_t> target_total, originals, parallel;

  auto* analyze = app.add_subcommand("analyze", "Label distribution and batch coverage of a corpus");
  analyze->add_option("corpus", corpus, "Corpus file (.jsonl or .csv)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--format", format, "jsonl or csv (default: from extension)");
  analyze->add_option("--batch-size", batch_size, "Training batch size")->capture_default_str()->check(CLI::PositiveNumber);
  add_output_flags(analyze, out);

  auto* plan = app.add_subcommand("plan", "Synthetic examples needed per category");
  plan->add_option("corpus", corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  plan->add_option("--format", format, "jsonl or csv (default: from extension)");
  plan->add_option("--target", target_total, "Target total per category (default: max(200, largest))");
  plan->add_option("--min-originals", min_originals, "Warn below this many originals")->capture_default_str();
  plan->add_option("--category", category, "Plan only this category");
  plan->add_option("--originals", originals, "Use this many originals of --category");
  add_output_flags(plan, out);

  auto* generate = app.add_subcommand("generate", "Create or extend a run and fill its synthetic deficit");
  generate->add_option("config", target_arg, "Run config (JSON) or existing run directory")->required()->check(CLI::ExistingPath);
  generate->add_option("--run-dir", run_dir, "Run directory (default: config output_dir)");
  generate->add_option("--parallel", parallel, "Cap on concurrent generation requests")->check(CLI::PositiveNumber);
  add_output_flags(generate, out);

  auto* validate = app.add_subcommand("validate", "Similarity report for a run; exits 2 on near-duplicates");
  validate->add_option("run_dir", target_arg, "Run directory")->required()->check(CLI::ExistingDirectory);
  add_output_flags(validate, out);

  BaselineArgs base;
  auto* augment = app.add_subcommand("augment-baseline", "SSMBA or EDA synthetic batch for one category");
  augment->add_option("corpus", base.corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  augment->add_option("--format", base.format, "jsonl or csv (default: from extension)");
  augment->add_option("--method", base.method, "ssmba or eda")->capture_default_str()->check(CLI::IsMember({"ssmba", "eda"}));
  augment->add_option("--category", base.category, "Category to augment")->required();
  augment->add_option("--count", base.count, "Examples to produce (default: pool size)");
  augment->add_option("--originals", base.originals, "Draw this many originals as the pool");
  augment->add_option("--max-words", base.max_words, "Truncate texts to this many words")->capture_default_str();
  augment->add_option("--rate", base.rate, "SSMBA mask rate")->capture_default_str();
  augment->add_option("--mask-token", base.mask_token, "SSMBA mask token")->capture_default_str();
  augment->add_option("--fill-mask-url", base.fill_mask_url, "Fill-mask endpoint (default: builtin lexicon)");
  augment->add_option("--ops", base.ops, "EDA operations, comma separated")->capture_default_str();
  augment->add_option("--strength", base.strength, "EDA per-operation strength")->capture_default_str();
  augment->add_option("--seed", base.seed, "Seed")->capture_default_str();
  augment->add_option("--out", base.out, "Output corpus (default: JSONL on stdout)");
  add_output_flags(augment, out);

  auto* cv = app.add_subcommand("cv", "Cross-validate every strategy of a generated run");
  cv->add_option("config", target_arg, "Run config (JSON) or run directory")->required()->check(CLI::ExistingPath);
  cv->add_option("--run-dir", run_dir, "Run directory (default: config output_dir)");
  cv->add_option("--strategies", strategies, "Comma separated subset of none,imputation,ssmba,eda");
  cv->add_option("--trainer-command", trainer_command, "External trainer (default: config, then naive Bayes)");
  add_output_flags(cv, out);

  auto* report = app.add_subcommand("report", "Consolidated summary of a run");
  report->add_option("run_dir", target_arg, "Run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--format", report_format, "md, json or csv")->capture_default_str()->check(CLI::IsMember({"md", "json", "csv"}));
  add_output_flags(report, out);

  std::string cid, decision, note, body_file;
  auto* decide = app.add_subcommand("decide", "Accept or reject one candidate");
  decide->add_option("run_dir", target_arg, "Run directory")->required()->check(CLI::ExistingDirectory);
  decide->add_option("candidate", cid, "Candidate id")->required();
  decide->add_option("decision", decision, "accept or reject")->required()->check(CLI::IsMember({"accept", "reject"}));
  decide->add_option("--note", note, "Reviewer note");

  auto* prompt = app.add_subcommand("edit-prompt", "Store a new prompt version for later generation");
  prompt->add_option("run_dir", target_arg, "Run directory")->required()->check(CLI::ExistingDirectory);
  prompt->add_option("body_file", body_file, "File with the new template body")->required()->check(CLI::ExistingFile);

  std::string addr = "127.0.0.1:8080", data_dir, static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP service");
  serve_cmd->add_option("--addr", addr, "host:port to listen on")->capture_default_str();
  serve_cmd->add_option("--data-dir", data_dir, "Data directory (default: $SYNIMP_DATA_DIR or ./synimp-data)");
  serve_cmd->add_option("--static-dir", static_dir, "Serve these static files under /");

  std::string train, eval, hyper, predictions;
  auto* tp = app.add_subcommand("train-predict", "Built-in naive Bayes over the trainer file protocol");
  tp->add_option("train", train, "train.jsonl")->required();
  tp->add_option("eval", eval, "eval.jsonl")->required();
  tp->add_option("hyperparams", hyper, "hyperparams.json")->required();
  tp->add_option("predictions", predictions, "predictions.jsonl to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*analyze) return cmd_analyze(corpus, format, batch_size, out);
    if (*plan) return cmd_plan(corpus, format, target_total, min_originals, category, originals, out);
    if (*generate) return cmd_generate(target_arg, run_dir, parallel, out);
    if (*validate) return cmd_validate(target_arg, out);
    if (*augment) return cmd_augment(base, out);
    if (*cv) return cmd_cv(target_arg, run_dir, strategies, trainer_command, out);
    if (*report) return cmd_report(target_arg, report_format, out);
    if (*decide) return cmd_decide(target_arg, cid, decision, note);
    if (*prompt) return cmd_prompt(target_arg, body_file);
    if (*serve_cmd) {
      auto options = service_options_from_env();
      if (!data_dir.empty()) options.data_dir = data_dir;
      options.static_dir = static_dir;
      auto colon = addr.rfind(':');
      if (colon == std::string::npos) throw std::invalid_argument("--addr must be host:port");
      return serve(addr.substr(0, colon), std::stoi(addr.substr(colon + 1)), options);
    }
    if (*tp) {
      NaiveBayesTrainer trainer;
      return serve_trainer_protocol(trainer, train, eval, hyper, predictions, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
