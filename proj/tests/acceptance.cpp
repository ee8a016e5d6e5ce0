// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "synimp/baselines.hpp"
#include "synimp/eval.hpp"
#include "synimp/generator.hpp"
#include "synimp/lexicon.hpp"
#include "synimp/pipeline.hpp"
#include "synimp/planner.hpp"
#include "synimp/service.hpp"
#include "synimp/text.hpp"
#include "synimp/validator.hpp"

using namespace synimp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::fabs(got - want) <= tol, os.str());
  }
};

struct Criterion {
  std::string name;
  double limit_s;
  std::function<void(Check&)> body;
};

std::string fmt(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

Corpus desk_corpus() { return load_corpus(test::data_file("nostalgia_desk.jsonl")); }

// ---------------------------------------------------------------------------

void metric_identities(Check& c) {
  const double tol = 0.001;
  c.near(overfit_ratio(0.851, 0.822), 0.035, tol, "overfit_ratio(0.851, 0.822)");
  c.near(overfit_ratio(0.923, 0.895), 0.031, tol, "overfit_ratio(0.923, 0.895)");
  c.near(relative_gain(0.822, 0.471), 0.745, tol, "relative_gain(0.822, 0.471)");
  c.near(relative_gain(0.822, 0.655), 0.255, tol, "relative_gain(0.822, 0.655)");
  c.near(relative_decrease(0.879, 0.711), 0.191, tol, "relative_decrease(0.879, 0.711)");
  c.near(overfit_reduction(0.982, 0.851), 0.133, tol, "overfit_reduction(0.982, 0.851)");
}

void plan_arithmetic(Check& c) {
  using G = std::vector<GridCell>;
  c.expect(plan_experiment_grid(151, {50, 75, 100}) == G{{50, 101}, {75, 76}, {100, 51}},
           "grid(151, [50, 75, 100])");
  c.expect(plan_experiment_grid(218, {50, 75, 100, 150}) ==
               G{{50, 168}, {75, 143}, {100, 118}, {150, 68}},
           "grid(218, [50, 75, 100, 150])");
}

void batch_coverage_check(Check& c) {
  auto a = batch_coverage(200, 2000, 16);
  c.expect(a.num_batches == 125, "(200, 2000, 16) batches = " + std::to_string(a.num_batches));
  c.near(a.per_batch_avg, 1.6, 1e-9, "(200, 2000, 16) per-batch average");
  auto b = batch_coverage(1000, 1000, 16);
  c.expect(b.num_batches == 63, "(1000, 1000, 16) batches = " + std::to_string(b.num_batches));
  const std::size_t full = b.total / b.batch_size;
  const std::size_t last = b.total - full * b.batch_size;
  c.expect(full == 62 && last == 8, "(1000, 1000, 16) should be 62 full batches and one of 8");
}

// Trainer that records what it is shown and predicts the first training label.
class RecordingTrainer final : public Trainer {
 public:
  std::set<std::string> forbidden;  // ids that must never be evaluated
  std::set<std::string> required;   // ids that must always be trained on
  std::size_t violations = 0;
  std::vector<std::string> train_and_predict(const Corpus& train, const std::vector<UnlabeledExample>& eval,
                                             const json&) override {
    for (const auto& e : eval) violations += forbidden.count(e.id);
    std::set<std::string> seen;
    for (const auto& e : train) seen.insert(e.id);
    for (const auto& id : required) violations += !seen.count(id);
    return std::vector<std::string>(eval.size(), train[0].label);
  }
  std::string name() const override { return "recording"; }
};

void cv_structure(Check& c) {
  const auto corpus = desk_corpus();
  c.expect(corpus.size() == 1200, "fixture size " + std::to_string(corpus.size()));
  const auto assignment = stratified_folds(corpus, 10, 10, 17);
  const auto splits = fold_splits(assignment);
  c.expect(splits.size() == 100, "split count " + std::to_string(splits.size()));
  for (std::size_t r = 0; r < 10; ++r) {
    std::vector<int> evaluated(corpus.size(), 0);
    for (const auto& s : splits) {
      if (s.repeat != r) continue;
      std::size_t positives = 0;
      for (auto i : s.eval) {
        ++evaluated[i];
        positives += corpus[i].label == "nostalgic";
      }
      c.expect(positives == 15 || positives == 16,
               "repeat " + std::to_string(r) + " fold " + std::to_string(s.fold) + " has " +
                   std::to_string(positives) + " positives");
      c.expect(s.train.size() + s.eval.size() == corpus.size(), "train and eval do not cover the corpus");
      std::set<std::size_t> tr(s.train.begin(), s.train.end());
      for (auto i : s.eval) c.expect(!tr.count(i), "example in both train and eval");
    }
    c.expect(std::all_of(evaluated.begin(), evaluated.end(), [](int n) { return n == 1; }),
             "repeat " + std::to_string(r) + " does not partition the corpus");
  }

  // Randomized trials with synthetic data in the training pool.
  std::mt19937_64 gen(99);
  std::size_t violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_pos = 6 + gen() % 30, n_neg = 6 + gen() % 60, n_syn = gen() % 40;
    const std::size_t k = 2 + gen() % 5, repeats = 1 + gen() % 3;
    std::vector<LabeledExample> orig, syn;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i)
      orig.push_back({"o" + std::to_string(i), "text " + std::to_string(i), i < n_pos ? "pos" : "neg"});
    for (std::size_t i = 0; i < n_syn; ++i)
      syn.push_back({"s" + std::to_string(i), "synthetic " + std::to_string(i), "pos", Origin::synthetic_llm});
    RecordingTrainer t;
    for (const auto& s : syn) {
      t.forbidden.insert(s.id);
      t.required.insert(s.id);
    }
    CvConfig cfg;
    cfg.k = k;
    cfg.repeats = repeats;
    cfg.seed = gen();
    auto report = cross_validate(Corpus(orig), Corpus(syn), t, cfg);
    violations += t.violations;
    c.expect(!report.failed, "trial " + std::to_string(trial) + " failed: " + report.error);
    c.expect(report.fits.size() == k * repeats, "trial " + std::to_string(trial) + " fit count");
  }
  c.expect(violations == 0, std::to_string(violations) + " synthetic examples leaked into eval folds");
}

void masking_statistics(Check& c) {
  std::mt19937_64 gen(2024);
  double sum_fraction = 0.0;
  std::size_t altered = 0, bad_length = 0;
  BuiltinLexicalProvider provider(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 5 + gen() % 56;
    std::vector<std::string> words;
    for (std::size_t w = 0; w < n; ++w) words.emplace_back(lexicon::pick(gen()));
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    MaskingConfig cfg{0.4, "<mask>", gen()};
    auto masked = mask_tokens(text, cfg);
    sum_fraction += static_cast<double>(masked.positions.size()) / static_cast<double>(n);
    auto out = split_words(reconstruct(masked.text(), provider, cfg.mask_token));
    if (out.size() != n) {
      ++bad_length;
      continue;
    }
    std::set<std::size_t> pos(masked.positions.begin(), masked.positions.end());
    for (std::size_t w = 0; w < n; ++w)
      if (!pos.count(w) && out[w] != words[w]) ++altered;
  }
  c.near(sum_fraction / 1000.0, 0.40, 0.02, "mean masked fraction");
  c.expect(bad_length == 0, std::to_string(bad_length) + " reconstructions changed the word count");
  c.expect(altered == 0, std::to_string(altered) + " unmasked tokens altered");
}

SimilarityReport mock_batch(const Corpus& pool, double s, std::size_t count) {
  MockProvider provider(s);
  GenerationOptions opts;
  opts.master_seed = 7;
  opts.parallel = 1;
  auto result = run_generation(pool, count, builtin_template("nostalgia"), provider, opts);
  return validate_batch(result.records, pool);
}

void validator_bounds(Check& c) {
  const std::string a = "we remember the old days on the farm";
  c.near(ngram_jaccard(a, a, 1), 1.0, 0.0, "identity Jaccard");
  c.near(ngram_jaccard(a, "completely different words here", 1), 0.0, 0.0, "disjoint Jaccard");
  const auto pool = desk_corpus().with_label("nostalgic");
  double previous = -1.0;
  for (double s : {0.1, 0.5, 0.9}) {
    auto r = mock_batch(pool, s, 101);
    const double m = r.summary.mean_max_jaccard_vs_original;
    c.expect(m >= previous, "mean max Jaccard decreases at s=" + fmt(s, 1) + ": " + fmt(m) + " < " + fmt(previous));
    previous = m;
  }
  auto exact = mock_batch(pool, 1.0, 101);
  c.expect(exact.summary.flag_counts["near_duplicate"] == 101,
           "s=1.0 flagged " + std::to_string(exact.summary.flag_counts["near_duplicate"]) + " of 101");
  auto loose = mock_batch(pool, 0.1, 101);
  c.expect(loose.summary.flag_counts["near_duplicate"] == 0,
           "s=0.1 flagged " + std::to_string(loose.summary.flag_counts["near_duplicate"]) + " of 101");
}

json mock_config(const fs::path& corpus, const std::vector<std::size_t>& sizes, std::size_t repeats) {
  return {{"run_id", "accept"},
          {"corpus", fs::absolute(corpus).string()},
          {"category", "nostalgic"},
          {"original_sizes", sizes},
          {"template", "nostalgia"},
          {"provider", {{"kind", "mock"}, {"similarity", 0.5}}},
          {"master_seed", 7},
          {"k", 10},
          {"repeats", repeats},
          {"strategies", {"none", "imputation", "ssmba", "eda"}}};
}

const json* find_cell(const json& metrics, const std::string& strategy, std::size_t originals) {
  for (const auto& cell : metrics["cells"])
    if (cell["strategy"] == strategy && cell["original_count"] == originals) return &cell;
  return nullptr;
}

void end_to_end_direction(Check& c) {
  test::TempDir dir;
  auto run = Run::create(dir / "run", run_config_from_json(mock_config(test::data_file("nostalgia_desk.jsonl"), {50}, 10)));
  auto gen = run->generate();
  c.expect(gen.failures.empty() && gen.records.size() == 101,
           "generated " + std::to_string(gen.records.size()) + " of 101");
  auto metrics = json::parse(run->evaluate());
  const auto* none = find_cell(metrics, "none", 50);
  const auto* imp = find_cell(metrics, "imputation", 50);
  const auto* ssmba = find_cell(metrics, "ssmba", 50);
  const auto* eda = find_cell(metrics, "eda", 50);
  if (!none || !imp || !ssmba || !eda) {
    c.expect(false, "missing cells in metrics");
    return;
  }
  const double f_none = (*none)["class_f1"]["nostalgic"]["mean"];
  const double f_imp = (*imp)["class_f1"]["nostalgic"]["mean"];
  c.expect(f_imp > f_none, "minority F1 imputation " + fmt(f_imp) + " <= none " + fmt(f_none));
  auto sim = [](const json& cell) { return cell["synthetic_similarity"]["mean_max_jaccard_vs_original"].get<double>(); };
  c.expect(sim(*ssmba) > sim(*imp), "ssmba similarity " + fmt(sim(*ssmba)) + " <= imputation " + fmt(sim(*imp)));
  c.expect(sim(*eda) > sim(*imp), "eda similarity " + fmt(sim(*eda)) + " <= imputation " + fmt(sim(*imp)));
  std::cout << "  minority F1 none " << fmt(f_none) << ", imputation " << fmt(f_imp)
            << "; similarity imputation " << fmt(sim(*imp)) << ", ssmba " << fmt(sim(*ssmba)) << ", eda "
            << fmt(sim(*eda)) << "\n";
}

std::string cli_report(const fs::path& work, const json& config) {
  fs::create_directories(work);
  test::spit(work / "config.json", config.dump(2));
  const std::string cli = SYNIMP_CLI;
  const std::string run_dir = (work / "run").string();
  auto g = test::run(cli + " generate " + (work / "config.json").string() + " --run-dir " + run_dir + " >/dev/null");
  auto v = test::run(cli + " cv " + run_dir + " >/dev/null");
  if (g.first != 0 || v.first != 0) return "cli failed";
  return test::slurp(work / "run" / "metrics.json");
}

std::string service_report(const fs::path& data_dir, const json& config) {
  ServiceOptions opts;
  opts.data_dir = data_dir;
  Service service(opts);
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(300, 0);
  std::string out = "service failed";
  auto created = cli.Post("/runs", config.dump(), "application/json");
  if (created && created->status == 201) {
    const std::string id = config["run_id"];
    auto g = cli.Post("/runs/" + id + "/generate", "", "application/json");
    service.wait_idle(id);
    auto e = cli.Post("/runs/" + id + "/evaluate", "{}", "application/json");
    service.wait_idle(id);
    auto r = cli.Get("/runs/" + id + "/report");
    if (g && g->status == 202 && e && e->status == 202 && r && r->status == 200) out = r->body;
  }
  server.stop();
  t.join();
  return out;
}

void determinism(Check& c) {
  test::TempDir dir;
  const auto config = mock_config(test::data_file("nostalgia_desk.jsonl"), {50, 100}, 2);
  const auto a = cli_report(dir / "a", config);
  const auto b = cli_report(dir / "b", config);
  const auto s = service_report(dir / "svc", config);
  c.expect(a != "cli failed" && b != "cli failed", "CLI run failed");
  c.expect(s != "service failed", "service run failed");
  c.expect(a == b, "two CLI runs differ");
  c.expect(a == s, "service report differs from the CLI report");
  c.expect(test::slurp(dir / "a" / "run" / "report.csv") == test::slurp(dir / "b" / "run" / "report.csv"),
           "report.csv differs between CLI runs");
}

// Confusion-matrix oracle.
F1Scores oracle_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(pred.begin(), pred.end());
  std::map<std::string, std::map<std::string, int>> m;
  for (std::size_t i = 0; i < gold.size(); ++i) ++m[gold[i]][pred[i]];
  F1Scores out;
  for (const auto& l : labels) {
    int tp = m[l][l], row = 0, col = 0;
    for (const auto& o : labels) {
      row += m[l][o];
      col += m[o][l];
    }
    const int fp = col - tp, fn = row - tp;
    ClassScore s;
    s.precision = col ? static_cast<double>(tp) / col : 0.0;
    s.recall = row ? static_cast<double>(tp) / row : 0.0;
    s.f1 = (2 * tp + fp + fn) ? 2.0 * tp / (2 * tp + fp + fn) : 0.0;
    s.support = static_cast<std::size_t>(row);
    out.per_class[l] = s;
    out.weighted_f1 += s.f1 * row / static_cast<double>(gold.size());
    out.macro_f1 += s.f1 / static_cast<double>(labels.size());
  }
  return out;
}

void f1_oracle(Check& c) {
  std::mt19937_64 gen(31337);
  const std::vector<std::string> names = {"a", "b", "c", "d"};
  const double tol = 1e-12;  // rounding only
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 20, classes = 1 + gen() % 4;
    std::vector<std::string> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(names[gen() % classes]);
      pred.push_back(names[gen() % classes]);
    }
    auto got = f1_scores(gold, pred);
    auto want = oracle_f1(gold, pred);
    bool ok = got.per_class.size() == want.per_class.size() &&
              std::fabs(got.weighted_f1 - want.weighted_f1) <= tol &&
              std::fabs(got.macro_f1 - want.macro_f1) <= tol;
    for (const auto& [l, w] : want.per_class) {
      auto it = got.per_class.find(l);
      ok = ok && it != got.per_class.end() && it->second.support == w.support &&
           std::fabs(it->second.precision - w.precision) <= tol &&
           std::fabs(it->second.recall - w.recall) <= tol && std::fabs(it->second.f1 - w.f1) <= tol;
    }
    mismatches += !ok;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " of 1000 instances differ from the oracle");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"metric identities", 1, metric_identities},
      {"plan arithmetic", 1, plan_arithmetic},
      {"batch coverage", 1, batch_coverage_check},
      {"cv structure", 10, cv_structure},
      {"masking statistics", 10, masking_statistics},
      {"validator bounds and monotonicity", 30, validator_bounds},
      {"end-to-end direction", 120, end_to_end_direction},
      {"determinism", 120, determinism},
      {"f1 oracle equivalence", 5, f1_oracle},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= cr.limit_s)
      check.failures.push_back("took " + fmt(secs, 2) + " s, limit " + fmt(cr.limit_s, 0) + " s");
    const bool ok = check.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << cr.name << " (" << fmt(secs, 2) << " s, limit "
              << fmt(cr.limit_s, 0) << " s)";
    for (const auto& f : check.failures) std::cout << "\n  " << f;
    std::cout << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
