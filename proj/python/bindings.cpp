// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the package wrapper.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "synimp/baselines.hpp"
#include "synimp/classifier.hpp"
#include "synimp/eval.hpp"
#include "synimp/json_io.hpp"
#include "synimp/pipeline.hpp"
#include "synimp/planner.hpp"
#include "synimp/trainer.hpp"
#include "synimp/validator.hpp"

namespace py = pybind11;
using namespace synimp;
using nlohmann::json;

namespace {

std::string analyze(const std::filesystem::path& corpus, std::size_t batch_size) {
  auto dist = label_distribution(load_corpus(corpus));
  return json{{"distribution", dist}, {"batch_size", batch_size},
              {"batch_coverage", batch_coverage_table(dist, batch_size)}}
      .dump();
}

std::string plan(const std::filesystem::path& corpus, std::optional<std::size_t> target,
                 std::size_t min_originals) {
  auto dist = label_distribution(load_corpus(corpus));
  return json(make_plan(dist, target ? *target : default_target_total(dist), min_originals)).dump();
}

std::string f1(const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
  auto s = f1_scores(gold, predicted);
  json per = json::object();
  for (const auto& [label, c] : s.per_class)
    per[label] = {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  return json{{"per_class", per}, {"weighted_f1", s.weighted_f1}, {"macro_f1", s.macro_f1}}.dump();
}

std::string augment(const std::filesystem::path& corpus, const std::string& method,
                    const std::string& category, std::size_t count, std::uint64_t seed) {
  auto pool = load_corpus(corpus).with_label(category);
  if (pool.empty()) throw std::invalid_argument("category '" + category + "' not in corpus");
  std::vector<AugmentedExample> batch;
  if (method == "ssmba") {
    BuiltinLexicalProvider provider(seed);
    batch = ssmba_augment(pool, count, MaskingConfig{kDefaultMaskRate, "<mask>", seed}, provider, seed);
  } else if (method == "eda") {
    batch = eda_augment(pool, count, BaselineSettings{}.eda_ops, 0.1, seed);
  } else {
    throw std::invalid_argument("method must be ssmba or eda");
  }
  json out = json::array();
  for (const auto& b : batch)
    out.push_back({{"id", b.example.id}, {"text", b.example.text}, {"label", b.example.label},
                   {"origin", std::string(to_string(b.example.origin))}, {"source_id", b.source_id}});
  return out.dump();
}

// Thin holder so Python never sees a dangling Run.
struct PyRun {
  std::unique_ptr<Run> run;

  std::string record() const { return json(run->record()).dump(); }
  std::string candidates() const { return json(run->candidates()).dump(); }
  std::size_t generate() {
    py::gil_scoped_release release;
    auto result = run->generate();
    if (!result.failures.empty())
      throw std::runtime_error(std::to_string(result.failures.size()) + " candidates failed");
    return result.records.size();
  }
  std::string validate() {
    py::gil_scoped_release release;
    return run->validate().dump();
  }
  std::string evaluate(std::optional<std::vector<std::string>> strategies) {
    std::optional<std::vector<Strategy>> s;
    if (strategies) {
      s.emplace();
      for (const auto& name : *strategies) s->push_back(strategy_from_string(name));
    }
    py::gil_scoped_release release;
    return run->evaluate(nullptr, s);
  }
  std::string decide(const std::string& cid, const std::string& decision, const std::string& note) {
    CandidateStatus status;
    if (decision == "accept") status = CandidateStatus::accepted;
    else if (decision == "reject") status = CandidateStatus::rejected;
    else throw std::invalid_argument("decision must be 'accept' or 'reject'");
    return json(run->decide(cid, status, note)).dump();
  }
  int edit_prompt(const std::string& body) { return run->edit_prompt(body).version; }
};

}  // namespace

PYBIND11_MODULE(_synimp, m) {
  m.doc() = "synimp core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CorpusError>(m, "CorpusError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_KeyError);
  py::register_exception<TrainerError>(m, "TrainerError", PyExc_RuntimeError);

  m.def("analyze", &analyze, py::arg("corpus"), py::arg("batch_size") = 16);
  m.def("plan", &plan, py::arg("corpus"), py::arg("target") = std::nullopt,
        py::arg("min_originals") = kMinOriginals);
  m.def("plan_experiment_grid", [](std::size_t full, const std::vector<std::size_t>& sizes) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& c : plan_experiment_grid(full, sizes)) out.emplace_back(c.original, c.synthetic);
    return out;
  });
  m.def("batch_coverage", [](std::size_t count, std::size_t total, std::size_t batch_size) {
    auto b = batch_coverage(count, total, batch_size);
    return std::make_pair(b.num_batches, b.per_batch_avg);
  });

  m.def("overfit_ratio", &overfit_ratio);
  m.def("relative_gain", &relative_gain);
  m.def("relative_decrease", &relative_decrease);
  m.def("overfit_reduction", &overfit_reduction);
  m.def("penalized_score", &penalized_score, py::arg("f1"), py::arg("penalty") = kDefaultOverfitPenalty);
  m.def("f1_scores", &f1);

  m.def("ngram_jaccard", &ngram_jaccard, py::arg("a"), py::arg("b"), py::arg("n") = 1);
  m.def("ngram_containment", &ngram_containment, py::arg("candidate"), py::arg("reference"), py::arg("n") = 5);
  m.def("mask_tokens", [](const std::string& text, double rate, std::uint64_t seed, const std::string& token) {
    auto masked = mask_tokens(text, MaskingConfig{rate, token, seed});
    return std::make_pair(masked.text(), masked.positions);
  }, py::arg("text"), py::arg("rate") = kDefaultMaskRate, py::arg("seed") = 0, py::arg("mask_token") = "<mask>");
  m.def("augment", &augment, py::arg("corpus"), py::arg("method"), py::arg("category"), py::arg("count"),
        py::arg("seed") = 0);

  m.def("finetune_hyperparams", [](bool cross_lingual) { return finetune_hyperparams(cross_lingual).dump(); },
        py::arg("cross_lingual") = false);
  m.def("train_predict", [](const std::filesystem::path& train, const std::filesystem::path& eval,
                            const std::filesystem::path& hyper, const std::filesystem::path& predictions) {
    NaiveBayesTrainer nb;
    std::ostringstream err;
    int code = serve_trainer_protocol(nb, train, eval, hyper, predictions, err);
    if (code != 0) throw TrainerError(err.str());
  });

  py::class_<PyRun>(m, "Run")
      .def_static("create", [](const std::filesystem::path& dir, const std::string& config,
                               const std::filesystem::path& base_dir) {
        return PyRun{Run::create(dir, run_config_from_json(json::parse(config), base_dir))};
      }, py::arg("dir"), py::arg("config"), py::arg("base_dir") = std::filesystem::path())
      .def_static("open", [](const std::filesystem::path& dir) { return PyRun{Run::open(dir)}; })
      .def("record", &PyRun::record)
      .def("candidates", &PyRun::candidates)
      .def("generate", &PyRun::generate)
      .def("validate", &PyRun::validate)
      .def("evaluate", &PyRun::evaluate, py::arg("strategies") = std::nullopt)
      .def("decide", &PyRun::decide, py::arg("candidate_id"), py::arg("decision"), py::arg("note") = "")
      .def("edit_prompt", &PyRun::edit_prompt);
}
