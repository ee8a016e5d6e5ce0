#include "synimp/experiment.hpp"

#include <stdexcept>

#include "synimp/rng.hpp"

namespace synimp {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::imputation: return "imputation";
    case Strategy::ssmba: return "ssmba";
    case Strategy::eda: return "eda";
  }
  return "none";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "none") return Strategy::none;
  if (s == "imputation") return Strategy::imputation;
  if (s == "ssmba") return Strategy::ssmba;
  if (s == "eda") return Strategy::eda;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

Corpus cell_pool(const Corpus& full, const std::string& category, std::size_t original_count,
                 std::uint64_t master_seed) {
  auto seed = derive_seed(master_seed, "subset:" + category + ":" + std::to_string(original_count));
  return draw_category_subset(full, category, original_count, seed);
}

namespace {

std::vector<SimilarityInput> similarity_inputs(const std::vector<AugmentedExample>& batch) {
  std::vector<SimilarityInput> out;
  for (const auto& a : batch) out.push_back({a.example.id, a.example.text, {a.source_id}});
  return out;
}

std::vector<SimilarityInput> similarity_inputs(const Corpus& batch) {
  std::vector<SimilarityInput> out;
  for (const auto& e : batch) out.push_back({e.id, e.text, {}});
  return out;
}

}  // namespace

ExperimentReport run_experiment(const Corpus& full, const ExperimentConfig& config,
                                const ImputationSource& imputation, Trainer& trainer) {
  if (!full.contains_label(config.category))
    throw std::invalid_argument("category '" + config.category + "' not in corpus");
  ExperimentReport report;
  report.category = config.category;
  const Corpus others = full.without_label(config.category);
  report.full_count = full.size() - others.size();
  const auto grid = experiment_grid(report.full_count, config);

  auto run_cell = [&](std::string strategy, const GridCell& cell, const Corpus& pool,
                      const Corpus& synthetic, std::optional<SimilaritySummary> sim) {
    ExperimentCell out;
    CvConfig cv = config.cv;
    cv.seed = derive_seed(config.master_seed, "cv:" + std::to_string(cell.original));
    try {
      out.report = cross_validate(others.merged(pool), synthetic, trainer, cv);
    } catch (const std::exception& e) {
      out.report.failed = true;
      out.report.error = e.what();
      out.report.k = cv.k;
      out.report.repeats = cv.repeats;
    }
    out.report.strategy = std::move(strategy);
    out.report.original_count = cell.original;
    out.report.synthetic_count = synthetic.size();
    out.synthetic_similarity = std::move(sim);
    report.cells.push_back(std::move(out));
  };

  for (const auto& cell : grid) {
    const Corpus pool = cell_pool(full, config.category, cell.original, config.master_seed);
    for (Strategy s : config.strategies) {
      Corpus synthetic;
      std::optional<SimilaritySummary> sim;
      const auto cell_seed =
          derive_seed(config.master_seed, std::string(to_string(s)) + ":" + std::to_string(cell.original));
      try {
        switch (s) {
          case Strategy::none:
            break;
          case Strategy::imputation:
            if (!imputation) throw std::invalid_argument("no imputation source configured");
            synthetic = imputation(cell, pool);
            break;
          case Strategy::ssmba: {
            BuiltinLexicalProvider provider(cell_seed);
            auto batch = ssmba_augment(pool, cell.synthetic, config.baselines.masking, provider,
                                       cell_seed, "ssmba-" + std::to_string(cell.original));
            synthetic = to_corpus(batch);
            sim = assess_similarity(similarity_inputs(batch), pool, config.thresholds).summary;
            break;
          }
          case Strategy::eda: {
            auto batch = eda_augment(pool, cell.synthetic, config.baselines.eda_ops,
                                     config.baselines.eda_strength, cell_seed,
                                     "eda-" + std::to_string(cell.original));
            synthetic = to_corpus(batch);
            sim = assess_similarity(similarity_inputs(batch), pool, config.thresholds).summary;
            break;
          }
        }
        if (s == Strategy::imputation && !synthetic.empty())
          sim = assess_similarity(similarity_inputs(synthetic), pool, config.thresholds).summary;
      } catch (const std::exception& e) {
        ExperimentCell failed;
        failed.report.strategy = std::string(to_string(s));
        failed.report.original_count = cell.original;
        failed.report.k = config.cv.k;
        failed.report.repeats = config.cv.repeats;
        failed.report.failed = true;
        failed.report.error = e.what();
        report.cells.push_back(std::move(failed));
        continue;
      }
      run_cell(std::string(to_string(s)), cell, pool, synthetic, std::move(sim));
    }
  }
  run_cell("true", GridCell{report.full_count, 0}, full.with_label(config.category), Corpus{},
           std::nullopt);
  return report;
}

std::vector<GridCell> experiment_grid(std::size_t full_count, const ExperimentConfig& config) {
  if (!config.target_total) return plan_experiment_grid(full_count, config.original_sizes);
  std::vector<GridCell> grid;
  for (std::size_t n : config.original_sizes) {
    if (n > full_count)
      throw std::invalid_argument("grid size " + std::to_string(n) + " exceeds category count " +
                                  std::to_string(full_count));
    grid.push_back({n, *config.target_total > n ? *config.target_total - n : 0});
  }
  return grid;
}

const ExperimentCell* find_cell(const ExperimentReport& r, std::string_view strategy,
                                std::size_t original_count) {
  for (const auto& c : r.cells)
    if (c.report.strategy == strategy && c.report.original_count == original_count) return &c;
  return nullptr;
}

}  // namespace synimp
