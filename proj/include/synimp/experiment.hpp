#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "synimp/baselines.hpp"
#include "synimp/corpus.hpp"
#include "synimp/eval.hpp"
#include "synimp/planner.hpp"
#include "synimp/validator.hpp"

namespace synimp {

enum class Strategy { none, imputation, ssmba, eda };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct BaselineSettings {
  MaskingConfig masking;
  std::set<EdaOp> eda_ops = {EdaOp::random_swap, EdaOp::random_delete, EdaOp::random_insert};
  double eda_strength = 0.1;
};

struct ExperimentConfig {
  std::string category;
  std::vector<std::size_t> original_sizes;
  // Per-cell total (originals + synthetic). Unset means the full category
  // count, so every cell matches the size of the true model's category.
  std::optional<std::size_t> target_total;
  std::vector<Strategy> strategies = {Strategy::none, Strategy::imputation, Strategy::ssmba};
  std::uint64_t master_seed = 0;
  CvConfig cv;
  BaselineSettings baselines;
  SimilarityThresholds thresholds;
};

// Originals of `category` used by the cell with `original_count` originals.
// Generation and evaluation both call this, so they see the same subset.
Corpus cell_pool(const Corpus& full, const std::string& category, std::size_t original_count,
                 std::uint64_t master_seed);

struct ExperimentCell {
  CvReport report;
  // Similarity of the cell's synthetic training data to its originals;
  // absent when the cell has no synthetic data.
  std::optional<SimilaritySummary> synthetic_similarity;
};

struct ExperimentReport {
  std::string category;
  std::size_t full_count = 0;
  std::vector<ExperimentCell> cells;  // grid order, strategies in config order, then "true"
};

// Synthetic examples for the imputation strategy of one cell.
using ImputationSource = std::function<Corpus(const GridCell& cell, const Corpus& pool)>;

// One CvReport per (original_count, strategy) plus the full-data "true" cell.
// A cell whose trainer fails is marked failed and the run continues.
ExperimentReport run_experiment(const Corpus& full, const ExperimentConfig& config,
                                const ImputationSource& imputation, Trainer& trainer);

std::vector<GridCell> experiment_grid(std::size_t full_count, const ExperimentConfig& config);

const ExperimentCell* find_cell(const ExperimentReport& r, std::string_view strategy,
                                std::size_t original_count);

}  // namespace synimp
