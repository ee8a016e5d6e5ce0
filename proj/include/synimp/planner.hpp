#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synimp/corpus.hpp"

namespace synimp {

// Expected presence of one category in a training batch: the category's
// count spread over ceil(total / batch_size) batches.
struct BatchCoverage {
  std::string category;
  std::size_t category_count = 0;
  std::size_t total = 0;
  std::size_t batch_size = 0;
  std::size_t num_batches = 0;
  double per_batch_avg = 0.0;
};

BatchCoverage batch_coverage(std::size_t category_count, std::size_t total,
                             std::size_t batch_size, std::string category = {});

std::vector<BatchCoverage> batch_coverage_table(const LabelDistribution& dist,
                                                std::size_t batch_size);

inline constexpr std::size_t kMinOriginals = 50;
// Counts in [kMinOriginals, kComfortableOriginals) still overfit slightly.
inline constexpr std::size_t kComfortableOriginals = 75;
inline constexpr std::size_t kMinCategoryTotal = 200;

struct PlanEntry {
  std::size_t original_count = 0;
  std::size_t target_total = 0;
  std::size_t synthetic_needed = 0;
};

struct ImputationPlan {
  std::map<std::string, PlanEntry> entries;
  std::vector<std::string> warnings;
};

// Tops every category up to `target_total`. Throws std::invalid_argument when
// a category has no originals or the parameters are zero.
ImputationPlan make_plan(const LabelDistribution& dist, std::size_t target_total,
                         std::size_t min_originals = kMinOriginals);

// max(200, largest category count).
std::size_t default_target_total(const LabelDistribution& dist);

struct GridCell {
  std::size_t original = 0;
  std::size_t synthetic = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// One cell per size; each cell sums to `full_count`.
std::vector<GridCell> plan_experiment_grid(std::size_t full_count,
                                           const std::vector<std::size_t>& original_sizes);

}  // namespace synimp
