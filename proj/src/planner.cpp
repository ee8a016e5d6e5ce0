#include "synimp/planner.hpp"

#include <algorithm>
#include <stdexcept>

namespace synimp {

BatchCoverage batch_coverage(std::size_t category_count, std::size_t total,
                             std::size_t batch_size, std::string category) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (total == 0) throw std::invalid_argument("total must be >= 1");
  if (category_count > total)
    throw std::invalid_argument("category count " + std::to_string(category_count) +
                                " exceeds total " + std::to_string(total));
  BatchCoverage bc;
  bc.category = std::move(category);
  bc.category_count = category_count;
  bc.total = total;
  bc.batch_size = batch_size;
  bc.num_batches = (total + batch_size - 1) / batch_size;
  bc.per_batch_avg = static_cast<double>(category_count) / static_cast<double>(bc.num_batches);
  return bc;
}

std::vector<BatchCoverage> batch_coverage_table(const LabelDistribution& dist,
                                                std::size_t batch_size) {
  std::vector<BatchCoverage> out;
  for (const auto& [label, n] : dist.counts)
    out.push_back(batch_coverage(n, dist.total, batch_size, label));
  return out;
}

ImputationPlan make_plan(const LabelDistribution& dist, std::size_t target_total,
                         std::size_t min_originals) {
  if (target_total == 0) throw std::invalid_argument("target_total must be >= 1");
  if (min_originals == 0) throw std::invalid_argument("min_originals must be >= 1");
  ImputationPlan plan;
  for (const auto& [label, n] : dist.counts) {
    if (n == 0)
      throw std::invalid_argument("category '" + label + "' has no originals to sample from");
    PlanEntry e;
    e.original_count = n;
    e.target_total = target_total;
    e.synthetic_needed = target_total > n ? target_total - n : 0;
    plan.entries[label] = e;
    if (n < min_originals) {
      plan.warnings.push_back("category '" + label + "' has " + std::to_string(n) +
                              " originals, below " + std::to_string(min_originals) +
                              ": synthetic texts will vary little and overfitting risk is "
                              "elevated");
    } else if (n < kComfortableOriginals && e.synthetic_needed > 0) {
      plan.warnings.push_back("category '" + label + "' has " + std::to_string(n) +
                              " originals (under " + std::to_string(kComfortableOriginals) +
                              "): expect F1 inflated by roughly 2-4%; report a penalized score");
    }
  }
  return plan;
}

std::size_t default_target_total(const LabelDistribution& dist) {
  std::size_t largest = 0;
  for (const auto& [label, n] : dist.counts) largest = std::max(largest, n);
  return std::max(kMinCategoryTotal, largest);
}

std::vector<GridCell> plan_experiment_grid(std::size_t full_count,
                                           const std::vector<std::size_t>& original_sizes) {
  std::vector<GridCell> grid;
  grid.reserve(original_sizes.size());
  for (std::size_t n : original_sizes) {
    if (n > full_count)
      throw std::invalid_argument("grid size " + std::to_string(n) + " exceeds full count " +
                                  std::to_string(full_count));
    grid.push_back({n, full_count - n});
  }
  return grid;
}

}  // namespace synimp
