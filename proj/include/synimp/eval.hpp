#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "synimp/corpus.hpp"
#include "synimp/trainer.hpp"

namespace synimp {

inline constexpr std::size_t kNoFold = static_cast<std::size_t>(-1);

// Per repeat, the fold of every example (by corpus position). Synthetic
// examples carry kNoFold: they are always training data.
struct FoldAssignment {
  std::size_t k = 0;
  std::size_t repeats = 0;
  std::vector<std::vector<std::size_t>> fold_of;  // [repeat][example]
  std::vector<std::string> warnings;
};

// Stratified repeated k-fold. Within each class, fold sizes differ by at most
// one. Throws std::invalid_argument for k < 2 or a label with no originals.
FoldAssignment stratified_folds(const Corpus& c, std::size_t k, std::size_t repeats,
                                std::uint64_t seed);

struct FoldSplit {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

// repeats * k splits, repeat-major.
std::vector<FoldSplit> fold_splits(const FoldAssignment& a);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct F1Scores {
  std::map<std::string, ClassScore> per_class;  // every label in gold or predicted
  double weighted_f1 = 0.0;  // support-weighted
  double macro_f1 = 0.0;
};

// Throws std::invalid_argument on length mismatch or empty input.
F1Scores f1_scores(const std::vector<std::string>& gold, const std::vector<std::string>& predicted);

// (synthetic - true) / true.
double overfit_ratio(double f1_synthetic, double f1_true);
// (reference - baseline) / baseline. The reference is the true-model score.
double relative_gain(double f1_reference, double f1_baseline);
// (reference - degraded) / reference.
double relative_decrease(double f1_reference, double f1_degraded);
// (ssmba - imputation) / ssmba.
double overfit_reduction(double f1_ssmba, double f1_imputation);
inline constexpr double kDefaultOverfitPenalty = 0.04;
// f1 * (1 - penalty), penalty in [0, 1).
double penalized_score(double f1, double penalty = kDefaultOverfitPenalty);

struct ScoreStats {
  double mean = 0.0;
  double sd_fits = 0.0;     // sample sd over all repeats * k fits
  double sd_repeats = 0.0;  // sample sd over the per-repeat means
};

ScoreStats score_stats(const std::vector<double>& per_fit, std::size_t repeats, std::size_t k);

struct FitScore {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::map<std::string, double> class_f1;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
};

struct CvConfig {
  std::size_t k = 10;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  nlohmann::json hyperparams = nlohmann::json::object();
};

struct CvReport {
  std::string strategy;
  std::size_t original_count = 0;
  std::size_t synthetic_count = 0;
  std::size_t k = 0;
  std::size_t repeats = 0;
  std::map<std::string, ScoreStats> class_f1;
  ScoreStats weighted_f1;
  ScoreStats macro_f1;
  std::vector<FitScore> fits;
  std::vector<std::string> warnings;
  bool failed = false;
  std::string error;
};

// Cross-validates `trainer` on the originals. Every fit trains on the
// non-held-out originals plus all of `synthetic` and is scored on the held-out
// originals only.
CvReport cross_validate(const Corpus& originals, const Corpus& synthetic, Trainer& trainer,
                        const CvConfig& config);

}  // namespace synimp
