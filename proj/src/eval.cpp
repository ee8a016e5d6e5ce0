#include "synimp/eval.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "synimp/rng.hpp"

namespace synimp {

FoldAssignment stratified_folds(const Corpus& c, std::size_t k, std::size_t repeats,
                                std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (repeats < 1) throw std::invalid_argument("cross-validation needs at least one repeat");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (const auto& label : c.labels()) by_class[label];
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].origin == Origin::original) by_class[c[i].label].push_back(i);

  FoldAssignment a;
  a.k = k;
  a.repeats = repeats;
  for (const auto& [label, members] : by_class) {
    if (members.empty())
      throw std::invalid_argument("class '" + label + "' has no original examples");
    if (members.size() < k)
      a.warnings.push_back("class '" + label + "' has " + std::to_string(members.size()) +
                           " originals, fewer than k = " + std::to_string(k) +
                           "; some folds hold none");
  }
  a.fold_of.assign(repeats, std::vector<std::size_t>(c.size(), kNoFold));
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng(derive_seed(seed, r));
    // Rotating the start fold per class keeps overall fold sizes level too.
    std::size_t offset = 0;
    for (const auto& [label, members] : by_class) {
      auto order = members;
      rng.shuffle(order);
      for (std::size_t i = 0; i < order.size(); ++i) a.fold_of[r][order[i]] = (offset + i) % k;
      offset = (offset + order.size()) % k;
    }
  }
  return a;
}

std::vector<FoldSplit> fold_splits(const FoldAssignment& a) {
  std::vector<FoldSplit> out;
  out.reserve(a.repeats * a.k);
  for (std::size_t r = 0; r < a.repeats; ++r) {
    for (std::size_t f = 0; f < a.k; ++f) {
      FoldSplit s;
      s.repeat = r;
      s.fold = f;
      const auto& folds = a.fold_of[r];
      for (std::size_t i = 0; i < folds.size(); ++i) {
        if (folds[i] == f) s.eval.push_back(i);
        else s.train.push_back(i);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

F1Scores f1_scores(const std::vector<std::string>& gold, const std::vector<std::string>& predicted) {
  if (gold.size() != predicted.size())
    throw std::invalid_argument("f1_scores: " + std::to_string(gold.size()) + " gold labels vs " +
                                std::to_string(predicted.size()) + " predictions");
  if (gold.empty()) throw std::invalid_argument("f1_scores: empty input");
  std::map<std::string, std::size_t> tp, fp, fn;
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(predicted.begin(), predicted.end());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) {
      ++tp[gold[i]];
    } else {
      ++fp[predicted[i]];
      ++fn[gold[i]];
    }
  }
  F1Scores out;
  double weighted = 0.0;
  double macro = 0.0;
  for (const auto& l : labels) {
    ClassScore s;
    const double t = static_cast<double>(tp[l]);
    const double p_den = t + static_cast<double>(fp[l]);
    const double r_den = t + static_cast<double>(fn[l]);
    s.precision = p_den > 0 ? t / p_den : 0.0;
    s.recall = r_den > 0 ? t / r_den : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    s.support = tp[l] + fn[l];
    weighted += s.f1 * static_cast<double>(s.support);
    macro += s.f1;
    out.per_class[l] = s;
  }
  out.weighted_f1 = weighted / static_cast<double>(gold.size());
  out.macro_f1 = macro / static_cast<double>(labels.size());
  return out;
}

double overfit_ratio(double f1_synthetic, double f1_true) {
  if (f1_true == 0.0) throw std::invalid_argument("overfit_ratio: true F1 is zero");
  return (f1_synthetic - f1_true) / f1_true;
}

double relative_gain(double f1_reference, double f1_baseline) {
  if (f1_baseline == 0.0) throw std::invalid_argument("relative_gain: baseline F1 is zero");
  return (f1_reference - f1_baseline) / f1_baseline;
}

double relative_decrease(double f1_reference, double f1_degraded) {
  if (f1_reference == 0.0) throw std::invalid_argument("relative_decrease: reference F1 is zero");
  return (f1_reference - f1_degraded) / f1_reference;
}

double overfit_reduction(double f1_ssmba, double f1_imputation) {
  if (f1_ssmba == 0.0) throw std::invalid_argument("overfit_reduction: SSMBA F1 is zero");
  return (f1_ssmba - f1_imputation) / f1_ssmba;
}

double penalized_score(double f1, double penalty) {
  if (!(penalty >= 0.0 && penalty < 1.0))
    throw std::invalid_argument("penalty must be in [0, 1)");
  return f1 * (1.0 - penalty);
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ScoreStats score_stats(const std::vector<double>& per_fit, std::size_t repeats, std::size_t k) {
  ScoreStats s;
  s.mean = mean_of(per_fit);
  s.sd_fits = sample_sd(per_fit);
  if (repeats > 0 && per_fit.size() == repeats * k) {
    std::vector<double> repeat_means;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<double> chunk(per_fit.begin() + static_cast<std::ptrdiff_t>(r * k),
                                per_fit.begin() + static_cast<std::ptrdiff_t>((r + 1) * k));
      repeat_means.push_back(mean_of(chunk));
    }
    s.sd_repeats = sample_sd(repeat_means);
  }
  return s;
}

CvReport cross_validate(const Corpus& originals, const Corpus& synthetic, Trainer& trainer,
                        const CvConfig& config) {
  CvReport report;
  report.k = config.k;
  report.repeats = config.repeats;
  report.original_count = originals.size();
  report.synthetic_count = synthetic.size();

  // Synthetic rows are tagged by origin so the fold assignment leaves them
  // out of every evaluation fold.
  std::vector<LabeledExample> rows = originals.examples();
  for (auto& e : rows) e.origin = Origin::original;
  for (auto e : synthetic) {
    if (e.origin == Origin::original) e.origin = Origin::synthetic_llm;
    rows.push_back(std::move(e));
  }
  Corpus all(std::move(rows));
  auto assignment = stratified_folds(all, config.k, config.repeats, config.seed);
  report.warnings = assignment.warnings;

  for (const auto& split : fold_splits(assignment)) {
    std::vector<LabeledExample> train_rows;
    train_rows.reserve(split.train.size());
    for (auto i : split.train) train_rows.push_back(all[i]);
    std::vector<UnlabeledExample> eval_rows;
    std::vector<std::string> gold;
    for (auto i : split.eval) {
      eval_rows.push_back({all[i].id, all[i].text});
      gold.push_back(all[i].label);
    }
    if (eval_rows.empty()) continue;
    auto predicted = trainer.train_and_predict(Corpus(std::move(train_rows)), eval_rows,
                                               config.hyperparams);
    if (predicted.size() != gold.size())
      throw TrainerError("trainer returned " + std::to_string(predicted.size()) +
                         " predictions for " + std::to_string(gold.size()) + " eval examples");
    auto scores = f1_scores(gold, predicted);
    FitScore fit;
    fit.repeat = split.repeat;
    fit.fold = split.fold;
    for (const auto& label : all.labels()) {
      auto it = scores.per_class.find(label);
      fit.class_f1[label] = it == scores.per_class.end() ? 0.0 : it->second.f1;
    }
    fit.weighted_f1 = scores.weighted_f1;
    fit.macro_f1 = scores.macro_f1;
    report.fits.push_back(std::move(fit));
  }

  const std::size_t expected = config.repeats * config.k;
  const bool complete = report.fits.size() == expected;
  auto collect = [&](auto get) {
    std::vector<double> v;
    v.reserve(report.fits.size());
    for (const auto& f : report.fits) v.push_back(get(f));
    return score_stats(v, complete ? config.repeats : 0, config.k);
  };
  for (const auto& label : all.labels())
    report.class_f1[label] = collect([&](const FitScore& f) { return f.class_f1.at(label); });
  report.weighted_f1 = collect([](const FitScore& f) { return f.weighted_f1; });
  report.macro_f1 = collect([](const FitScore& f) { return f.macro_f1; });
  return report;
}

}  // namespace synimp
