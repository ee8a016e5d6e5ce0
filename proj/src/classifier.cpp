#include "synimp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "synimp/digest.hpp"
#include "synimp/text.hpp"

namespace synimp {

FeatureVector featurize(std::string_view text) {
  auto words = normalized_words(text);
  std::map<std::uint32_t, std::uint32_t> counts;
  auto add = [&](const std::string& key) {
    ++counts[static_cast<std::uint32_t>(fnv1a64(key) % kFeatureBuckets)];
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    add("u\x1f" + words[i]);
    if (i + 1 < words.size()) add("b\x1f" + words[i] + " " + words[i + 1]);
  }
  return {counts.begin(), counts.end()};
}

double NaiveBayesModel::log_likelihood(std::size_t cls, std::uint32_t bucket) const {
  const auto& c = counts_[cls];
  auto it = c.find(bucket);
  double n = it == c.end() ? 0.0 : it->second;
  return std::log(n + alpha_) -
         std::log(totals_[cls] + alpha_ * static_cast<double>(vocab_.size()));
}

std::vector<double> NaiveBayesModel::joint_log_scores(const FeatureVector& x) const {
  std::vector<double> scores(labels_.size());
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    double s = log_prior_[c];
    for (const auto& [bucket, count] : x)
      if (vocab_.count(bucket)) s += count * log_likelihood(c, bucket);
    scores[c] = s;
  }
  return scores;
}

std::string NaiveBayesModel::summary_digest() const {
  std::string buf = "nb-v" + std::to_string(kFeatureHashVersion);
  char tmp[64];
  std::snprintf(tmp, sizeof tmp, "|alpha=%a|vocab=%zu", alpha_, vocab_.size());
  buf += tmp;
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    std::snprintf(tmp, sizeof tmp, "|prior=%a|total=%a|", log_prior_[c], totals_[c]);
    buf += labels_[c] + tmp;
    std::vector<std::pair<std::uint32_t, double>> sorted(counts_[c].begin(), counts_[c].end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [b, n] : sorted) {
      std::snprintf(tmp, sizeof tmp, "%u:%a,", b, n);
      buf += tmp;
    }
  }
  return sha256_hex(buf);
}

NaiveBayesModel train_naive_bayes(const Corpus& train, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("smoothing alpha must be positive");
  if (train.labels().size() < 2)
    throw std::invalid_argument("training needs at least two labels, found " +
                                std::to_string(train.labels().size()));
  NaiveBayesModel m;
  m.alpha_ = alpha;
  m.labels_.assign(train.labels().begin(), train.labels().end());
  const std::size_t k = m.labels_.size();
  std::map<std::string, std::size_t> cls;
  for (std::size_t i = 0; i < k; ++i) cls[m.labels_[i]] = i;
  std::vector<double> docs(k, 0.0);
  m.counts_.resize(k);
  m.totals_.assign(k, 0.0);
  for (const auto& e : train) {
    std::size_t c = cls.at(e.label);
    docs[c] += 1.0;
    for (const auto& [bucket, count] : featurize(e.text)) {
      m.counts_[c][bucket] += count;
      m.vocab_.insert(bucket);
      m.totals_[c] += count;
    }
  }
  const double n = static_cast<double>(train.size());
  for (std::size_t c = 0; c < k; ++c) m.log_prior_.push_back(std::log(docs[c] / n));
  return m;
}

Prediction predict(const NaiveBayesModel& model, std::string_view text) {
  auto scores = model.joint_log_scores(featurize(text));
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  double mx = scores[best];
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  const double log_z = mx + std::log(z);
  Prediction p;
  p.label = model.labels()[best];
  p.log_posterior.reserve(scores.size());
  for (double s : scores) p.log_posterior.push_back(s - log_z);
  return p;
}

std::vector<Prediction> predict(const NaiveBayesModel& model, const Corpus& examples) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(predict(model, e.text));
  return out;
}

std::vector<std::string> NaiveBayesTrainer::train_and_predict(
    const Corpus& train, const std::vector<UnlabeledExample>& eval,
    const nlohmann::json& hyperparams) {
  double alpha = hyperparams.is_object() ? hyperparams.value("alpha", 1.0) : 1.0;
  auto model = train_naive_bayes(train, alpha);
  std::vector<std::string> out;
  out.reserve(eval.size());
  for (const auto& e : eval) out.push_back(predict(model, e.text).label);
  return out;
}

}  // namespace synimp
