#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "synimp/corpus.hpp"
#include "synimp/trainer.hpp"

namespace synimp {

// Feature hashing, version 1: FNV-1a 64 of "u\x1f<word>" for unigrams and
// "b\x1f<word> <word>" for bigrams over normalized words, reduced modulo 2^18.
inline constexpr int kFeatureHashVersion = 1;
inline constexpr std::uint32_t kFeatureBuckets = 1u << 18;

// (bucket, count) pairs sorted by bucket; counts >= 1.
using FeatureVector = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

FeatureVector featurize(std::string_view text);

// Multinomial naive Bayes over hashed features with additive smoothing. The
// smoothing denominator uses the number of buckets seen in training, and
// buckets never seen in training are ignored at prediction time.
class NaiveBayesModel {
 public:
  const std::vector<std::string>& labels() const { return labels_; }
  double alpha() const { return alpha_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  bool in_vocabulary(std::uint32_t bucket) const { return vocab_.count(bucket) > 0; }
  double log_prior(std::size_t cls) const { return log_prior_[cls]; }
  // log P(bucket | class).
  double log_likelihood(std::size_t cls, std::uint32_t bucket) const;
  // Unnormalized log posterior per class, in labels() order.
  std::vector<double> joint_log_scores(const FeatureVector& x) const;
  // Digest of the full parameter set; identical corpora give identical digests.
  std::string summary_digest() const;

 private:
  friend NaiveBayesModel train_naive_bayes(const Corpus&, double);

  std::vector<std::string> labels_;
  std::vector<double> log_prior_;
  std::vector<std::unordered_map<std::uint32_t, double>> counts_;
  std::vector<double> totals_;
  std::unordered_set<std::uint32_t> vocab_;
  double alpha_ = 1.0;
};

// Throws std::invalid_argument for fewer than two labels or alpha <= 0.
NaiveBayesModel train_naive_bayes(const Corpus& train, double alpha = 1.0);

struct Prediction {
  std::string label;
  std::vector<double> log_posterior;  // normalized, in model.labels() order
};

// Argmax of the posterior; ties go to the lexicographically smallest label.
Prediction predict(const NaiveBayesModel& model, std::string_view text);
std::vector<Prediction> predict(const NaiveBayesModel& model, const Corpus& examples);

// Trainer protocol backed by the built-in classifier. Reads "alpha" from the
// hyperparameters (default 1.0).
class NaiveBayesTrainer final : public Trainer {
 public:
  std::vector<std::string> train_and_predict(const Corpus& train,
                                             const std::vector<UnlabeledExample>& eval,
                                             const nlohmann::json& hyperparams) override;
  std::string name() const override { return "naive_bayes"; }
};

}  // namespace synimp
