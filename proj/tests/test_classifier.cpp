#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "support.hpp"
#include "synimp/classifier.hpp"
#include "synimp/digest.hpp"
#include "synimp/rng.hpp"

using namespace synimp;

namespace {

// Independent multinomial naive Bayes over the same hashed unigram+bigram
// features; inputs are lowercase words without punctuation.
struct OracleNB {
  std::map<std::string, double> docs;
  std::map<std::string, std::map<std::uint32_t, double>> counts;
  std::map<std::string, double> totals;
  std::set<std::uint32_t> vocab;
  double n = 0, alpha = 1.0;

  static std::vector<std::uint32_t> features(const std::string& text) {
    std::vector<std::string> w;
    std::string cur;
    for (char ch : text + " ") {
      if (ch == ' ') {
        if (!cur.empty()) w.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      out.push_back(static_cast<std::uint32_t>(fnv1a64("u\x1f" + w[i]) % (1u << 18)));
      if (i + 1 < w.size())
        out.push_back(static_cast<std::uint32_t>(fnv1a64("b\x1f" + w[i] + " " + w[i + 1]) % (1u << 18)));
    }
    return out;
  }

  void fit(const Corpus& c) {
    for (const auto& e : c) {
      docs[e.label] += 1;
      n += 1;
      for (auto f : features(e.text)) {
        counts[e.label][f] += 1;
        totals[e.label] += 1;
        vocab.insert(f);
      }
    }
  }

  std::map<std::string, double> posterior(const std::string& text) const {
    std::map<std::string, double> joint;
    for (const auto& [label, d] : docs) {
      double s = std::log(d / n);
      for (auto f : features(text)) {
        if (!vocab.count(f)) continue;
        auto it = counts.at(label).find(f);
        double c = it == counts.at(label).end() ? 0 : it->second;
        s += std::log((c + alpha) / (totals.at(label) + alpha * vocab.size()));
      }
      joint[label] = s;
    }
    double z = 0;
    for (const auto& [l, s] : joint) z += std::exp(s);
    for (auto& [l, s] : joint) s = s - std::log(z);
    return joint;
  }
};

}  // namespace

TEST_CASE("featurize counts unigrams and bigrams") {
  auto f = featurize("a a");
  std::uint32_t ua = fnv1a64("u\x1f" "a") % kFeatureBuckets;
  std::uint32_t baa = fnv1a64("b\x1f" "a a") % kFeatureBuckets;
  std::map<std::uint32_t, std::uint32_t> m(f.begin(), f.end());
  CHECK(m.at(ua) == 2);
  CHECK(m.at(baa) == 1);
  CHECK(std::is_sorted(f.begin(), f.end()));
  CHECK(featurize("Hello, WORLD!") == featurize("hello world"));
  CHECK(featurize("").empty());
}

TEST_CASE("four-example hand corpus matches the oracle") {
  auto c = test::make_corpus({{"1", "good fun day", "pos"},
                              {"2", "good good time", "pos"},
                              {"3", "bad sad day", "neg"},
                              {"4", "bad time", "neg"}});
  auto model = train_naive_bayes(c, 1.0);
  OracleNB oracle;
  oracle.fit(c);
  CHECK(model.vocabulary_size() == oracle.vocab.size());
  for (const std::string probe : {"good day", "bad time", "fun", "unknown words only", "", "good bad sad fun day"}) {
    auto p = predict(model, probe);
    auto o = oracle.posterior(probe);
    for (std::size_t i = 0; i < model.labels().size(); ++i)
      CHECK(p.log_posterior[i] == doctest::Approx(o.at(model.labels()[i])).epsilon(1e-9));
  }
  double prior_sum = 0;
  for (std::size_t i = 0; i < model.labels().size(); ++i) prior_sum += std::exp(model.log_prior(i));
  CHECK(std::abs(prior_sum - 1.0) < 1e-9);
}

TEST_CASE("separable vocabularies give perfect training accuracy") {
  auto c = test::make_corpus({{"1", "apple banana cherry", "fruit"},
                              {"2", "banana grape", "fruit"},
                              {"3", "hammer nail saw", "tool"},
                              {"4", "drill saw wrench", "tool"}});
  auto model = train_naive_bayes(c);
  for (const auto& e : c) CHECK(predict(model, e.text).label == e.label);
}

TEST_CASE("empty text falls back to the prior, ties to the smallest label") {
  auto c = test::make_corpus({{"1", "x", "b"}, {"2", "y", "b"}, {"3", "z", "a"}});
  CHECK(predict(train_naive_bayes(c), "").label == "b");
  auto tie = test::make_corpus({{"1", "x", "zeta"}, {"2", "y", "alpha"}});
  CHECK(predict(train_naive_bayes(tie), "").label == "alpha");
}

TEST_CASE("doubling the data and alpha together keeps the decisions") {
  auto c = load_corpus(test::data_file("nostalgia_desk.jsonl"));
  std::vector<LabeledExample> rows(c.begin(), c.begin() + 600), doubled;
  for (const auto& e : rows) {
    doubled.push_back(e);
    auto d = e;
    d.id += "-dup";
    doubled.push_back(d);
  }
  auto a = train_naive_bayes(Corpus(rows));
  // (2n + 2a) / (2T + 2a|V|) equals (n + a) / (T + a|V|), and priors are unchanged.
  auto b = train_naive_bayes(Corpus(doubled), 2.0);
  for (std::size_t i = 600; i < c.size(); ++i) CHECK(predict(a, c[i].text).label == predict(b, c[i].text).label);
}

TEST_CASE("model digest is deterministic") {
  auto c = load_corpus(test::data_file("nostalgia_desk.jsonl"));
  CHECK(train_naive_bayes(c).summary_digest() == train_naive_bayes(c).summary_digest());
  CHECK(train_naive_bayes(c, 1.0).summary_digest() != train_naive_bayes(c, 0.5).summary_digest());
}

TEST_CASE("probe set agrees with the oracle on the desk corpus") {
  auto c = load_corpus(test::data_file("nostalgia_desk.jsonl"));
  std::vector<LabeledExample> train(c.begin(), c.begin() + 900);
  // Oracle tokenization is plain whitespace, so normalize first.
  for (auto& e : train) {
    std::string t;
    for (char ch : e.text)
      if (!std::ispunct(static_cast<unsigned char>(ch))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    e.text = t;
  }
  Corpus tc(train);
  auto model = train_naive_bayes(tc);
  OracleNB oracle;
  oracle.fit(tc);
  for (std::size_t i = 900; i < c.size(); ++i) {
    std::string t;
    for (char ch : c[i].text)
      if (!std::ispunct(static_cast<unsigned char>(ch))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    auto post = oracle.posterior(t);
    std::string best = post.begin()->first;
    for (const auto& [l, s] : post)
      if (s > post.at(best)) best = l;
    CHECK(predict(model, t).label == best);
  }
}

TEST_CASE("training preconditions") {
  CHECK_THROWS(train_naive_bayes(test::make_corpus({{"1", "x", "a"}})));
  CHECK_THROWS(train_naive_bayes(test::make_corpus({{"1", "x", "a"}, {"2", "y", "b"}}), 0.0));
}

TEST_CASE("trainer adapter reads alpha") {
  auto c = test::make_corpus({{"1", "good", "pos"}, {"2", "bad", "neg"}});
  NaiveBayesTrainer t;
  auto labels = t.train_and_predict(c, {{"e1", "good"}, {"e2", "bad"}}, {{"alpha", 0.5}});
  CHECK(labels == std::vector<std::string>{"pos", "neg"});
}
