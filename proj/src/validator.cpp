#include "synimp/validator.hpp"

#include <algorithm>

#include "synimp/digest.hpp"
#include "synimp/text.hpp"

namespace synimp {

NgramSet ngram_set(std::string_view text, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  auto words = normalized_words(text);
  NgramSet out;
  if (words.size() < n) return out;
  out.reserve(words.size() - n + 1);
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    std::string gram = words[i];
    for (std::size_t j = 1; j < n; ++j) {
      gram.push_back(' ');
      gram += words[i + j];
    }
    out.push_back(fnv1a64(gram));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::size_t intersection_size(const NgramSet& a, const NgramSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double jaccard(const NgramSet& a, const NgramSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = intersection_size(a, b);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double containment(const NgramSet& candidate, const NgramSet& reference) {
  if (candidate.empty()) return 0.0;
  return static_cast<double>(intersection_size(candidate, reference)) /
         static_cast<double>(candidate.size());
}

double ngram_jaccard(std::string_view a, std::string_view b, std::size_t n) {
  return jaccard(ngram_set(a, n), ngram_set(b, n));
}

double ngram_containment(std::string_view candidate, std::string_view reference, std::size_t n) {
  return containment(ngram_set(candidate, n), ngram_set(reference, n));
}

std::vector<std::string> shared_ngrams(std::string_view candidate, std::string_view reference,
                                       std::size_t n) {
  const auto ref = ngram_set(reference, n);
  const auto words = normalized_words(candidate);
  std::vector<std::string> out;
  std::vector<std::uint64_t> seen;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    std::string gram = words[i];
    for (std::size_t j = 1; j < n; ++j) gram += " " + words[i + j];
    const auto h = fnv1a64(gram);
    if (!std::binary_search(ref.begin(), ref.end(), h)) continue;
    if (std::find(seen.begin(), seen.end(), h) != seen.end()) continue;
    seen.push_back(h);
    out.push_back(std::move(gram));
  }
  return out;
}

std::string_view to_string(SimilarityFlag f) {
  switch (f) {
    case SimilarityFlag::near_duplicate: return "near_duplicate";
    case SimilarityFlag::high_overlap: return "high_overlap";
    case SimilarityFlag::length_out_of_band: return "length_out_of_band";
    case SimilarityFlag::empty: return "empty";
  }
  return "empty";
}

SimilaritySummary summarize_similarity(const std::vector<CandidateSimilarity>& entries) {
  SimilaritySummary s;
  s.candidates = entries.size();
  for (const auto& e : entries) {
    s.mean_max_jaccard_vs_original += e.max_jaccard_vs_original;
    s.mean_max_jaccard_vs_synthetic += e.max_jaccard_vs_synthetic;
    s.mean_max_ngram_containment += e.max_ngram_containment;
    s.mean_length_ratio += e.length_ratio;
    s.max_jaccard_vs_original = std::max(s.max_jaccard_vs_original, e.max_jaccard_vs_original);
    s.max_jaccard_vs_synthetic = std::max(s.max_jaccard_vs_synthetic, e.max_jaccard_vs_synthetic);
    s.max_ngram_containment = std::max(s.max_ngram_containment, e.max_ngram_containment);
    for (auto f : e.flags) ++s.flag_counts[std::string(to_string(f))];
  }
  for (auto f : {SimilarityFlag::near_duplicate, SimilarityFlag::high_overlap,
                 SimilarityFlag::length_out_of_band, SimilarityFlag::empty})
    s.flag_counts.try_emplace(std::string(to_string(f)), 0);
  if (s.candidates) {
    const auto n = static_cast<double>(s.candidates);
    s.mean_max_jaccard_vs_original /= n;
    s.mean_max_jaccard_vs_synthetic /= n;
    s.mean_max_ngram_containment /= n;
    s.mean_length_ratio /= n;
  }
  return s;
}

SimilarityReport assess_similarity(const std::vector<SimilarityInput>& candidates,
                                   const Corpus& originals,
                                   const SimilarityThresholds& t) {
  struct Prepared {
    NgramSet unigrams;
    NgramSet grams;
    std::size_t words = 0;
  };
  auto prepare = [&](std::string_view text) {
    return Prepared{ngram_set(text, 1), ngram_set(text, t.overlap_n),
                    normalized_words(text).size()};
  };
  std::vector<Prepared> orig;
  orig.reserve(originals.size());
  double mean_orig_words = 0.0;
  for (const auto& e : originals) {
    orig.push_back(prepare(e.text));
    mean_orig_words += static_cast<double>(orig.back().words);
  }
  if (!orig.empty()) mean_orig_words /= static_cast<double>(orig.size());

  std::vector<Prepared> cand;
  cand.reserve(candidates.size());
  for (const auto& c : candidates) cand.push_back(prepare(c.text));

  SimilarityReport report;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateSimilarity e;
    e.candidate_id = candidates[i].id;
    const auto& c = cand[i];
    for (std::size_t j = 0; j < orig.size(); ++j) {
      double jac = jaccard(c.unigrams, orig[j].unigrams);
      if (j == 0 || jac > e.max_jaccard_vs_original) {
        e.max_jaccard_vs_original = jac;
        e.nearest_original_id = originals[j].id;
      }
      e.max_ngram_containment = std::max(e.max_ngram_containment, containment(c.grams, orig[j].grams));
    }
    for (std::size_t j = 0; j < cand.size(); ++j) {
      if (j == i) continue;
      e.max_jaccard_vs_synthetic =
          std::max(e.max_jaccard_vs_synthetic, jaccard(c.unigrams, cand[j].unigrams));
      e.max_ngram_containment = std::max(e.max_ngram_containment, containment(c.grams, cand[j].grams));
    }

    double ref_words = 0.0;
    std::size_t found = 0;
    for (const auto& rid : candidates[i].reference_ids) {
      if (const auto* ex = originals.find(rid)) {
        ref_words += static_cast<double>(normalized_words(ex->text).size());
        ++found;
      }
    }
    ref_words = found ? ref_words / static_cast<double>(found) : mean_orig_words;

    if (c.words == 0) {
      e.flags.insert(SimilarityFlag::empty);
    } else {
      e.length_ratio = ref_words > 0 ? static_cast<double>(c.words) / ref_words : 1.0;
      if (e.length_ratio < t.min_length_ratio || e.length_ratio > t.max_length_ratio)
        e.flags.insert(SimilarityFlag::length_out_of_band);
    }
    if (std::max(e.max_jaccard_vs_original, e.max_jaccard_vs_synthetic) > t.near_duplicate_jaccard)
      e.flags.insert(SimilarityFlag::near_duplicate);
    if (e.max_ngram_containment > t.high_overlap_containment)
      e.flags.insert(SimilarityFlag::high_overlap);

    report.entries.push_back(std::move(e));
  }
  report.summary = summarize_similarity(report.entries);
  return report;
}

SimilarityReport validate_batch(std::vector<GenerationRecord>& candidates,
                                const Corpus& originals,
                                const SimilarityThresholds& thresholds) {
  std::vector<SimilarityInput> inputs;
  inputs.reserve(candidates.size());
  for (const auto& r : candidates) inputs.push_back({r.candidate_id, r.text, r.example_ids});
  auto report = assess_similarity(inputs, originals, thresholds);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& r = candidates[i];
    if (!report.entries[i].flags.empty() && r.status == CandidateStatus::pending)
      r.status = CandidateStatus::flagged;
  }
  return report;
}

}  // namespace synimp
