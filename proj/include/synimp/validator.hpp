#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synimp/corpus.hpp"
#include "synimp/generator.hpp"

namespace synimp {

// Set of word n-grams of a text, each n-gram hashed to 64 bits; sorted and
// unique. Words are lowercased with punctuation stripped.
using NgramSet = std::vector<std::uint64_t>;

NgramSet ngram_set(std::string_view text, std::size_t n);

double jaccard(const NgramSet& a, const NgramSet& b);
double containment(const NgramSet& candidate, const NgramSet& reference);

// |A ∩ B| / |A ∪ B|; 0 when both are empty.
double ngram_jaccard(std::string_view a, std::string_view b, std::size_t n);
// |C ∩ R| / |C|; 0 when the candidate has no n-grams.
double ngram_containment(std::string_view candidate, std::string_view reference, std::size_t n);

enum class SimilarityFlag { near_duplicate, high_overlap, length_out_of_band, empty };
// Normalized n-grams of `candidate` that also occur in `reference`, in
// candidate order without repeats. Used for highlighting.
std::vector<std::string> shared_ngrams(std::string_view candidate, std::string_view reference,
                                       std::size_t n);

std::string_view to_string(SimilarityFlag f);

struct SimilarityThresholds {
  double near_duplicate_jaccard = 0.9;  // unigram Jaccard strictly above
  std::size_t overlap_n = 5;
  double high_overlap_containment = 0.5;  // n-gram containment strictly above
  double min_length_ratio = 0.5;
  double max_length_ratio = 2.0;
};

struct CandidateSimilarity {
  std::string candidate_id;
  double max_jaccard_vs_original = 0.0;
  std::string nearest_original_id;
  double max_jaccard_vs_synthetic = 0.0;
  double max_ngram_containment = 0.0;
  double length_ratio = 0.0;  // 0 only for empty candidates
  std::set<SimilarityFlag> flags;
};

struct SimilaritySummary {
  std::size_t candidates = 0;
  double mean_max_jaccard_vs_original = 0.0;
  double mean_max_jaccard_vs_synthetic = 0.0;
  double mean_max_ngram_containment = 0.0;
  double mean_length_ratio = 0.0;
  double max_jaccard_vs_original = 0.0;
  double max_jaccard_vs_synthetic = 0.0;
  double max_ngram_containment = 0.0;
  std::map<std::string, std::size_t> flag_counts;
};

struct SimilarityReport {
  std::vector<CandidateSimilarity> entries;
  SimilaritySummary summary;
};

// One text to score. `reference_ids` name the originals it was derived from
// (the five prompt examples, or an augmentation source); its length is
// compared to their mean.
struct SimilarityInput {
  std::string id;
  std::string text;
  std::vector<std::string> reference_ids;
};

// Means, maxima and flag counts over scored entries; every flag has a count.
SimilaritySummary summarize_similarity(const std::vector<CandidateSimilarity>& entries);

SimilarityReport assess_similarity(const std::vector<SimilarityInput>& candidates,
                                   const Corpus& originals,
                                   const SimilarityThresholds& thresholds = {});

// Scores generation records against the originals of their category and
// against each other. Pending records that raise any flag become flagged;
// nothing is rejected.
SimilarityReport validate_batch(std::vector<GenerationRecord>& candidates,
                                const Corpus& originals,
                                const SimilarityThresholds& thresholds = {});

}  // namespace synimp
