#include <doctest.h>

#include "support.hpp"
#include "synimp/generator.hpp"
#include "synimp/validator.hpp"

using namespace synimp;

TEST_CASE("jaccard bounds and hand cases") {
  CHECK(ngram_jaccard("The cat sat.", "the CAT sat", 1) == 1.0);
  CHECK(ngram_jaccard("a b c", "d e f", 1) == 0.0);
  CHECK(ngram_jaccard("a b c d", "a b c e", 1) == doctest::Approx(0.6));
  CHECK(ngram_jaccard("a b c d", "a b c d", 2) == 1.0);
  CHECK(ngram_jaccard("", "", 1) == 0.0);
  CHECK(ngram_jaccard("a b", "a b", 5) == 0.0);  // too short for 5-grams
  CHECK_THROWS(ngram_set("a", 0));
}

TEST_CASE("containment hand case") {
  // candidate 2-grams: ab bc cd de ef fg (6); reference shares ab bc cd de.
  CHECK(ngram_containment("a b c d e f g", "a b c d e x", 2) == doctest::Approx(4.0 / 6.0));
  CHECK(ngram_containment("a b c d e", "z a b c d e z", 5) == 1.0);
  CHECK(ngram_containment("", "a b", 1) == 0.0);
}

TEST_CASE("shared n-grams for highlighting") {
  auto s = shared_ngrams("We walked to the old mill by the river.", "Past the old mill by the sea", 3);
  CHECK(s == std::vector<std::string>{"the old mill", "old mill by", "mill by the"});
}

TEST_CASE("assessment flags") {
  auto originals = test::make_corpus({{"o1", "the old house on the hill had a red door", "c"},
                                      {"o2", "we used to swim in the river every summer", "c"}});
  std::vector<SimilarityInput> in = {
      {"copy", "The old house on the hill had a red door.", {"o1"}},
      {"new", "grandmother baked bread while snow fell outside the window", {"o1", "o2"}},
      {"long", "a b c d e f g h i j k l m n o p q r s t u v w x y z aa bb cc dd ee ff gg hh ii jj kk", {"o1"}},
      {"empty", "   ", {"o1"}},
  };
  auto r = assess_similarity(in, originals);
  REQUIRE(r.entries.size() == 4);
  const auto& copy = r.entries[0];
  CHECK(copy.max_jaccard_vs_original == 1.0);
  CHECK(copy.nearest_original_id == "o1");
  CHECK(copy.flags.count(SimilarityFlag::near_duplicate));
  CHECK(copy.flags.count(SimilarityFlag::high_overlap));
  CHECK(copy.length_ratio == doctest::Approx(1.0));
  CHECK(r.entries[1].flags.empty());
  CHECK(r.entries[2].flags.count(SimilarityFlag::length_out_of_band));
  CHECK(r.entries[3].flags == std::set<SimilarityFlag>{SimilarityFlag::empty});
  CHECK(r.entries[3].length_ratio == 0.0);
  CHECK(r.summary.candidates == 4);
  CHECK(r.summary.flag_counts.at("near_duplicate") == 1);
  CHECK(r.summary.flag_counts.at("empty") == 1);
  CHECK(r.summary.max_jaccard_vs_original == 1.0);
}

TEST_CASE("candidates duplicating each other are flagged") {
  auto originals = test::make_corpus({{"o1", "completely unrelated original text here", "c"}});
  std::vector<SimilarityInput> in = {{"a", "twin sentences look exactly alike today", {}},
                                     {"b", "twin sentences look exactly alike today", {}}};
  auto r = assess_similarity(in, originals);
  for (const auto& e : r.entries) {
    CHECK(e.max_jaccard_vs_synthetic == 1.0);
    CHECK(e.flags.count(SimilarityFlag::near_duplicate));
  }
}

TEST_CASE("validate_batch flags but never rejects") {
  auto originals = test::make_corpus({{"o1", "one two three four five six", "c"}});
  std::vector<GenerationRecord> recs(3);
  recs[0].candidate_id = "a";
  recs[0].text = "one two three four five six";
  recs[1].candidate_id = "b";
  recs[1].text = "seven eight nine ten eleven twelve";
  recs[2].candidate_id = "c";
  recs[2].text = "one two three four five six";
  recs[2].status = CandidateStatus::accepted;
  auto r = validate_batch(recs, originals);
  CHECK(recs[0].status == CandidateStatus::flagged);
  CHECK(recs[1].status == CandidateStatus::pending);
  CHECK(recs[2].status == CandidateStatus::accepted);
  CHECK(r.entries.size() == 3);
}
