#include "synimp/json_io.hpp"

#include <cstdio>
#include <sstream>

namespace synimp {

using nlohmann::json;

void to_json(json& j, const GenerationRecord& r) {
  j = json{{"candidate_id", r.candidate_id},
           {"index", r.index},
           {"category", r.category},
           {"original_count", r.original_count},
           {"example_ids", r.example_ids},
           {"prompt_hash", r.prompt_hash},
           {"prompt_version", r.prompt_version},
           {"model_id", r.model_id},
           {"seed", r.seed},
           {"text", r.text},
           {"status", std::string(to_string(r.status))},
           {"created_at", r.created_at}};
}

void from_json(const json& j, GenerationRecord& r) {
  j.at("candidate_id").get_to(r.candidate_id);
  j.at("index").get_to(r.index);
  j.at("category").get_to(r.category);
  r.original_count = j.value("original_count", std::size_t{0});
  j.at("example_ids").get_to(r.example_ids);
  j.at("prompt_hash").get_to(r.prompt_hash);
  r.prompt_version = j.value("prompt_version", 1);
  j.at("model_id").get_to(r.model_id);
  j.at("seed").get_to(r.seed);
  j.at("text").get_to(r.text);
  r.status = candidate_status_from_string(j.value("status", std::string("pending")));
  r.created_at = j.value("created_at", std::string());
  if (r.example_ids.size() != kExamplesPerPrompt)
    throw std::invalid_argument("generation record " + r.candidate_id + " does not list 5 examples");
}

void to_json(json& j, const LabelDistribution& d) {
  j = json{{"counts", d.counts}, {"total", d.total}, {"shares", d.shares}};
}

void to_json(json& j, const BatchCoverage& b) {
  j = json{{"category", b.category},       {"category_count", b.category_count},
           {"total", b.total},             {"batch_size", b.batch_size},
           {"num_batches", b.num_batches}, {"per_batch_avg", b.per_batch_avg}};
}

void to_json(json& j, const ImputationPlan& p) {
  json entries = json::object();
  for (const auto& [label, e] : p.entries)
    entries[label] = {{"original_count", e.original_count},
                      {"target_total", e.target_total},
                      {"synthetic_needed", e.synthetic_needed}};
  j = json{{"entries", entries}, {"warnings", p.warnings}};
}

void from_json(const json& j, ImputationPlan& p) {
  p.entries.clear();
  for (const auto& [label, e] : j.at("entries").items())
    p.entries[label] = {e.at("original_count").get<std::size_t>(),
                        e.at("target_total").get<std::size_t>(),
                        e.at("synthetic_needed").get<std::size_t>()};
  p.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const CandidateSimilarity& c) {
  json flags = json::array();
  for (auto f : c.flags) flags.push_back(std::string(to_string(f)));
  j = json{{"candidate_id", c.candidate_id},
           {"max_jaccard_vs_original", c.max_jaccard_vs_original},
           {"nearest_original_id", c.nearest_original_id},
           {"max_jaccard_vs_synthetic", c.max_jaccard_vs_synthetic},
           {"max_ngram_containment", c.max_ngram_containment},
           {"length_ratio", c.length_ratio},
           {"flags", flags}};
}

void to_json(json& j, const SimilaritySummary& s) {
  j = json{{"candidates", s.candidates},
           {"mean_max_jaccard_vs_original", s.mean_max_jaccard_vs_original},
           {"mean_max_jaccard_vs_synthetic", s.mean_max_jaccard_vs_synthetic},
           {"mean_max_ngram_containment", s.mean_max_ngram_containment},
           {"mean_length_ratio", s.mean_length_ratio},
           {"max_jaccard_vs_original", s.max_jaccard_vs_original},
           {"max_jaccard_vs_synthetic", s.max_jaccard_vs_synthetic},
           {"max_ngram_containment", s.max_ngram_containment},
           {"flag_counts", s.flag_counts}};
}

void to_json(json& j, const SimilarityReport& r) {
  j = json{{"entries", r.entries}, {"summary", r.summary}};
}

void to_json(json& j, const ScoreStats& s) {
  j = json{{"mean", s.mean}, {"sd_fits", s.sd_fits}, {"sd_repeats", s.sd_repeats}};
}

void to_json(json& j, const CvReport& r) {
  json fits = json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"repeat", f.repeat},
                    {"fold", f.fold},
                    {"class_f1", f.class_f1},
                    {"weighted_f1", f.weighted_f1},
                    {"macro_f1", f.macro_f1}});
  json classes = json::object();
  for (const auto& [label, s] : r.class_f1) classes[label] = s;
  j = json{{"strategy", r.strategy},
           {"original_count", r.original_count},
           {"synthetic_count", r.synthetic_count},
           {"k", r.k},
           {"repeats", r.repeats},
           {"class_f1", classes},
           {"weighted_f1", r.weighted_f1},
           {"macro_f1", r.macro_f1},
           {"fits", fits},
           {"warnings", r.warnings},
           {"failed", r.failed}};
  if (r.failed) j["error"] = r.error;
}

void to_json(json& j, const ExperimentReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    json cell = c.report;
    if (c.synthetic_similarity) cell["synthetic_similarity"] = *c.synthetic_similarity;
    cells.push_back(std::move(cell));
  }
  j = json{{"category", r.category}, {"full_count", r.full_count}, {"cells", cells}};
}

std::string experiment_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "strategy,original_count,synthetic_count,class,f1_mean,f1_sd,f1_sd_repeats\n";
  char buf[128];
  for (const auto& c : r.cells) {
    if (c.report.failed) continue;
    for (const auto& [label, s] : c.report.class_f1) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", s.mean, s.sd_fits, s.sd_repeats);
      os << c.report.strategy << ',' << c.report.original_count << ','
         << c.report.synthetic_count << ',' << label << ',' << buf << '\n';
    }
  }
  return os.str();
}

}  // namespace synimp
