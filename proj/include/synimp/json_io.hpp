#pragma once

#include <string>

#include <json.hpp>

#include "synimp/corpus.hpp"
#include "synimp/experiment.hpp"
#include "synimp/generator.hpp"
#include "synimp/planner.hpp"
#include "synimp/validator.hpp"

namespace synimp {

void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

void to_json(nlohmann::json& j, const LabelDistribution& d);
void to_json(nlohmann::json& j, const BatchCoverage& b);
void to_json(nlohmann::json& j, const ImputationPlan& p);
void from_json(const nlohmann::json& j, ImputationPlan& p);

void to_json(nlohmann::json& j, const CandidateSimilarity& c);
void to_json(nlohmann::json& j, const SimilaritySummary& s);
void to_json(nlohmann::json& j, const SimilarityReport& r);

void to_json(nlohmann::json& j, const ScoreStats& s);
void to_json(nlohmann::json& j, const CvReport& r);
void to_json(nlohmann::json& j, const ExperimentReport& r);

// Figure table: strategy, original_count, synthetic_count, class, f1_mean,
// f1_sd (sd over fits), f1_sd_repeats. One row per cell and class.
std::string experiment_csv(const ExperimentReport& r);

}  // namespace synimp
