#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "synimp/generator.hpp"

namespace synimp {

enum class RunState { created, generating, reviewing, evaluating, done, failed };

std::string_view to_string(RunState s);
RunState run_state_from_string(std::string_view s);
// created -> generating -> reviewing -> evaluating -> done, with
// reviewing -> generating for regeneration and failed reachable from any
// non-terminal state.
bool is_legal_transition(RunState from, RunState to);

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PromptVersion {
  int version = 1;
  std::string body;
  std::string created_at;
};

struct StateChange {
  RunState state = RunState::created;
  std::string at;
};

struct RunRecord {
  std::string run_id;
  nlohmann::json config;  // immutable snapshot
  std::string corpus_digest;
  nlohmann::json plan;
  std::vector<PromptVersion> prompts;
  RunState state = RunState::created;
  std::vector<StateChange> history;
  std::string created_at;
  std::string updated_at;

  const PromptVersion& current_prompt() const { return prompts.back(); }
};

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

struct Decision {
  std::string candidate_id;
  CandidateStatus status = CandidateStatus::pending;
  std::string note;
  std::string actor;
  std::string at;
};

void to_json(nlohmann::json& j, const Decision& d);
void from_json(const nlohmann::json& j, Decision& d);

struct ReplayedRun {
  RunRecord record;
  std::vector<GenerationRecord> candidates;  // sorted by index, decisions applied
  std::size_t skipped_lines = 0;  // torn trailing writes
};

// Files of one run directory:
//   run.json          record (rewritten atomically via rename)
//   candidates.jsonl  GenerationRecords, append-only
//   decisions.jsonl   status changes, append-only
//   metrics.json, report.csv, similarity.json   derived outputs
class RunStore {
 public:
  explicit RunStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  bool exists() const;

  void write_record(const RunRecord& r);
  void append_candidate(const GenerationRecord& r);
  void append_decision(const Decision& d);
  // Atomic replace of a derived file.
  void write_file(const std::string& name, const std::string& contents);
  std::optional<std::string> read_file(const std::string& name) const;

  // Rebuilds state from run.json and the two logs. A final line without a
  // newline (interrupted append) is ignored.
  ReplayedRun replay() const;

 private:
  void append_line(const std::string& name, const std::string& line);

  std::filesystem::path dir_;
  std::mutex write_mu_;
};

}  // namespace synimp
