#include "synimp/run_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "synimp/json_io.hpp"

namespace synimp {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunState s) {
  switch (s) {
    case RunState::created: return "created";
    case RunState::generating: return "generating";
    case RunState::reviewing: return "reviewing";
    case RunState::evaluating: return "evaluating";
    case RunState::done: return "done";
    case RunState::failed: return "failed";
  }
  return "failed";
}

RunState run_state_from_string(std::string_view s) {
  for (auto st : {RunState::created, RunState::generating, RunState::reviewing,
                  RunState::evaluating, RunState::done, RunState::failed})
    if (to_string(st) == s) return st;
  throw std::invalid_argument("unknown run state '" + std::string(s) + "'");
}

bool is_legal_transition(RunState from, RunState to) {
  using S = RunState;
  if (to == S::failed) return from != S::done && from != S::failed;
  switch (from) {
    case S::created: return to == S::generating;
    case S::generating: return to == S::reviewing;
    case S::reviewing: return to == S::generating || to == S::evaluating;
    case S::evaluating: return to == S::done;
    default: return false;
  }
}

void to_json(json& j, const RunRecord& r) {
  json prompts = json::array();
  for (const auto& p : r.prompts)
    prompts.push_back({{"version", p.version}, {"body", p.body}, {"created_at", p.created_at}});
  json history = json::array();
  for (const auto& h : r.history)
    history.push_back({{"state", std::string(to_string(h.state))}, {"at", h.at}});
  j = json{{"run_id", r.run_id},
           {"config", r.config},
           {"corpus_digest", r.corpus_digest},
           {"plan", r.plan},
           {"prompts", prompts},
           {"state", std::string(to_string(r.state))},
           {"history", history},
           {"created_at", r.created_at},
           {"updated_at", r.updated_at}};
}

void from_json(const json& j, RunRecord& r) {
  j.at("run_id").get_to(r.run_id);
  r.config = j.at("config");
  r.corpus_digest = j.value("corpus_digest", std::string());
  r.plan = j.value("plan", json::object());
  r.prompts.clear();
  for (const auto& p : j.at("prompts"))
    r.prompts.push_back({p.at("version").get<int>(), p.at("body").get<std::string>(),
                         p.value("created_at", std::string())});
  if (r.prompts.empty()) throw std::invalid_argument("run record has no prompt versions");
  r.state = run_state_from_string(j.at("state").get<std::string>());
  r.history.clear();
  for (const auto& h : j.value("history", json::array()))
    r.history.push_back({run_state_from_string(h.at("state").get<std::string>()),
                         h.value("at", std::string())});
  r.created_at = j.value("created_at", std::string());
  r.updated_at = j.value("updated_at", std::string());
}

void to_json(json& j, const Decision& d) {
  j = json{{"candidate_id", d.candidate_id},
           {"status", std::string(to_string(d.status))},
           {"note", d.note},
           {"actor", d.actor},
           {"at", d.at}};
}

void from_json(const json& j, Decision& d) {
  j.at("candidate_id").get_to(d.candidate_id);
  d.status = candidate_status_from_string(j.at("status").get<std::string>());
  d.note = j.value("note", std::string());
  d.actor = j.value("actor", std::string());
  d.at = j.value("at", std::string());
}

RunStore::RunStore(fs::path dir) : dir_(std::move(dir)) {}

bool RunStore::exists() const { return fs::exists(dir_ / "run.json"); }

void RunStore::write_file(const std::string& name, const std::string& contents) {
  std::lock_guard lock(write_mu_);
  fs::create_directories(dir_);
  const auto target = dir_ / name;
  const auto tmp = dir_ / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::optional<std::string> RunStore::read_file(const std::string& name) const {
  std::ifstream in(dir_ / name, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void RunStore::write_record(const RunRecord& r) { write_file("run.json", json(r).dump(2) + "\n"); }

void RunStore::append_line(const std::string& name, const std::string& line) {
  std::lock_guard lock(write_mu_);
  fs::create_directories(dir_);
  const auto path = (dir_ / name).string();
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  // One write per record: a crash loses at most the record in flight.
  std::string buf = line + "\n";
  const char* p = buf.data();
  std::size_t left = buf.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      ::close(fd);
      throw std::runtime_error("append to " + path + " failed: " + std::strerror(err));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  ::close(fd);
}

void RunStore::append_candidate(const GenerationRecord& r) {
  append_line("candidates.jsonl", json(r).dump());
}

void RunStore::append_decision(const Decision& d) {
  append_line("decisions.jsonl", json(d).dump());
}

namespace {

// Complete lines only; a trailing fragment without '\n' is counted, not parsed.
std::vector<std::string> complete_lines(const std::optional<std::string>& contents,
                                        std::size_t& skipped) {
  std::vector<std::string> out;
  if (!contents) return out;
  std::size_t start = 0;
  while (start < contents->size()) {
    auto nl = contents->find('\n', start);
    if (nl == std::string::npos) {
      ++skipped;
      break;
    }
    if (nl > start) out.push_back(contents->substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace

ReplayedRun RunStore::replay() const {
  ReplayedRun out;
  auto record = read_file("run.json");
  if (!record) throw NotFoundError("no run at " + dir_.string());
  out.record = json::parse(*record).get<RunRecord>();

  std::map<std::string, std::size_t> by_id;
  for (const auto& line : complete_lines(read_file("candidates.jsonl"), out.skipped_lines)) {
    auto r = json::parse(line).get<GenerationRecord>();
    if (by_id.count(r.candidate_id)) continue;
    by_id[r.candidate_id] = out.candidates.size();
    out.candidates.push_back(std::move(r));
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  by_id.clear();
  for (std::size_t i = 0; i < out.candidates.size(); ++i) by_id[out.candidates[i].candidate_id] = i;

  for (const auto& line : complete_lines(read_file("decisions.jsonl"), out.skipped_lines)) {
    auto d = json::parse(line).get<Decision>();
    auto it = by_id.find(d.candidate_id);
    if (it == by_id.end()) continue;
    auto& c = out.candidates[it->second];
    if (is_legal_transition(c.status, d.status)) c.status = d.status;
  }
  return out;
}

}  // namespace synimp
