#pragma once

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "synimp/pipeline.hpp"

namespace synimp {

struct ServiceOptions {
  std::filesystem::path data_dir = "synimp-data";
  // Required as "Authorization: Bearer <token>" when set.
  std::optional<std::string> token;
  // Served under / when set (the review console build).
  std::filesystem::path static_dir;
  // Replaces the configured provider; used by tests.
  std::function<std::unique_ptr<GenerationProvider>(const RunConfig&)> provider_factory;
  RetryPolicy retry;
};

// Token from SYNIMP_TOKEN, data directory from SYNIMP_DATA_DIR.
ServiceOptions service_options_from_env();

// REST facade over run directories in <data_dir>/runs/<run_id>.
//
//   POST /runs                         config -> 201 {run_id, ...}
//   GET  /runs                         run ids and states
//   GET  /runs/{id}                    run record + candidate counts
//   POST /runs/{id}/generate           202, fills the deficit in the background
//   POST /runs/{id}/validate           similarity report, flags candidates
//   GET  /runs/{id}/candidates?status=&order=queue
//                                      records with similarity fields; the
//                                      queue order lists flagged ones first
//   GET  /candidates/{cid}             record, its examples, shared 5-grams
//   POST /candidates/{cid}/decision    {"decision": "accept"|"reject", "note"}
//   PUT  /runs/{id}/prompt             {"body"} -> new prompt version
//   GET  /runs/{id}/similarity         stored similarity report
//   POST /runs/{id}/evaluate           202, {"strategies": [...]} optional
//   GET  /runs/{id}/report             metrics.json bytes
//
// Errors are {"error": message} with 400 bad JSON, 401 bad token, 404 unknown
// id, 409 illegal state change or busy run, 422 invalid input.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server);
  // Blocks until no background job runs for `run_id`.
  void wait_idle(const std::string& run_id);

 private:
  Run& get(const std::string& id);
  std::pair<Run*, GenerationRecord> find_candidate(const std::string& cid);
  void start_job(const std::string& id, std::function<void(Run&)> job);
  nlohmann::json run_view(Run& run);
  std::string next_run_id();

  ServiceOptions options_;
  std::mutex mu_;
  std::condition_variable idle_cv_;
  std::map<std::string, std::unique_ptr<Run>> runs_;
  std::map<std::string, bool> busy_;
  std::map<std::string, std::string> last_error_;
  std::map<std::string, nlohmann::json> last_job_;
  std::vector<std::jthread> workers_;
};

// Listens until the process is stopped. Returns non-zero when binding fails.
int serve(const std::string& host, int port, ServiceOptions options);

}  // namespace synimp
