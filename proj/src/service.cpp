#include "synimp/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <regex>

#include "synimp/json_io.hpp"
#include "synimp/validator.hpp"

namespace synimp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& what) : std::runtime_error(what), status(status) {}
  int status;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(400, std::string("invalid JSON: ") + e.what());
  }
}

bool valid_run_id(const std::string& id) {
  static const std::regex re("[A-Za-z0-9_][A-Za-z0-9_.-]{0,63}");
  return std::regex_match(id, re);
}

// Maps exceptions to status codes.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const HttpError& e) {
      send_json(res, e.status, {{"error", e.what()}});
    } catch (const NotFoundError& e) {
      send_json(res, 404, {{"error", e.what()}});
    } catch (const StateError& e) {
      send_json(res, 409, {{"error", e.what()}});
    } catch (const ConfigError& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const CorpusError& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const std::invalid_argument& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const json::exception& e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  };
}

}  // namespace

ServiceOptions service_options_from_env() {
  ServiceOptions o;
  if (const char* t = std::getenv("SYNIMP_TOKEN"); t && *t) o.token = t;
  if (const char* d = std::getenv("SYNIMP_DATA_DIR"); d && *d) o.data_dir = d;
  return o;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  fs::create_directories(options_.data_dir / "runs");
  for (const auto& entry : fs::directory_iterator(options_.data_dir / "runs")) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "run.json")) continue;
    try {
      auto run = Run::open(entry.path());
      runs_[run->id()] = std::move(run);
    } catch (const std::exception& e) {
      std::cerr << "skipping " << entry.path() << ": " << e.what() << "\n";
    }
  }
}

Service::~Service() {
  workers_.clear();  // joins
}

void Service::wait_idle(const std::string& run_id) {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return !busy_[run_id]; });
}

Run& Service::get(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = runs_.find(id);
  if (it == runs_.end()) throw NotFoundError("unknown run '" + id + "'");
  return *it->second;
}

std::pair<Run*, GenerationRecord> Service::find_candidate(const std::string& cid) {
  std::vector<Run*> runs;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, run] : runs_)
      if (cid.rfind(id + "-", 0) == 0) runs.push_back(run.get());
  }
  for (auto* run : runs)
    if (auto c = run->candidate(cid)) return {run, *c};
  throw NotFoundError("unknown candidate '" + cid + "'");
}

std::string Service::next_run_id() {
  for (std::size_t n = runs_.size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run-%04zu", n);
    if (!runs_.count(buf) && !fs::exists(options_.data_dir / "runs" / buf)) return buf;
  }
}

void Service::start_job(const std::string& id, std::function<void(Run&)> job) {
  Run& run = get(id);
  {
    std::lock_guard lock(mu_);
    if (busy_[id]) throw StateError("run " + id + " has a job in progress");
    busy_[id] = true;
    last_error_.erase(id);
  }
  workers_.emplace_back([this, id, &run, job = std::move(job)] {
    std::string error;
    try {
      job(run);
    } catch (const std::exception& e) {
      error = e.what();
    }
    std::lock_guard lock(mu_);
    if (!error.empty()) last_error_[id] = error;
    busy_[id] = false;
    idle_cv_.notify_all();
  });
}

json Service::run_view(Run& run) {
  json j = run.record();
  json counts = {{"pending", 0}, {"accepted", 0}, {"rejected", 0}, {"flagged", 0}};
  const auto cands = run.candidates();
  for (const auto& c : cands) counts[std::string(to_string(c.status))] = counts[std::string(to_string(c.status))].get<int>() + 1;
  j["candidate_count"] = cands.size();
  j["candidate_counts"] = counts;
  std::lock_guard lock(mu_);
  j["busy"] = busy_[run.id()];
  if (auto it = last_error_.find(run.id()); it != last_error_.end()) j["last_error"] = it->second;
  if (auto it = last_job_.find(run.id()); it != last_job_.end()) j["last_job"] = it->second;
  return j;
}

void Service::mount(httplib::Server& server) {
  if (options_.token) {
    const std::string expected = "Bearer " + *options_.token;
    server.set_pre_routing_handler([expected](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Authorization") == expected) return httplib::Server::HandlerResponse::Unhandled;
      send_json(res, 401, {{"error", "missing or invalid bearer token"}});
      return httplib::Server::HandlerResponse::Handled;
    });
  }
  if (!options_.static_dir.empty()) server.set_mount_point("/", options_.static_dir.string());

  server.Post("/runs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    std::string id = body.value("run_id", std::string());
    {
      std::lock_guard lock(mu_);
      if (id.empty()) id = next_run_id();
      else if (!valid_run_id(id)) throw HttpError(422, "run_id may use letters, digits, '_', '-', '.'");
      if (runs_.count(id)) throw StateError("run '" + id + "' already exists");
    }
    body["run_id"] = id;
    body.erase("output_dir");
    auto config = run_config_from_json(body);
    auto run = Run::create(options_.data_dir / "runs" / id, std::move(config));
    Run* ptr = run.get();
    {
      std::lock_guard lock(mu_);
      runs_[id] = std::move(run);
    }
    send_json(res, 201, run_view(*ptr));
  }));

  server.Get("/runs", guarded([this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    std::vector<Run*> runs;
    {
      std::lock_guard lock(mu_);
      for (auto& [id, run] : runs_) runs.push_back(run.get());
    }
    for (auto* run : runs) {
      auto r = run->record();
      out.push_back({{"run_id", r.run_id}, {"state", std::string(to_string(r.state))}});
    }
    send_json(res, 200, out);
  }));

  server.Get(R"(/runs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, run_view(get(req.matches[1])));
  }));

  server.Post(R"(/runs/([^/]+)/generate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    Run& run = get(id);
    auto state = run.record().state;
    if (state != RunState::created && state != RunState::reviewing && state != RunState::generating)
      throw StateError("run " + id + " cannot generate from state " + std::string(to_string(state)));
    start_job(id, [this, id](Run& r) {
      std::unique_ptr<GenerationProvider> provider;
      if (options_.provider_factory) provider = options_.provider_factory(r.config());
      auto result = r.generate(provider.get(), options_.retry);
      json failures = json::array();
      for (const auto& f : result.failures) failures.push_back({{"index", f.index}, {"error", f.message}});
      auto similarity = r.validate();
      std::lock_guard lock(mu_);
      last_job_[id] = {{"kind", "generate"},
                       {"generated", result.records.size()},
                       {"failures", failures},
                       {"flag_counts", similarity["summary"]["flag_counts"]}};
      if (!result.failures.empty())
        last_error_[id] = std::to_string(result.failures.size()) + " candidates failed";
    });
    send_json(res, 202, {{"run_id", id}, {"accepted", true}});
  }));

  server.Post(R"(/runs/([^/]+)/validate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Run& run = get(req.matches[1]);
    {
      std::lock_guard lock(mu_);
      if (busy_[run.id()]) throw StateError("run " + run.id() + " has a job in progress");
    }
    send_json(res, 200, run.validate());
  }));

  server.Get(R"(/runs/([^/]+)/candidates)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Run& run = get(req.matches[1]);
    std::optional<CandidateStatus> filter;
    if (req.has_param("status")) filter = candidate_status_from_string(req.get_param_value("status"));
    std::map<std::string, json> sim;
    if (auto s = run.similarity())
      for (const auto& e : (*s)["entries"]) sim[e["candidate_id"].get<std::string>()] = e;
    auto cands = run.candidates();
    if (req.get_param_value("order") == "queue") {
      // Review queue: flagged, then pending, then decided; index order within.
      auto rank = [](CandidateStatus s) {
        return s == CandidateStatus::flagged ? 0 : s == CandidateStatus::pending ? 1 : 2;
      };
      std::stable_sort(cands.begin(), cands.end(),
                       [&](const auto& a, const auto& b) { return rank(a.status) < rank(b.status); });
    }
    json out = json::array();
    for (const auto& c : cands) {
      if (filter && c.status != *filter) continue;
      json j = c;
      if (auto it = sim.find(c.candidate_id); it != sim.end()) j["similarity"] = it->second;
      out.push_back(std::move(j));
    }
    send_json(res, 200, out);
  }));

  server.Get(R"(/candidates/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto [run, c] = find_candidate(req.matches[1]);
    json j = c;
    json examples = json::array();
    const auto& corpus = run->corpus();
    const auto n = run->config().thresholds.overlap_n;
    for (const auto& id : c.example_ids) {
      const auto* ex = corpus.find(id);
      if (!ex) continue;
      examples.push_back({{"id", id}, {"text", ex->text}, {"shared_ngrams", shared_ngrams(c.text, ex->text, n)}});
    }
    j["examples"] = examples;
    if (auto s = run->similarity())
      for (const auto& e : (*s)["entries"])
        if (e["candidate_id"] == c.candidate_id) j["similarity"] = e;
    send_json(res, 200, j);
  }));

  server.Post(R"(/candidates/([^/]+)/decision)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    auto [run, c] = find_candidate(req.matches[1]);
    std::string d = body.value("decision", body.value("status", std::string()));
    CandidateStatus status;
    if (d == "accept" || d == "accepted") status = CandidateStatus::accepted;
    else if (d == "reject" || d == "rejected") status = CandidateStatus::rejected;
    else throw HttpError(422, "decision must be 'accept' or 'reject'");
    auto updated = run->decide(c.candidate_id, status, body.value("note", std::string()),
                               body.value("actor", std::string("reviewer")));
    send_json(res, 200, updated);
  }));

  server.Put(R"(/runs/([^/]+)/prompt)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    Run& run = get(req.matches[1]);
    if (!body.contains("body") || !body["body"].is_string()) throw HttpError(422, "'body' must be a string");
    auto v = run.edit_prompt(body["body"].get<std::string>());
    send_json(res, 200, {{"version", v.version}, {"body", v.body}, {"created_at", v.created_at}});
  }));

  server.Get(R"(/runs/([^/]+)/similarity)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Run& run = get(req.matches[1]);
    auto s = run.similarity();
    if (!s) throw NotFoundError("run " + run.id() + " has not been validated");
    send_json(res, 200, *s);
  }));

  server.Post(R"(/runs/([^/]+)/evaluate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    const std::string id = req.matches[1];
    Run& run = get(id);
    std::optional<std::vector<Strategy>> strategies;
    if (body.contains("strategies")) {
      strategies.emplace();
      for (const auto& s : body["strategies"]) strategies->push_back(strategy_from_string(s.get<std::string>()));
      if (strategies->empty()) throw HttpError(422, "strategy list is empty");
    }
    if (run.record().state != RunState::reviewing)
      throw StateError("run " + id + " cannot evaluate from state " + std::string(to_string(run.record().state)));
    start_job(id, [strategies](Run& r) { r.evaluate(nullptr, strategies); });
    send_json(res, 202, {{"run_id", id}, {"accepted", true}});
  }));

  server.Get(R"(/runs/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Run& run = get(req.matches[1]);
    auto m = run.metrics();
    if (!m) throw NotFoundError("run " + run.id() + " has no report yet");
    res.status = 200;
    res.set_content(*m, "application/json");
  }));
}

int serve(const std::string& host, int port, ServiceOptions options) {
  Service service(std::move(options));
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  std::cerr << "listening on " << host << ":" << port << "\n";
  server.listen_after_bind();
  return 0;
}

}  // namespace synimp
