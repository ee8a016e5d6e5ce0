#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "synimp/baselines.hpp"
#include "synimp/http_providers.hpp"

using namespace synimp;
using nlohmann::json;

namespace {

// Local HTTP server on an ephemeral port for the lifetime of the object.
class LocalServer {
 public:
  LocalServer() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

std::string chat_reply(const std::string& text) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}.dump();
}

}  // namespace

TEST_CASE("url splitting") {
  auto p = split_url("https://api.example.com/v1/chat/completions");
  CHECK(p.origin == "https://api.example.com");
  CHECK(p.path == "/v1/chat/completions");
  CHECK(split_url("http://h:1").path == "/");
  CHECK_THROWS(split_url("no-scheme"));
}

TEST_CASE("chat request body and reply parsing") {
  GenerationRequest r;
  r.system_prompt = "Write.\nExample 1: x";
  r.params.temperature = 0.7;
  auto body = json::parse(HttpChatProvider::request_body("gpt-4o", r));
  CHECK(body["model"] == "gpt-4o");
  CHECK(body["messages"].size() == 1);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][0]["content"] == r.system_prompt);
  CHECK(body["temperature"] == 0.7);
  CHECK(HttpChatProvider::extract_text(chat_reply("hello")) == "hello");
  CHECK_THROWS_AS(HttpChatProvider::extract_text("{}"), GenerationError);
  CHECK_THROWS_AS(HttpChatProvider::extract_text("not json"), GenerationError);
}

TEST_CASE("chat endpoint: 429 twice then 200 succeeds on the third attempt") {
  LocalServer srv;
  std::atomic<int> calls{0};
  std::string auth;
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    if (++calls <= 2) {
      res.status = 429;
      res.set_header("Retry-After", "0");
      return;
    }
    res.set_content(chat_reply("one two three four five"), "application/json");
  });
  ::setenv("SYNIMP_TEST_KEY", "sk-test", 1);
  ChatEndpointConfig cfg;
  cfg.url = srv.url("/v1/chat/completions");
  cfg.api_key_env = "SYNIMP_TEST_KEY";
  HttpChatProvider provider(cfg);
  GenerationRequest r;
  r.system_prompt = "prompt";
  r.params.max_output_words = 3;
  RetryPolicy policy;
  std::vector<std::chrono::milliseconds> sleeps;
  policy.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  int attempts = 0;
  CHECK(generate_candidate(provider, r, policy, nullptr, &attempts) == "one two three");
  CHECK(attempts == 3);
  CHECK(calls == 3);
  CHECK(auth == "Bearer sk-test");
  CHECK(provider.model_id() == "gpt-4o");
}

TEST_CASE("chat endpoint errors map to transport errors") {
  LocalServer srv;
  srv.server.Post("/bad", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  ChatEndpointConfig cfg;
  cfg.url = srv.url("/bad");
  HttpChatProvider provider(cfg);
  GenerationRequest r;
  r.system_prompt = "p";
  try {
    provider.complete(r);
    FAIL("expected an error");
  } catch (const TransportError& e) {
    CHECK(e.status() == 401);
    CHECK_FALSE(e.transient());
  }
  cfg.url = "http://127.0.0.1:1/none";
  cfg.timeout = std::chrono::seconds(2);
  HttpChatProvider down(cfg);
  try {
    down.complete(r);
    FAIL("expected an error");
  } catch (const TransportError& e) {
    CHECK(e.transient());
    CHECK(e.status() == 0);
  }
}

TEST_CASE("fill-mask endpoint round trip") {
  LocalServer srv;
  srv.server.Post("/fill", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    std::string text = body["text_with_masks"];
    std::string mask = body["mask_token"];
    json tokens = json::array();
    for (auto pos = text.find(mask); pos != std::string::npos; pos = text.find(mask, pos + 1))
      tokens.push_back("w" + std::to_string(tokens.size()));
    res.set_content(json{{"tokens", tokens}}.dump(), "application/json");
  });
  HttpFillMaskProvider provider(srv.url("/fill"));
  CHECK(reconstruct("a <mask> c <mask>", provider) == "a w0 c w1");
  srv.server.Post("/short", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"tokens":["x"]})", "application/json");
  });
  HttpFillMaskProvider short_provider(srv.url("/short"));
  CHECK_THROWS_AS(reconstruct("<mask> <mask>", short_provider), ReconstructError);
}
