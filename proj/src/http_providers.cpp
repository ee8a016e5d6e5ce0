#include "synimp/http_providers.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "synimp/text.hpp"

namespace synimp {

using nlohmann::json;

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL lacks a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

std::optional<std::chrono::milliseconds> parse_retry_after(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::nullopt;
  try {
    return std::chrono::milliseconds(
        static_cast<long long>(std::stod(res->get_header_value("Retry-After")) * 1000));
  } catch (...) {
    return std::nullopt;
  }
}

httplib::Result post_json(const std::string& url, const std::string& body,
                          const httplib::Headers& headers, std::chrono::seconds timeout) {
  auto parts = split_url(url);
  httplib::Client cli(parts.origin);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli.Post(parts.path, headers, body, "application/json");
}

void raise_for(const httplib::Result& res, const std::string& what) {
  if (!res)
    throw TransportError(what + ": " + httplib::to_string(res.error()), 0, true);
  if (res->status < 200 || res->status >= 300)
    throw TransportError(what + ": HTTP " + std::to_string(res->status), res->status,
                         transient_status(res->status), parse_retry_after(res));
}

}  // namespace

HttpChatProvider::HttpChatProvider(ChatEndpointConfig config) : config_(std::move(config)) {
  split_url(config_.url);
}

std::string HttpChatProvider::request_body(const std::string& model,
                                           const GenerationRequest& request) {
  json body = {{"model", model},
               {"messages", json::array({{{"role", "system"}, {"content", request.system_prompt}}})},
               {"temperature", request.params.temperature}};
  return body.dump();
}

std::string HttpChatProvider::extract_text(const std::string& response_body) {
  json j;
  try {
    j = json::parse(response_body);
  } catch (const json::exception& e) {
    throw GenerationError(std::string("unparseable completion response: ") + e.what());
  }
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw GenerationError("completion response lacks choices[0].message.content");
  }
}

std::string HttpChatProvider::complete(const GenerationRequest& request) {
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = post_json(config_.url, request_body(config_.model, request), headers, config_.timeout);
  raise_for(res, "chat completion");
  std::string text = extract_text(res->body);
  auto words = split_words(text);
  if (request.params.max_output_words > 0 && words.size() > request.params.max_output_words) {
    words.resize(request.params.max_output_words);
    return join_words(words);
  }
  return text;
}

HttpFillMaskProvider::HttpFillMaskProvider(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  if (endpoint_.empty()) throw std::invalid_argument("fill-mask provider needs an endpoint");
  split_url(endpoint_);
}

std::vector<std::string> HttpFillMaskProvider::fill(const std::string& masked_text,
                                                    const std::string& mask_token,
                                                    std::size_t mask_count) {
  json body = {{"text_with_masks", masked_text}, {"mask_token", mask_token}};
  auto res = post_json(endpoint_, body.dump(), {}, timeout_);
  raise_for(res, "fill-mask");
  try {
    auto tokens = json::parse(res->body).at("tokens").get<std::vector<std::string>>();
    if (tokens.size() != mask_count)
      throw ReconstructError("fill-mask returned " + std::to_string(tokens.size()) +
                             " tokens for " + std::to_string(mask_count) + " masks");
    return tokens;
  } catch (const json::exception& e) {
    throw ReconstructError(std::string("malformed fill-mask response: ") + e.what());
  }
}

}  // namespace synimp
