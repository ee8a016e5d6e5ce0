#pragma once

#include <chrono>
#include <string>

#include "synimp/baselines.hpp"
#include "synimp/generator.hpp"

namespace synimp {

// "http://host:port/path" split into the part httplib connects to and the
// request path.
struct UrlParts {
  std::string origin;
  std::string path;
};
UrlParts split_url(const std::string& url);

struct ChatEndpointConfig {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{120};
};

// Chat-completions client. The rendered prompt goes out as the single system
// message; the reply is the first choice's message content.
class HttpChatProvider final : public GenerationProvider {
 public:
  explicit HttpChatProvider(ChatEndpointConfig config);
  std::string complete(const GenerationRequest& request) override;
  std::string model_id() const override { return config_.model; }

  static std::string request_body(const std::string& model, const GenerationRequest& request);
  // Throws GenerationError when the reply carries no text.
  static std::string extract_text(const std::string& response_body);

 private:
  ChatEndpointConfig config_;
};

// Fill-mask client: POST {"text_with_masks": ...} -> {"tokens": [...]}, one
// token per mask in order.
class HttpFillMaskProvider final : public FillMaskProvider {
 public:
  explicit HttpFillMaskProvider(std::string endpoint,
                                std::chrono::seconds timeout = std::chrono::seconds{60});
  std::vector<std::string> fill(const std::string& masked_text, const std::string& mask_token,
                                std::size_t mask_count) override;
  std::string name() const override { return "http:" + endpoint_; }

 private:
  std::string endpoint_;
  std::chrono::seconds timeout_;
};

}  // namespace synimp
