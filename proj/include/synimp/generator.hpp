#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synimp/corpus.hpp"

namespace synimp {

inline constexpr std::size_t kExamplesPerPrompt = 5;
inline constexpr std::string_view kSlot = "{}";

// A few-shot instruction with exactly five "{}" slots, filled in order with
// Example 1..5.
struct PromptTemplate {
  std::string name;
  std::string body;
  std::string category;
  std::string constraints_note;

  std::size_t slot_count() const;
  // Throws std::invalid_argument unless slot_count() == 5.
  void validate() const;
};

// "nostalgia" or "speeches"; throws std::out_of_range for other names.
PromptTemplate builtin_template(std::string_view name);
std::vector<std::string> builtin_template_names();

std::string build_prompt(const PromptTemplate& t, const std::vector<LabeledExample>& examples);

// Five i.i.d. uniform draws with replacement. With `distinct`, repeats inside
// the tuple are redrawn (requires a pool of at least five).
std::vector<LabeledExample> draw_examples(const Corpus& pool, std::uint64_t seed,
                                          bool distinct = false);

enum class CandidateStatus { pending, accepted, rejected, flagged };

std::string_view to_string(CandidateStatus s);
CandidateStatus candidate_status_from_string(std::string_view s);
// pending -> {accepted, rejected, flagged}; flagged -> {accepted, rejected}.
bool is_legal_transition(CandidateStatus from, CandidateStatus to);

struct GenerationRecord {
  std::string candidate_id;
  std::uint64_t index = 0;
  std::string category;
  std::size_t original_count = 0;  // grid cell the candidate belongs to
  std::vector<std::string> example_ids;
  std::string prompt_hash;
  int prompt_version = 1;
  std::string model_id;
  std::uint64_t seed = 0;
  std::string text;
  CandidateStatus status = CandidateStatus::pending;
  std::string created_at;
};

struct GenerationParams {
  double temperature = 1.0;
  std::size_t max_output_words = 60;
};

inline constexpr std::size_t kNostalgiaMaxWords = 60;
inline constexpr std::size_t kSpeechMaxWords = 550;

struct GenerationRequest {
  std::string system_prompt;
  // Texts of the five prompt examples. Remote providers only see them through
  // system_prompt; the mock recombines them directly.
  std::vector<std::string> examples;
  GenerationParams params;
  std::uint64_t seed = 0;
};

// Provider failure. Transient errors (rate limits, 5xx, connection loss) are
// retried; others are not.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int status, bool transient,
                 std::optional<std::chrono::milliseconds> retry_after = std::nullopt)
      : std::runtime_error(what), status_(status), transient_(transient),
        retry_after_(retry_after) {}
  int status() const { return status_; }
  bool transient() const { return transient_; }
  std::optional<std::chrono::milliseconds> retry_after() const { return retry_after_; }

 private:
  int status_;
  bool transient_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationProvider {
 public:
  virtual ~GenerationProvider() = default;
  virtual std::string complete(const GenerationRequest& request) = 0;
  virtual std::string model_id() const = 0;
};

// Offline stand-in for a generative model. Takes one of the five examples as
// a skeleton and keeps each word with probability `similarity`; replaced words
// come from the pooled vocabulary of the five examples (probability
// `similarity`) or the bundled lexicon. similarity = 1 reproduces the skeleton,
// similarity = 0 yields a shuffle of pooled and lexicon vocabulary.
class MockProvider final : public GenerationProvider {
 public:
  explicit MockProvider(double similarity = 0.5);
  std::string complete(const GenerationRequest& request) override;
  std::string model_id() const override;
  double similarity() const { return similarity_; }

 private:
  double similarity_;
};

// Token bucket shared by concurrent workers.
class RateLimiter {
 public:
  // requests_per_second <= 0 disables limiting.
  RateLimiter(double requests_per_second, double burst = 1.0);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{500};
  std::chrono::milliseconds max_delay{8000};
  double multiplier = 2.0;
  // Replaceable for tests.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Sends one request with capped exponential backoff on transient failures.
// Throws TransportError after the last attempt, GenerationError on an empty
// completion. `attempts` receives the number of calls made.
std::string generate_candidate(GenerationProvider& provider, const GenerationRequest& request,
                               const RetryPolicy& retry = {}, RateLimiter* limiter = nullptr,
                               int* attempts = nullptr);

struct GenerationOptions {
  std::uint64_t master_seed = 0;
  std::uint64_t start_index = 0;  // first candidate index; seeds derive from it
  std::string id_prefix = "cand";
  std::size_t original_count = 0;
  int prompt_version = 1;
  bool distinct_examples = false;
  std::size_t parallel = 4;
  GenerationParams params;
  RetryPolicy retry;
  RateLimiter* limiter = nullptr;
  // Invoked once per finished record, serialized.
  std::function<void(const GenerationRecord&)> on_record;
  // Clock for created_at; defaults to UTC wall time.
  std::function<std::string()> now;
};

struct CandidateFailure {
  std::uint64_t index = 0;
  std::string message;
};

struct GenerationResult {
  std::vector<GenerationRecord> records;  // ordered by index
  std::vector<CandidateFailure> failures;
};

// Generates `count` candidates. Every candidate draws its own five examples
// from `pool` using derive_seed(master_seed, index), so the output does not
// depend on `parallel` and extending a run keeps earlier candidates intact.
GenerationResult run_generation(const Corpus& pool, std::size_t count,
                                const PromptTemplate& tmpl, GenerationProvider& provider,
                                const GenerationOptions& options);

std::string candidate_id(std::string_view prefix, std::uint64_t index);
std::string utc_timestamp();

}  // namespace synimp
