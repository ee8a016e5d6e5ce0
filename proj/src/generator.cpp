#include "synimp/generator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <sstream>
#include <thread>

#include "synimp/digest.hpp"
#include "synimp/lexicon.hpp"
#include "synimp/rng.hpp"
#include "synimp/text.hpp"

namespace synimp {

namespace detail {
extern const std::string_view kNostalgiaTemplate;
extern const std::string_view kSpeechesTemplate;
}  // namespace detail

std::size_t PromptTemplate::slot_count() const {
  std::size_t n = 0;
  for (std::size_t pos = body.find(kSlot); pos != std::string::npos;
       pos = body.find(kSlot, pos + kSlot.size()))
    ++n;
  return n;
}

void PromptTemplate::validate() const {
  std::size_t n = slot_count();
  if (n != kExamplesPerPrompt)
    throw std::invalid_argument("prompt template '" + name + "' has " + std::to_string(n) +
                                " example slots, expected 5");
}

PromptTemplate builtin_template(std::string_view name) {
  if (name == "nostalgia")
    return {"nostalgia", std::string(detail::kNostalgiaTemplate), "nostalgic",
            "vary names, countries and topics; keep a nostalgic tone"};
  if (name == "speeches")
    return {"speeches", std::string(detail::kSpeechesTemplate), "international",
            "vary names, countries and topics; keep the international tone"};
  throw std::out_of_range("no builtin template named '" + std::string(name) + "'");
}

std::vector<std::string> builtin_template_names() { return {"nostalgia", "speeches"}; }

std::string build_prompt(const PromptTemplate& t, const std::vector<LabeledExample>& examples) {
  t.validate();
  if (examples.size() != kExamplesPerPrompt)
    throw std::invalid_argument("build_prompt needs exactly 5 examples, got " +
                                std::to_string(examples.size()));
  // Split the body first so that "{}" inside an example text is never
  // mistaken for a slot.
  std::string out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < kExamplesPerPrompt; ++i) {
    std::size_t pos = t.body.find(kSlot, start);
    out.append(t.body, start, pos - start);
    out += examples[i].text;
    start = pos + kSlot.size();
  }
  out.append(t.body, start);
  return out;
}

std::vector<LabeledExample> draw_examples(const Corpus& pool, std::uint64_t seed, bool distinct) {
  if (pool.empty()) throw std::invalid_argument("draw_examples: empty pool");
  if (distinct && pool.size() < kExamplesPerPrompt)
    throw std::invalid_argument("draw_examples: distinct draws need a pool of at least 5");
  Rng rng(seed);
  std::vector<LabeledExample> out;
  std::vector<std::size_t> picked;
  while (out.size() < kExamplesPerPrompt) {
    auto k = static_cast<std::size_t>(rng.below(pool.size()));
    if (distinct && std::find(picked.begin(), picked.end(), k) != picked.end()) continue;
    picked.push_back(k);
    out.push_back(pool[k]);
  }
  return out;
}

std::string_view to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::pending: return "pending";
    case CandidateStatus::accepted: return "accepted";
    case CandidateStatus::rejected: return "rejected";
    case CandidateStatus::flagged: return "flagged";
  }
  return "pending";
}

CandidateStatus candidate_status_from_string(std::string_view s) {
  if (s == "pending") return CandidateStatus::pending;
  if (s == "accepted") return CandidateStatus::accepted;
  if (s == "rejected") return CandidateStatus::rejected;
  if (s == "flagged") return CandidateStatus::flagged;
  throw std::invalid_argument("unknown candidate status '" + std::string(s) + "'");
}

bool is_legal_transition(CandidateStatus from, CandidateStatus to) {
  using S = CandidateStatus;
  switch (from) {
    case S::pending: return to == S::accepted || to == S::rejected || to == S::flagged;
    case S::flagged: return to == S::accepted || to == S::rejected;
    default: return false;
  }
}

MockProvider::MockProvider(double similarity) : similarity_(similarity) {
  if (!(similarity >= 0.0 && similarity <= 1.0))
    throw std::invalid_argument("mock similarity must be in [0, 1]");
}

std::string MockProvider::model_id() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "mock-s" << similarity_;
  return os.str();
}

std::string MockProvider::complete(const GenerationRequest& request) {
  if (request.examples.empty()) throw GenerationError("mock provider needs prompt examples");
  Rng rng(derive_seed(request.seed, fnv1a64(request.system_prompt)));
  const auto& skeleton_text = request.examples[rng.below(request.examples.size())];
  auto skeleton = split_words(skeleton_text);
  std::vector<std::string> pooled;
  for (const auto& ex : request.examples)
    for (auto& w : split_words(ex)) pooled.push_back(std::move(w));
  if (skeleton.empty() || pooled.empty()) return {};

  std::size_t len = std::min(skeleton.size(), std::max<std::size_t>(1, request.params.max_output_words));
  std::vector<std::string> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (rng.bernoulli(similarity_)) {
      out.push_back(skeleton[i]);
    } else if (rng.bernoulli(similarity_)) {
      out.push_back(pooled[rng.below(pooled.size())]);
    } else {
      out.emplace_back(lexicon::pick(rng.next()));
    }
  }
  return join_words(out);
}

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second), burst_(std::max(1.0, burst)), tokens_(burst_),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0) return;
  std::unique_lock lock(mu_);
  while (true) {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

std::string generate_candidate(GenerationProvider& provider, const GenerationRequest& request,
                               const RetryPolicy& retry, RateLimiter* limiter, int* attempts) {
  if (trim(request.system_prompt).empty()) throw GenerationError("empty prompt");
  auto sleep = retry.sleep ? retry.sleep : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
  const int max_attempts = std::max(1, retry.max_attempts);
  double delay = static_cast<double>(retry.initial_delay.count());
  for (int attempt = 1;; ++attempt) {
    if (attempts) *attempts = attempt;
    if (limiter) limiter->acquire();
    try {
      std::string text = provider.complete(request);
      if (trim(text).empty()) throw GenerationError("empty completion");
      return text;
    } catch (const TransportError& e) {
      if (!e.transient() || attempt >= max_attempts) throw;
      auto wait = std::chrono::milliseconds(static_cast<long long>(
          std::min(delay, static_cast<double>(retry.max_delay.count()))));
      if (e.retry_after()) wait = std::min(std::max(wait, *e.retry_after()), retry.max_delay);
      sleep(wait);
      delay *= retry.multiplier;
    }
  }
}

std::string candidate_id(std::string_view prefix, std::uint64_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return std::string(prefix) + "-" + digits;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

GenerationResult run_generation(const Corpus& pool, std::size_t count,
                                const PromptTemplate& tmpl, GenerationProvider& provider,
                                const GenerationOptions& options) {
  GenerationResult result;
  if (count == 0) return result;
  if (pool.empty()) throw std::invalid_argument("run_generation: empty pool");
  tmpl.validate();

  // Draws and prompts are fixed before dispatch.
  struct Job {
    GenerationRecord record;
    GenerationRequest request;
  };
  std::vector<Job> jobs(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& job = jobs[i];
    const std::uint64_t index = options.start_index + i;
    const std::uint64_t seed = derive_seed(options.master_seed, index);
    auto examples = draw_examples(pool, seed, options.distinct_examples);
    job.request.system_prompt = build_prompt(tmpl, examples);
    job.request.params = options.params;
    job.request.seed = seed;
    auto& r = job.record;
    r.candidate_id = candidate_id(options.id_prefix, index);
    r.index = index;
    r.category = tmpl.category.empty() ? pool[0].label : tmpl.category;
    r.original_count = options.original_count;
    r.prompt_hash = sha256_hex(job.request.system_prompt);
    r.prompt_version = options.prompt_version;
    r.model_id = provider.model_id();
    r.seed = seed;
    for (auto& ex : examples) {
      r.example_ids.push_back(ex.id);
      job.request.examples.push_back(std::move(ex.text));
    }
  }

  std::vector<std::optional<std::string>> errors(count);
  std::vector<bool> done(count, false);
  std::mutex out_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      auto& job = jobs[i];
      try {
        job.record.text = generate_candidate(provider, job.request, options.retry,
                                             options.limiter);
        job.record.created_at = options.now ? options.now() : utc_timestamp();
        std::lock_guard lock(out_mu);
        done[i] = true;
        if (options.on_record) options.on_record(job.record);
      } catch (const std::exception& e) {
        std::lock_guard lock(out_mu);
        errors[i] = e.what();
      }
    }
  };
  const std::size_t nthreads = std::clamp<std::size_t>(options.parallel, 1, count);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(worker);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (done[i]) result.records.push_back(std::move(jobs[i].record));
    else result.failures.push_back({options.start_index + i, errors[i].value_or("unknown error")});
  }
  return result;
}

}  // namespace synimp
