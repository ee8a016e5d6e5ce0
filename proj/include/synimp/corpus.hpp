#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synimp {

enum class Origin { original, synthetic_llm, synthetic_ssmba, synthetic_eda };

std::string_view to_string(Origin o);
Origin origin_from_string(std::string_view s);

struct LabeledExample {
  std::string id;
  std::string text;
  std::string label;
  Origin origin = Origin::original;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Raised for malformed input files and invariant violations. `line()` is the
// 1-based source line when the error comes from a file.
class CorpusError : public std::runtime_error {
 public:
  explicit CorpusError(const std::string& what, std::optional<std::size_t> line = std::nullopt);
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

// Ordered, immutable collection of examples with unique ids.
class Corpus {
 public:
  Corpus() = default;
  // Throws CorpusError when an example has an empty id, blank text, a blank
  // label, or a duplicate id. Labels are stored trimmed.
  explicit Corpus(std::vector<LabeledExample> examples);

  const std::vector<LabeledExample>& examples() const { return examples_; }
  const std::set<std::string>& labels() const { return labels_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }
  auto begin() const { return examples_.begin(); }
  auto end() const { return examples_.end(); }

  const LabeledExample* find(std::string_view id) const;
  bool contains_label(const std::string& label) const { return labels_.count(label) > 0; }

  // Examples with the given label, in corpus order.
  Corpus with_label(const std::string& label) const;
  Corpus without_label(const std::string& label) const;

  // Concatenation; throws on id collisions.
  Corpus merged(const Corpus& other) const;

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.examples_ == b.examples_; }

 private:
  std::vector<LabeledExample> examples_;
  std::set<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { jsonl, csv };

CorpusFormat format_from_string(std::string_view s);
// Guess from the file extension; ".csv" is csv, anything else jsonl.
CorpusFormat format_from_path(const std::filesystem::path& p);

Corpus read_corpus(std::istream& in, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(std::ostream& out, const Corpus& c, CorpusFormat format);
void save_corpus(const std::filesystem::path& path, const Corpus& c, CorpusFormat format);

struct LabelDistribution {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  std::map<std::string, double> shares;
};

LabelDistribution label_distribution(const Corpus& c);

// Keeps the first `max_tokens` whitespace-delimited words, re-joined with
// single spaces. Id, label and origin are unchanged.
LabeledExample truncate_to_tokens(const LabeledExample& e, std::size_t max_tokens);
Corpus truncate_corpus(const Corpus& c, std::size_t max_tokens);

inline constexpr std::size_t kDefaultMaxWords = 350;

// `n` distinct examples of `label`, uniformly without replacement, in draw
// order. Deterministic for a given seed.
Corpus draw_category_subset(const Corpus& c, const std::string& label, std::size_t n,
                            std::uint64_t seed);

// SHA-256 over the canonical JSONL serialization.
std::string corpus_digest(const Corpus& c);

}  // namespace synimp
