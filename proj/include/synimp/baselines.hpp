#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "synimp/corpus.hpp"

namespace synimp {

inline constexpr double kDefaultMaskRate = 0.4;
inline constexpr double kUpstreamMaskRate = 0.15;
inline constexpr double kMaskRateWarnAbove = 0.8;

struct MaskingConfig {
  double rate = kDefaultMaskRate;
  std::string mask_token = "<mask>";
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless 0 < rate <= 1 and the mask token is a
  // single non-empty word. Returns a warning for rates above 0.8.
  std::vector<std::string> validate() const;
};

struct MaskedText {
  std::vector<std::string> tokens;      // with mask tokens in place
  std::vector<std::size_t> positions;   // ascending
  std::string text() const;
};

// Number of positions masked for a text of `token_count` words.
std::size_t mask_count(std::size_t token_count, double rate);

// Replaces max(1, round(rate * n)) distinct positions, chosen uniformly, with
// the mask token. `forced_positions` overrides the random choice.
MaskedText mask_tokens(const std::string& text, const MaskingConfig& config,
                       const std::optional<std::vector<std::size_t>>& forced_positions = {});

class ReconstructError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FillMaskProvider {
 public:
  virtual ~FillMaskProvider() = default;
  // One replacement token per mask, in order of appearance.
  virtual std::vector<std::string> fill(const std::string& masked_text,
                                        const std::string& mask_token,
                                        std::size_t mask_count) = 0;
  virtual std::string name() const = 0;
};

// Deterministic substitutions from the bundled lexicon, keyed by the seed,
// the mask position and the masked text.
class BuiltinLexicalProvider final : public FillMaskProvider {
 public:
  explicit BuiltinLexicalProvider(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<std::string> fill(const std::string& masked_text, const std::string& mask_token,
                                std::size_t mask_count) override;
  std::string name() const override { return "builtin_lexical"; }

 private:
  std::uint64_t seed_;
};

// Fills every mask token. Unmasked words are kept verbatim and in order.
// Throws std::invalid_argument when the text has no mask, ReconstructError
// when the provider returns an empty, multi-word or mask token.
std::string reconstruct(const std::string& masked_text, FillMaskProvider& provider,
                        const std::string& mask_token = "<mask>");

struct AugmentedExample {
  LabeledExample example;
  std::string source_id;
  std::vector<std::size_t> masked_positions;  // SSMBA only
};

Corpus to_corpus(const std::vector<AugmentedExample>& batch);

// `count` outputs; each masks one uniformly drawn original (with replacement)
// and reconstructs it once.
std::vector<AugmentedExample> ssmba_augment(const Corpus& pool, std::size_t count,
                                            const MaskingConfig& config,
                                            FillMaskProvider& provider, std::uint64_t seed,
                                            const std::string& id_prefix = "ssmba");

enum class EdaOp { random_swap, random_delete, random_insert };

std::string_view to_string(EdaOp op);
EdaOp eda_op_from_string(std::string_view s);

// Applies the selected operations, in swap/delete/insert order, to a drawn
// original. Each operation acts round(strength * n) times for a source of n
// words; deletion always leaves at least one word. Inserted words are copies
// of words from the same source.
std::vector<AugmentedExample> eda_augment(const Corpus& pool, std::size_t count,
                                          const std::set<EdaOp>& ops, double strength,
                                          std::uint64_t seed,
                                          const std::string& id_prefix = "eda");

}  // namespace synimp
