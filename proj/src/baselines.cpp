#include "synimp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "synimp/digest.hpp"
#include "synimp/lexicon.hpp"
#include "synimp/rng.hpp"
#include "synimp/text.hpp"

namespace synimp {

std::vector<std::string> MaskingConfig::validate() const {
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("masking rate must be in (0, 1]");
  if (mask_token.empty() || split_words(mask_token).size() != 1)
    throw std::invalid_argument("mask token must be a single non-empty word");
  std::vector<std::string> warnings;
  if (rate > kMaskRateWarnAbove)
    warnings.push_back("masking rate above 0.8 leaves little of the source sentence");
  return warnings;
}

std::string MaskedText::text() const { return join_words(tokens); }

std::size_t mask_count(std::size_t token_count, double rate) {
  if (token_count == 0) return 0;
  auto k = static_cast<std::size_t>(std::lround(rate * static_cast<double>(token_count)));
  return std::clamp<std::size_t>(k, 1, token_count);
}

MaskedText mask_tokens(const std::string& text, const MaskingConfig& config,
                       const std::optional<std::vector<std::size_t>>& forced_positions) {
  config.validate();
  MaskedText out;
  out.tokens = split_words(text);
  if (out.tokens.empty()) throw std::invalid_argument("mask_tokens: empty text");
  if (forced_positions) {
    out.positions = *forced_positions;
    std::sort(out.positions.begin(), out.positions.end());
    out.positions.erase(std::unique(out.positions.begin(), out.positions.end()),
                        out.positions.end());
    if (out.positions.empty() || out.positions.back() >= out.tokens.size())
      throw std::invalid_argument("mask_tokens: forced positions out of range");
  } else {
    Rng rng(config.seed);
    out.positions =
        rng.sample_without_replacement(out.tokens.size(), mask_count(out.tokens.size(), config.rate));
    std::sort(out.positions.begin(), out.positions.end());
  }
  for (std::size_t p : out.positions) out.tokens[p] = config.mask_token;
  return out;
}

std::vector<std::string> BuiltinLexicalProvider::fill(const std::string& masked_text,
                                                      const std::string& mask_token,
                                                      std::size_t) {
  const std::uint64_t text_key = fnv1a64(masked_text);
  auto tokens = split_words(masked_text);
  std::vector<std::string> out;
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (tokens[p] != mask_token) continue;
    out.emplace_back(lexicon::pick(derive_seed(seed_ ^ text_key, p)));
  }
  return out;
}

std::string reconstruct(const std::string& masked_text, FillMaskProvider& provider,
                        const std::string& mask_token) {
  auto tokens = split_words(masked_text);
  std::size_t masks = static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), mask_token));
  if (masks == 0) throw std::invalid_argument("reconstruct: text contains no mask token");
  auto fills = provider.fill(masked_text, mask_token, masks);
  if (fills.size() != masks)
    throw ReconstructError("provider returned " + std::to_string(fills.size()) + " tokens for " +
                           std::to_string(masks) + " masks");
  std::size_t k = 0;
  for (auto& t : tokens) {
    if (t != mask_token) continue;
    std::string fill(trim(fills[k++]));
    if (fill.empty()) throw ReconstructError("provider returned an empty token");
    if (split_words(fill).size() != 1)
      throw ReconstructError("provider returned a multi-word token '" + fill + "'");
    if (fill.find(mask_token) != std::string::npos)
      throw ReconstructError("provider returned the mask token");
    t = std::move(fill);
  }
  return join_words(tokens);
}

Corpus to_corpus(const std::vector<AugmentedExample>& batch) {
  std::vector<LabeledExample> out;
  out.reserve(batch.size());
  for (const auto& a : batch) out.push_back(a.example);
  return Corpus(std::move(out));
}

std::vector<AugmentedExample> ssmba_augment(const Corpus& pool, std::size_t count,
                                            const MaskingConfig& config,
                                            FillMaskProvider& provider, std::uint64_t seed,
                                            const std::string& id_prefix) {
  std::vector<AugmentedExample> out;
  if (count == 0) return out;
  if (pool.empty()) throw std::invalid_argument("ssmba_augment: empty pool");
  config.validate();
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t item_seed = derive_seed(seed, i);
    Rng rng(item_seed);
    const auto& src = pool[rng.below(pool.size())];
    MaskingConfig item_cfg = config;
    item_cfg.seed = rng.next();
    auto masked = mask_tokens(src.text, item_cfg);
    AugmentedExample a;
    a.example.id = id_prefix + "-" + std::to_string(i);
    a.example.text = reconstruct(masked.text(), provider, config.mask_token);
    a.example.label = src.label;
    a.example.origin = Origin::synthetic_ssmba;
    a.source_id = src.id;
    a.masked_positions = std::move(masked.positions);
    out.push_back(std::move(a));
  }
  return out;
}

std::string_view to_string(EdaOp op) {
  switch (op) {
    case EdaOp::random_swap: return "random_swap";
    case EdaOp::random_delete: return "random_delete";
    case EdaOp::random_insert: return "random_insert";
  }
  return "random_swap";
}

EdaOp eda_op_from_string(std::string_view s) {
  if (s == "random_swap" || s == "swap") return EdaOp::random_swap;
  if (s == "random_delete" || s == "delete") return EdaOp::random_delete;
  if (s == "random_insert" || s == "insert") return EdaOp::random_insert;
  throw std::invalid_argument("unknown EDA operation '" + std::string(s) + "'");
}

std::vector<AugmentedExample> eda_augment(const Corpus& pool, std::size_t count,
                                          const std::set<EdaOp>& ops, double strength,
                                          std::uint64_t seed, const std::string& id_prefix) {
  if (pool.empty()) throw std::invalid_argument("eda_augment: empty pool");
  if (!(strength >= 0.0 && strength <= 1.0))
    throw std::invalid_argument("eda strength must be in [0, 1]");
  std::vector<AugmentedExample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto& src = pool[rng.below(pool.size())];
    const auto source_words = split_words(src.text);
    const std::size_t n = source_words.size();
    const auto k = static_cast<std::size_t>(std::lround(strength * static_cast<double>(n)));
    auto words = source_words;
    bool changed = false;
    if (k > 0 && ops.count(EdaOp::random_swap) && words.size() >= 2) {
      for (std::size_t s = 0; s < k; ++s) {
        std::size_t a = rng.below(words.size());
        std::size_t b = rng.below(words.size());
        std::swap(words[a], words[b]);
      }
      changed = true;
    }
    if (k > 0 && ops.count(EdaOp::random_delete) && words.size() > 1) {
      std::size_t del = std::min(k, words.size() - 1);
      auto drop = rng.sample_without_replacement(words.size(), del);
      std::vector<bool> gone(words.size(), false);
      for (auto d : drop) gone[d] = true;
      std::vector<std::string> kept;
      for (std::size_t w = 0; w < words.size(); ++w)
        if (!gone[w]) kept.push_back(std::move(words[w]));
      words = std::move(kept);
      changed = true;
    }
    if (k > 0 && ops.count(EdaOp::random_insert)) {
      for (std::size_t s = 0; s < k; ++s) {
        const auto& w = source_words[rng.below(n)];
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), w);
      }
      changed = true;
    }
    AugmentedExample a;
    a.example.id = id_prefix + "-" + std::to_string(i);
    a.example.text = changed ? join_words(words) : src.text;
    a.example.label = src.label;
    a.example.origin = Origin::synthetic_eda;
    a.source_id = src.id;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace synimp
