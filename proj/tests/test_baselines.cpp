#include <doctest.h>

#include <set>

#include "support.hpp"
#include "synimp/baselines.hpp"
#include "synimp/text.hpp"

using namespace synimp;

namespace {

class FixedFill : public FillMaskProvider {
 public:
  explicit FixedFill(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
  std::vector<std::string> fill(const std::string&, const std::string&, std::size_t) override { return tokens_; }
  std::string name() const override { return "fixed"; }

 private:
  std::vector<std::string> tokens_;
};

}  // namespace

TEST_CASE("mask count rule") {
  CHECK(mask_count(10, 0.4) == 4);
  CHECK(mask_count(6, 0.15) == 1);
  CHECK(mask_count(1, 0.4) == 1);
  CHECK(mask_count(5, 1.0) == 5);
  CHECK(mask_count(0, 0.4) == 0);
}

TEST_CASE("masking config validation") {
  MaskingConfig c;
  CHECK(c.rate == 0.4);
  CHECK(c.validate().empty());
  c.rate = 0.9;
  CHECK(c.validate().size() == 1);
  c.rate = 0.0;
  CHECK_THROWS(c.validate());
  c.rate = 1.1;
  CHECK_THROWS(c.validate());
  c.rate = 0.4;
  c.mask_token = "two words";
  CHECK_THROWS(c.validate());
}

TEST_CASE("masking a ten token text at 0.4") {
  MaskingConfig c;
  c.seed = 3;
  auto m = mask_tokens("a b c d e f g h i j", c);
  CHECK(m.positions.size() == 4);
  CHECK(std::is_sorted(m.positions.begin(), m.positions.end()));
  std::size_t masks = 0;
  for (const auto& t : m.tokens) masks += t == "<mask>";
  CHECK(masks == 4);
  CHECK(mask_tokens("a b c d e f g h i j", c).positions == m.positions);
}

TEST_CASE("the illustrative two of six pattern") {
  auto m = mask_tokens("The cat sat on the mat", MaskingConfig{}, std::vector<std::size_t>{1, 4});
  CHECK(m.text() == "The <mask> sat on <mask> mat");
  FixedFill f({"dog", "a"});
  CHECK(reconstruct(m.text(), f) == "The dog sat on a mat");
}

TEST_CASE("reconstruct contract") {
  FixedFill ok({"x"});
  CHECK_THROWS_AS(reconstruct("no masks here", ok), std::invalid_argument);
  FixedFill too_many({"x", "y"});
  CHECK_THROWS_AS(reconstruct("a <mask> b", too_many), ReconstructError);
  FixedFill masky({"<mask>"});
  CHECK_THROWS_AS(reconstruct("a <mask> b", masky), ReconstructError);
  FixedFill empty({" "});
  CHECK_THROWS_AS(reconstruct("a <mask> b", empty), ReconstructError);
  FixedFill multi({"two words"});
  CHECK_THROWS_AS(reconstruct("a <mask> b", multi), ReconstructError);
}

TEST_CASE("builtin provider keeps unmasked tokens") {
  BuiltinLexicalProvider p(7);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::string text = "w0 w1 w2 w3 w4 w5 w6 w7 w8 w9 w10 w11";
    MaskingConfig c;
    c.seed = seed;
    auto m = mask_tokens(text, c);
    auto out = split_words(reconstruct(m.text(), p));
    auto src = split_words(text);
    REQUIRE(out.size() == src.size());
    std::set<std::size_t> masked(m.positions.begin(), m.positions.end());
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!masked.count(i)) CHECK(out[i] == src[i]);
      else CHECK(out[i] != src[i]);
  }
}

TEST_CASE("ssmba batch") {
  auto pool = test::make_corpus({{"a", "one two three four five", "c"}, {"b", "six seven eight nine ten", "c"}});
  BuiltinLexicalProvider p(1);
  MaskingConfig c;
  auto batch = ssmba_augment(pool, 6, c, p, 42);
  REQUIRE(batch.size() == 6);
  for (const auto& b : batch) {
    const auto* src = pool.find(b.source_id);
    REQUIRE(src);
    CHECK(b.example.label == "c");
    CHECK(b.example.origin == Origin::synthetic_ssmba);
    CHECK(b.masked_positions.size() == 2);
    auto out = split_words(b.example.text);
    auto in = split_words(src->text);
    std::set<std::size_t> masked(b.masked_positions.begin(), b.masked_positions.end());
    for (std::size_t i = 0; i < in.size(); ++i)
      if (!masked.count(i)) CHECK(out[i] == in[i]);
  }
  CHECK(batch[0].example.id == "ssmba-0");
  auto again = ssmba_augment(pool, 6, c, p, 42);
  for (std::size_t i = 0; i < 6; ++i) CHECK(again[i].example == batch[i].example);
  auto corpus = to_corpus(batch);
  CHECK(corpus.size() == 6);
}

TEST_CASE("eda operations") {
  auto pool = test::make_corpus({{"s", "a b c d e f g h i j", "c"}});
  auto del = eda_augment(pool, 1, {EdaOp::random_delete}, 0.2, 5);
  CHECK(split_words(del[0].example.text).size() == 8);
  auto ins = eda_augment(pool, 1, {EdaOp::random_insert}, 0.2, 5);
  auto words = split_words(ins[0].example.text);
  CHECK(words.size() == 12);
  for (const auto& w : words) CHECK(std::string("abcdefghij").find(w) != std::string::npos);
  auto swp = eda_augment(pool, 1, {EdaOp::random_swap}, 0.2, 5);
  auto sw = split_words(swp[0].example.text);
  std::multiset<std::string> a(sw.begin(), sw.end());
  auto src = split_words(pool[0].text);
  CHECK(a == std::multiset<std::string>(src.begin(), src.end()));
  auto one = test::make_corpus({{"s", "solo", "c"}});
  CHECK(eda_augment(one, 1, {EdaOp::random_delete}, 1.0, 1)[0].example.text == "solo");
  CHECK(eda_op_from_string("swap") == EdaOp::random_swap);
  CHECK(eda_op_from_string("random_insert") == EdaOp::random_insert);
  CHECK_THROWS(eda_op_from_string("shuffle"));
  CHECK(del[0].example.origin == Origin::synthetic_eda);
}
