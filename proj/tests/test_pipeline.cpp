#include <doctest.h>

#include "support.hpp"
#include "synimp/pipeline.hpp"

using namespace synimp;
using nlohmann::json;

namespace {

json small_config(const std::filesystem::path& corpus) {
  return {{"run_id", "pipe"},
          {"corpus", corpus.string()},
          {"category", "nostalgic"},
          {"original_sizes", {50, 100}},
          {"provider", {{"kind", "mock"}, {"similarity", 0.5}}},
          {"master_seed", 11},
          {"parallel", 1},
          {"k", 5},
          {"repeats", 1},
          {"strategies", {"none", "imputation"}}};
}

RunConfig config_for(const std::filesystem::path& corpus) {
  return run_config_from_json(small_config(corpus));
}

std::size_t count_status(const Run& run, CandidateStatus s) {
  std::size_t n = 0;
  for (const auto& c : run.candidates()) n += c.status == s;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto corpus = test::data_file("nostalgia_desk.jsonl");
  auto c = config_for(corpus);
  CHECK(c.original_sizes == std::vector<std::size_t>{50, 100});
  CHECK(c.params.max_output_words == kNostalgiaMaxWords);
  CHECK(c.template_body.find("{}") != std::string::npos);

  auto bad = small_config(corpus);
  bad["epochs"] = 3;
  CHECK_THROWS_AS(run_config_from_json(bad), ConfigError);
  bad = small_config(corpus);
  bad["provider"]["api_key"] = "literal";
  CHECK_THROWS_AS(run_config_from_json(bad), ConfigError);
  bad = small_config(corpus);
  bad["corpus"] = "missing.jsonl";
  test::TempDir dir;
  CHECK_THROWS_AS(Run::create(dir / "run", run_config_from_json(bad, "/nonexistent")), CorpusError);
  bad = small_config(corpus);
  bad["template"] = "poetry";
  CHECK_THROWS_AS(run_config_from_json(bad), ConfigError);

  // The snapshot parses back to the same snapshot.
  auto snap = to_json(c);
  CHECK(to_json(run_config_from_json(snap)) == snap);
}

TEST_CASE("run lifecycle") {
  test::TempDir dir;
  const auto corpus = test::data_file("nostalgia_desk.jsonl");
  auto run = Run::create(dir / "run", config_for(corpus));
  CHECK_THROWS_AS(Run::create(dir / "run", config_for(corpus)), StateError);

  auto rec = run->record();
  CHECK(rec.state == RunState::created);
  CHECK(rec.plan["category_count"] == 151);
  REQUIRE(rec.plan["cells"].size() == 2);
  CHECK(rec.plan["cells"][0]["synthetic_needed"] == 101);
  CHECK(rec.plan["cells"][1]["synthetic_needed"] == 51);
  CHECK_THROWS_AS(run->evaluate(), StateError);

  auto result = run->generate();
  CHECK(result.failures.empty());
  CHECK(result.records.size() == 152);
  CHECK(run->record().state == RunState::reviewing);
  std::set<std::string> ids;
  for (const auto& c : run->candidates()) {
    ids.insert(c.candidate_id);
    CHECK(c.category == "nostalgic");
    CHECK(c.example_ids.size() == kExamplesPerPrompt);
    CHECK(c.prompt_version == 1);
  }
  CHECK(ids.size() == 152);

  // A full run generates nothing new.
  CHECK(run->generate().records.empty());

  // Rejection opens a deficit of one, filled under the edited prompt.
  const auto first = run->candidates().front().candidate_id;
  run->decide(first, CandidateStatus::rejected, "off topic");
  CHECK_THROWS_AS(run->decide(first, CandidateStatus::accepted, ""), StateError);
  CHECK_THROWS_AS(run->decide("nope", CandidateStatus::accepted, ""), NotFoundError);
  auto body = run->record().current_prompt().body + "\nKeep it short.";
  CHECK(run->edit_prompt(body).version == 2);
  CHECK_THROWS_AS(run->edit_prompt("no slots"), std::invalid_argument);
  auto regen = run->generate();
  REQUIRE(regen.records.size() == 1);
  CHECK(regen.records[0].prompt_version == 2);
  CHECK(regen.records[0].original_count == 50);
  CHECK(regen.records[0].index == 152);

  auto sim = run->validate();
  CHECK(sim["entries"].size() == 153);
  CHECK(run->similarity().has_value());

  // Reopening replays the same state.
  auto reopened = Run::open(dir / "run");
  CHECK(json(reopened->record()) == json(run->record()));
  CHECK(reopened->candidates().size() == 153);
  CHECK(count_status(*reopened, CandidateStatus::rejected) == 1);

  auto metrics = json::parse(reopened->evaluate());
  CHECK(reopened->record().state == RunState::done);
  CHECK(metrics["settings"]["k"] == 5);
  // Two cells times two strategies plus the true model.
  CHECK(metrics["cells"].size() == 5);
  for (const auto& cell : metrics["cells"]) {
    if (cell["strategy"] == "imputation") {
      // The rejected candidate is not trained on.
      CHECK(cell["synthetic_count"] == (cell["original_count"] == 50 ? 101 : 51));
    }
  }
  CHECK(reopened->metrics().has_value());
  CHECK_THROWS_AS(reopened->generate(), StateError);

  auto summary = summarize_run(*reopened);
  CHECK(summary.markdown.find("imputation") != std::string::npos);
  CHECK(summary.csv.rfind("strategy,original_count", 0) == 0);
}

TEST_CASE("interrupted generation resumes to the same candidates") {
  test::TempDir dir;
  const auto corpus = test::data_file("nostalgia_desk.jsonl");
  auto full = Run::create(dir / "full", config_for(corpus));
  full->generate();

  auto partial = Run::create(dir / "partial", config_for(corpus));
  partial->transition(RunState::generating);
  std::istringstream lines(test::slurp(dir / "full" / "candidates.jsonl"));
  std::string line, head;
  for (int i = 0; i < 40 && std::getline(lines, line); ++i) head += line + "\n";
  test::spit(dir / "partial" / "candidates.jsonl", head);
  partial.reset();

  auto resumed = Run::open(dir / "partial");
  CHECK(resumed->record().state == RunState::generating);
  CHECK(resumed->candidates().size() == 40);
  CHECK(resumed->generate().records.size() == 112);
  auto a = full->candidates();
  auto b = resumed->candidates();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].candidate_id == b[i].candidate_id);
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].example_ids == b[i].example_ids);
  }
}

TEST_CASE("generation output does not depend on parallelism") {
  test::TempDir dir;
  const auto corpus = test::data_file("nostalgia_desk.jsonl");
  auto one = Run::create(dir / "one", config_for(corpus));
  auto many = Run::create(dir / "many", config_for(corpus));
  many->set_parallel(8);
  one->generate();
  many->generate();
  auto a = one->candidates();
  auto b = many->candidates();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].text == b[i].text);
}

TEST_CASE("a corpus changed after creation fails the run") {
  test::TempDir dir;
  std::filesystem::copy_file(test::data_file("nostalgia_desk.jsonl"), dir / "corpus.jsonl");
  {
    auto run = Run::create(dir / "run", config_for(dir / "corpus.jsonl"));
    run->generate();
  }
  std::ofstream(dir / "corpus.jsonl", std::ios::app)
      << "{\"id\":\"extra\",\"text\":\"one more line\",\"label\":\"nostalgic\"}\n";
  auto run = Run::open(dir / "run");
  CHECK_THROWS(run->evaluate());
  CHECK(run->record().state == RunState::failed);
}
