#include "synimp/trainer.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sys/wait.h>
#include <unistd.h>

namespace synimp {

using nlohmann::json;
namespace fs = std::filesystem;

nlohmann::json finetune_hyperparams(bool cross_lingual) {
  return {{"model", cross_lingual ? "xlm-roberta-large" : "roberta-large"},
          {"batch_size", 16},
          {"learning_rate", cross_lingual ? 5e-6 : 3e-5},
          {"epochs", 6},
          {"early_stopping", {{"metric", "val_loss"}, {"patience", 1}}},
          {"warmup_steps", 10},
          {"adam_epsilon", 1e-6},
          {"max_length", 512}};
}

std::vector<UnlabeledExample> strip_labels(const Corpus& c) {
  std::vector<UnlabeledExample> out;
  out.reserve(c.size());
  for (const auto& e : c) out.push_back({e.id, e.text});
  return out;
}

void write_eval_file(const fs::path& path, const std::vector<UnlabeledExample>& eval) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrainerError("cannot write " + path.string());
  for (const auto& e : eval) out << json{{"id", e.id}, {"text", e.text}}.dump() << '\n';
}

std::vector<UnlabeledExample> read_eval_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrainerError("cannot open " + path.string());
  std::vector<UnlabeledExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
    } catch (const json::exception& e) {
      throw TrainerError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const fs::path& path, const std::vector<UnlabeledExample>& eval,
                       const std::vector<std::string>& labels) {
  if (labels.size() != eval.size()) throw TrainerError("prediction count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TrainerError("cannot write " + path.string());
  for (std::size_t i = 0; i < eval.size(); ++i)
    out << json{{"id", eval[i].id}, {"label", labels[i]}}.dump() << '\n';
}

std::vector<std::string> read_predictions(const fs::path& path,
                                          const std::vector<UnlabeledExample>& eval,
                                          const std::set<std::string>& allowed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrainerError("trainer wrote no predictions at " + path.string());
  std::map<std::string, std::string> got;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id, label;
    try {
      auto j = json::parse(line);
      id = j.at("id").get<std::string>();
      label = j.at("label").get<std::string>();
    } catch (const json::exception& e) {
      throw TrainerError(std::string("malformed prediction row: ") + e.what());
    }
    if (!allowed.count(label)) throw TrainerError("prediction label '" + label + "' not in training labels");
    if (!got.emplace(id, label).second) throw TrainerError("duplicate prediction for id '" + id + "'");
  }
  std::vector<std::string> out;
  out.reserve(eval.size());
  for (const auto& e : eval) {
    auto it = got.find(e.id);
    if (it == got.end()) throw TrainerError("no prediction for eval id '" + e.id + "'");
    out.push_back(it->second);
  }
  if (got.size() != eval.size()) throw TrainerError("predictions contain ids not in the eval set");
  return out;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

SubprocessTrainer::SubprocessTrainer(std::string command, fs::path scratch_root)
    : command_(std::move(command)),
      scratch_root_(scratch_root.empty() ? fs::temp_directory_path() : std::move(scratch_root)) {
  if (command_.empty()) throw std::invalid_argument("trainer command must not be empty");
}

std::vector<std::string> SubprocessTrainer::train_and_predict(
    const Corpus& train, const std::vector<UnlabeledExample>& eval, const json& hyperparams) {
  static std::atomic<unsigned> counter{0};
  fs::path dir = scratch_root_ / ("synimp-trainer-" + std::to_string(::getpid()) + "-" +
                                  std::to_string(counter++));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};
  const auto train_p = dir / "train.jsonl";
  const auto eval_p = dir / "eval.jsonl";
  const auto hyper_p = dir / "hyperparams.json";
  const auto pred_p = dir / "predictions.jsonl";
  save_corpus(train_p, train, CorpusFormat::jsonl);
  write_eval_file(eval_p, eval);
  {
    std::ofstream h(hyper_p, std::ios::binary | std::ios::trunc);
    h << hyperparams.dump(2) << '\n';
  }
  std::string cmd = command_ + " " + shell_quote(train_p.string()) + " " +
                    shell_quote(eval_p.string()) + " " + shell_quote(hyper_p.string()) + " " +
                    shell_quote(pred_p.string());
  int rc = std::system(cmd.c_str());
  if (rc == -1) throw TrainerError("could not launch trainer: " + command_);
  if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0)
    throw TrainerError("trainer exited with status " +
                       std::to_string(WIFEXITED(rc) ? WEXITSTATUS(rc) : -1) + ": " + command_);
  return read_predictions(pred_p, eval, train.labels());
}

int serve_trainer_protocol(Trainer& trainer, const fs::path& train, const fs::path& eval,
                           const fs::path& hyperparams, const fs::path& predictions,
                           std::ostream& err) {
  try {
    auto train_set = load_corpus(train, CorpusFormat::jsonl);
    auto eval_set = read_eval_file(eval);
    json hyper = json::object();
    if (!hyperparams.empty() && fs::exists(hyperparams)) {
      std::ifstream h(hyperparams);
      hyper = json::parse(h);
    }
    write_predictions(predictions, eval_set, trainer.train_and_predict(train_set, eval_set, hyper));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace synimp
