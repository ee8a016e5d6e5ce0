#pragma once

#include <filesystem>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "synimp/corpus.hpp"

namespace synimp {

struct UnlabeledExample {
  std::string id;
  std::string text;
};

class TrainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Train on labeled data, return one label per eval example in eval order.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::vector<std::string> train_and_predict(const Corpus& train,
                                                     const std::vector<UnlabeledExample>& eval,
                                                     const nlohmann::json& hyperparams) = 0;
  virtual std::string name() const = 0;
};

std::vector<UnlabeledExample> strip_labels(const Corpus& c);

// hyperparams.json defaults for an external transformer fine-tuning trainer.
// Cross-lingual models use the lower learning rate.
nlohmann::json finetune_hyperparams(bool cross_lingual = false);

// File side of the protocol. eval.jsonl rows are {"id","text"}; predictions
// rows are {"id","label"}.
void write_eval_file(const std::filesystem::path& path, const std::vector<UnlabeledExample>& eval);
std::vector<UnlabeledExample> read_eval_file(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path,
                       const std::vector<UnlabeledExample>& eval,
                       const std::vector<std::string>& labels);
// Checks one prediction per eval id, no extras, and labels drawn from
// `allowed`; returns labels in eval order. Throws TrainerError otherwise.
std::vector<std::string> read_predictions(const std::filesystem::path& path,
                                          const std::vector<UnlabeledExample>& eval,
                                          const std::set<std::string>& allowed);

// Runs `<command> TRAIN EVAL HYPERPARAMS PREDICTIONS` through /bin/sh in a
// scratch directory and reads the predictions back.
class SubprocessTrainer final : public Trainer {
 public:
  explicit SubprocessTrainer(std::string command, std::filesystem::path scratch_root = {});
  std::vector<std::string> train_and_predict(const Corpus& train,
                                             const std::vector<UnlabeledExample>& eval,
                                             const nlohmann::json& hyperparams) override;
  std::string name() const override { return "subprocess:" + command_; }

 private:
  std::string command_;
  std::filesystem::path scratch_root_;
};

// Trainer-side entry point: reads the three input files, runs `trainer` and
// writes predictions. Returns a process exit code.
int serve_trainer_protocol(Trainer& trainer, const std::filesystem::path& train,
                           const std::filesystem::path& eval,
                           const std::filesystem::path& hyperparams,
                           const std::filesystem::path& predictions, std::ostream& err);

}  // namespace synimp
