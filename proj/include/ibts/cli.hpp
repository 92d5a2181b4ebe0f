#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibts/classifier.hpp"
#include "ibts/dataset.hpp"
#include "ibts/explainer.hpp"

namespace ibts {

// Bad invocations and malformed configs (exit code 2), as opposed to runtime
// failures (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  bool from_dir = false;
  std::string dir;      // when from_dir
  GeneratorConfig gen;  // otherwise
};

struct ClassifierSpec {
  bool from_dir = false;
  std::string dir;  // pretrained checkpoint shared across seeds
  ClassifierConfig cfg;
};

struct EvalSpec {
  std::vector<std::string> metrics = {"auprc", "aup", "aur", "occlusion", "substitution"};
  std::vector<double> k_list = {25.0, 50.0, 75.0, 90.0};
  std::vector<std::string> substitution_modes = {"mean", "zero"};
  double substitution_fraction = 0.10;
};

// One JSON document per experiment. Every block is strict: unknown keys are
// rejected so typos fail loudly before any side effect.
struct ExperimentConfig {
  DatasetSpec dataset;
  ClassifierSpec classifier;
  ExplainerConfig explainer;
  EvalSpec eval;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = "runs/default";
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Fold layout: seed S lives under <output_dir>/seed<S>/ and offsets the
// dataset, classifier and explainer block seeds by S, so folds draw fresh
// data and fresh initializations.
std::string seed_dir(const ExperimentConfig& cfg, uint64_t seed);
TimeSeriesDataset dataset_for_seed(const ExperimentConfig& cfg, uint64_t seed);

void cmd_gen_data(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_train_classifier(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds);
void cmd_train_explainer(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds);
void cmd_evaluate(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds);
void cmd_diagnose(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds);

}  // namespace ibts
