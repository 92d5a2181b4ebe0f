#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibts/adam.hpp"
#include "ibts/dataset.hpp"
#include "ibts/random.hpp"
#include "ibts/tensor.hpp"

namespace ibts {

enum class EncoderKind { SelfAttention, GatedRecurrent, TemporalMlp };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string encoder_kind_to_string(EncoderKind kind);

struct ClassifierConfig {
  EncoderKind encoder = EncoderKind::SelfAttention;
  int64_t d_hidden = 16;
  double dropout = 0.1;
  double lr = 1e-3;
  double weight_decay = 0.1;  // decoupled
  int64_t epochs = 100;
  int64_t batch_size = 64;
  uint64_t seed = 0;
};

void validate(const ClassifierConfig& cfg);

// A trained (or initializing) classifier. `frozen` marks parameters as final:
// freezing is required before the model may serve as a differentiable oracle
// for explanation training or input gradients.
struct ClassifierModel {
  ClassifierConfig config;
  int64_t T = 0, D = 0, C = 0;
  ParamSet params;
  bool frozen = false;
};

ClassifierModel init_classifier(const ClassifierConfig& cfg, int64_t T, int64_t D, int64_t C);

// Forward pass to logits (N, C). Parameters are passed explicitly so the
// training loop can substitute tape-watched leaves. Dropout fires only when
// `dropout_rng` is non-null.
Tensor classifier_logits(const ClassifierModel& model, const ParamSet& params, const Tensor& X,
                         Rng* dropout_rng);

// (N, C) softmax probabilities; eval mode, evaluated in chunks.
Tensor predict_proba(const ClassifierModel& model, const Tensor& X);

// d<upstream, probs>/dX with shape (N, T, D), for upstream weights (N, C).
// Throws unless the model is frozen; parameters receive no gradient.
Tensor input_vjp(const ClassifierModel& model, const Tensor& X, const Tensor& upstream);

struct EpochStats {
  int64_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct ClassifierTrainReport {
  std::vector<EpochStats> history;
  int64_t best_epoch = 0;
  double best_val_macro_f1 = 0.0;
  double test_accuracy = 0.0;
  double test_macro_f1 = 0.0;
  double test_auroc = 0.0;
};

// Cross-entropy training with Adam and decoupled weight decay; the checkpoint
// with the best validation macro-F1 wins. The returned model is frozen.
ClassifierModel train_classifier(const ClassifierConfig& cfg, const TimeSeriesDataset& ds,
                                 ClassifierTrainReport* report = nullptr);

// model.json + one .bin blob per parameter. Saving the same model twice
// produces byte-identical files.
void save_classifier(const ClassifierModel& model, const std::string& dir);
ClassifierModel load_classifier(const std::string& dir);

// Dataset split as a (N, T, D) tensor / label vector.
Tensor split_tensor(const TimeSeriesDataset& ds, const std::string& which);
std::vector<int32_t> split_labels(const TimeSeriesDataset& ds, const std::string& which);

}  // namespace ibts
