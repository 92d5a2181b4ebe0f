#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibts/random.hpp"

namespace ibts {

struct SplitSizes {
  int64_t train = 0, val = 0, test = 0;
};

struct SplitRange {
  int64_t begin = 0, end = 0;
  int64_t size() const { return end - begin; }
};

// Labeled multivariate time series with optional planted per-element saliency.
// X is row-major (N, T, D) float32; instances are stored split-contiguously:
// [0, train), [train, train+val), [train+val, N).
struct TimeSeriesDataset {
  std::string name;
  int64_t N = 0, T = 0, D = 0, C = 0;
  bool has_truth = false;
  SplitSizes splits;
  std::vector<float> X;    // N*T*D
  std::vector<int32_t> Y;  // N
  std::vector<uint8_t> Q;  // N*T*D, only when has_truth

  float x(int64_t i, int64_t t, int64_t d) const { return X[static_cast<size_t>((i * T + t) * D + d)]; }
  uint8_t q(int64_t i, int64_t t, int64_t d) const { return Q[static_cast<size_t>((i * T + t) * D + d)]; }
  SplitRange split(const std::string& which) const;
};

// NARMA(k) driven by u_t ~ U(0, 0.5), zero initial state (y[0] = 0):
//   y[t+1] = 0.3 y[t] + 0.05 y[t] * sum_{i=0..k-1} y[t-i] + 1.5 u[t-k+1] u[t] + 0.1
// with out-of-range y and u indices treated as zero. Throws if |y| exceeds 1e6.
std::vector<double> narma_series(int64_t T, int order, const std::vector<double>& u);
std::vector<double> narma_series(int64_t T, int order, Rng& rng);

enum class DatasetKind { FreqShapes, SeqCombUV, SeqCombMV, LowVar, Signaling };

DatasetKind dataset_kind_from_string(const std::string& s);
std::string dataset_kind_to_string(DatasetKind kind);

// Synthetic family parameters. T, D and the class count are fixed per kind
// (FreqShapes 50x1/4, SeqComb-UV 200x1/4, SeqComb-MV 200x4/4, LowVar 200x2/4);
// the signaling set is binary with one decisive position.
struct GeneratorConfig {
  DatasetKind kind = DatasetKind::FreqShapes;
  int64_t n_train = 500, n_val = 100, n_test = 200;
  uint64_t seed = 0;
  int narma_order = 10;
  double amplitude = 3.0;  // motif amplitude added on top of the background

  int period_short = 10, period_long = 20;  // FreqShapes spike periods
  int window_len = 15;                      // SeqComb ramp length
  int segment_len = 40;                     // LowVar segment length
  double var_scale = 0.1;                   // LowVar in-segment variance multiplier
  double mean_offset = 1.0;                 // LowVar in-segment mean shift

  int64_t signal_T = 20;  // Signaling series length
  int64_t signal_index = 7;  // decisive position n: label is 1[X[n] > 0]
};

void validate(const GeneratorConfig& config);

// One instance. The motif stream alone determines the label and the truth
// mask; the noise stream only fills in the background, so regenerating with a
// different noise stream flips values outside the planted support without
// changing the generating label.
void generate_instance(const GeneratorConfig& config, int64_t assigned_class, Rng motif_rng, Rng noise_rng,
                       float* x_out, uint8_t* q_out, int32_t* y_out);

// Full dataset; instance i uses per-instance streams derived from seed ^ i.
TimeSeriesDataset generate_dataset(const GeneratorConfig& config);

// Directory layout: manifest.json + X.bin (f32) + Y.bin (i32) + Q.bin (u8).
void save_dataset(const TimeSeriesDataset& ds, const std::string& dir);
TimeSeriesDataset load_dataset(const std::string& dir);

}  // namespace ibts
