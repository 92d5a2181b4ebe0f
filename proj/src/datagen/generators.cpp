#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibts/dataset.hpp"

namespace ibts {
namespace {

struct Dims {
  int64_t T, D, C;
};

Dims kind_dims(const GeneratorConfig& cfg) {
  switch (cfg.kind) {
    case DatasetKind::FreqShapes: return {50, 1, 4};
    case DatasetKind::SeqCombUV: return {200, 1, 4};
    case DatasetKind::SeqCombMV: return {200, 4, 4};
    case DatasetKind::LowVar: return {200, 2, 4};
    case DatasetKind::Signaling: return {cfg.signal_T, 1, 2};
  }
  throw std::invalid_argument("unknown dataset kind");
}

// interval overlap on [a, a+len) vs [b, b+len)
bool overlaps(int64_t a, int64_t b, int64_t len) { return (a > b ? a - b : b - a) < len; }

void add_ramp(std::vector<double>& x, std::vector<uint8_t>& q, int64_t D, int64_t start, int64_t len,
              int64_t ch, double amplitude, bool increasing) {
  for (int64_t j = 0; j < len; ++j) {
    double frac = static_cast<double>(j) / static_cast<double>(len - 1) - 0.5;
    double v = amplitude * (increasing ? frac : -frac);
    x[static_cast<size_t>((start + j) * D + ch)] += v;
    q[static_cast<size_t>((start + j) * D + ch)] = 1;
  }
}

}  // namespace

SplitRange TimeSeriesDataset::split(const std::string& which) const {
  if (which == "train") return {0, splits.train};
  if (which == "val") return {splits.train, splits.train + splits.val};
  if (which == "test") return {splits.train + splits.val, N};
  throw std::invalid_argument("unknown split '" + which + "' (expected train/val/test)");
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "freqshapes") return DatasetKind::FreqShapes;
  if (s == "seqcomb-uv") return DatasetKind::SeqCombUV;
  if (s == "seqcomb-mv") return DatasetKind::SeqCombMV;
  if (s == "lowvar") return DatasetKind::LowVar;
  if (s == "signaling") return DatasetKind::Signaling;
  throw std::invalid_argument("unknown dataset kind '" + s +
                              "' (expected freqshapes, seqcomb-uv, seqcomb-mv, lowvar, signaling)");
}

std::string dataset_kind_to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::FreqShapes: return "freqshapes";
    case DatasetKind::SeqCombUV: return "seqcomb-uv";
    case DatasetKind::SeqCombMV: return "seqcomb-mv";
    case DatasetKind::LowVar: return "lowvar";
    case DatasetKind::Signaling: return "signaling";
  }
  throw std::invalid_argument("unknown dataset kind");
}

void validate(const GeneratorConfig& cfg) {
  Dims dims = kind_dims(cfg);
  if (cfg.n_train <= 0 || cfg.n_val <= 0 || cfg.n_test <= 0)
    throw std::invalid_argument("generator: split sizes must be positive");
  if (cfg.narma_order < 1) throw std::invalid_argument("generator: narma_order must be >= 1");
  if (cfg.amplitude <= 0.0) throw std::invalid_argument("generator: amplitude must be positive");
  if (cfg.kind == DatasetKind::FreqShapes) {
    if (cfg.period_short < 2 || cfg.period_long < 2 || cfg.period_short >= dims.T || cfg.period_long >= dims.T)
      throw std::invalid_argument("generator: spike periods must lie in [2, T)");
  }
  if (cfg.kind == DatasetKind::SeqCombUV || cfg.kind == DatasetKind::SeqCombMV) {
    if (cfg.window_len < 2 || 2 * cfg.window_len > dims.T)
      throw std::invalid_argument("generator: window_len must satisfy 2 <= len and 2*len <= T");
  }
  if (cfg.kind == DatasetKind::LowVar) {
    if (cfg.segment_len < 2 || cfg.segment_len > dims.T)
      throw std::invalid_argument("generator: segment_len must lie in [2, T]");
    if (cfg.var_scale <= 0.0 || cfg.var_scale >= 1.0)
      throw std::invalid_argument("generator: var_scale must lie in (0, 1)");
  }
  if (cfg.kind == DatasetKind::Signaling) {
    if (cfg.signal_T < 2) throw std::invalid_argument("generator: signal_T must be >= 2");
    if (cfg.signal_index < 0 || cfg.signal_index >= cfg.signal_T)
      throw std::invalid_argument("generator: signal_index must lie in [0, signal_T)");
  }
}

void generate_instance(const GeneratorConfig& cfg, int64_t assigned_class, Rng motif_rng, Rng noise_rng,
                       float* x_out, uint8_t* q_out, int32_t* y_out) {
  Dims dims = kind_dims(cfg);
  int64_t T = dims.T, D = dims.D;
  std::vector<double> x(static_cast<size_t>(T * D), 0.0);
  std::vector<uint8_t> q(static_cast<size_t>(T * D), 0);
  int64_t y = assigned_class;

  if (cfg.kind == DatasetKind::Signaling) {
    for (int64_t t = 0; t < T; ++t) x[static_cast<size_t>(t)] = noise_rng.uniform() < 0.5 ? -1.0 : 1.0;
    x[static_cast<size_t>(cfg.signal_index)] = assigned_class == 1 ? 1.0 : -1.0;
    q[static_cast<size_t>(cfg.signal_index)] = 1;
  } else {
    std::vector<std::vector<double>> bg(static_cast<size_t>(D));
    for (int64_t d = 0; d < D; ++d) {
      bg[static_cast<size_t>(d)] = narma_series(T, cfg.narma_order, noise_rng);
      for (int64_t t = 0; t < T; ++t) x[static_cast<size_t>(t * D + d)] = bg[static_cast<size_t>(d)][static_cast<size_t>(t)];
    }
    switch (cfg.kind) {
      case DatasetKind::FreqShapes: {
        // class = spike sign x occurrence period
        double sign = assigned_class < 2 ? 1.0 : -1.0;
        int64_t period = (assigned_class % 2 == 0) ? cfg.period_short : cfg.period_long;
        int64_t phase = motif_rng.randint(period);
        for (int64_t pos = phase; pos < T; pos += period) {
          const double w[3] = {0.5, 1.0, 0.5};
          for (int64_t dt = -1; dt <= 1; ++dt) {
            int64_t t = pos + dt;
            if (t < 0 || t >= T) continue;
            x[static_cast<size_t>(t)] += sign * cfg.amplitude * w[dt + 1];
            q[static_cast<size_t>(t)] = 1;
          }
        }
        break;
      }
      case DatasetKind::SeqCombUV:
      case DatasetKind::SeqCombMV: {
        // class: 0 none, 1 increasing, 2 decreasing, 3 both (disjoint placements)
        int64_t L = cfg.window_len;
        bool inc = assigned_class == 1 || assigned_class == 3;
        bool dec = assigned_class == 2 || assigned_class == 3;
        int64_t span = T - L + 1;
        int64_t start_inc = -1, ch_inc = 0;
        if (inc) {
          start_inc = motif_rng.randint(span);
          ch_inc = D > 1 ? motif_rng.randint(D) : 0;
          add_ramp(x, q, D, start_inc, L, ch_inc, cfg.amplitude, true);
        }
        if (dec) {
          int64_t start_dec, ch_dec;
          int attempts = 0;
          do {
            start_dec = motif_rng.randint(span);
            ch_dec = D > 1 ? motif_rng.randint(D) : 0;
            if (++attempts > 1000) throw std::runtime_error("generator: failed to place disjoint windows");
          } while (inc && ch_dec == ch_inc && overlaps(start_inc, start_dec, L));
          add_ramp(x, q, D, start_dec, L, ch_dec, cfg.amplitude, false);
        }
        break;
      }
      case DatasetKind::LowVar: {
        // class = channel x offset sign; in-segment variance shrinks by var_scale
        int64_t ch = assigned_class / 2;
        double sign = assigned_class % 2 == 0 ? 1.0 : -1.0;
        int64_t start = motif_rng.randint(T - cfg.segment_len + 1);
        const auto& series = bg[static_cast<size_t>(ch)];
        double mean = 0.0;
        for (double v : series) mean += v;
        mean /= static_cast<double>(T);
        double shrink = std::sqrt(cfg.var_scale);
        for (int64_t j = 0; j < cfg.segment_len; ++j) {
          int64_t t = start + j;
          x[static_cast<size_t>(t * D + ch)] = mean + sign * cfg.mean_offset + shrink * (series[static_cast<size_t>(t)] - mean);
          q[static_cast<size_t>(t * D + ch)] = 1;
        }
        break;
      }
      default: throw std::invalid_argument("unknown dataset kind");
    }
  }

  for (int64_t i = 0; i < T * D; ++i) {
    x_out[i] = static_cast<float>(x[static_cast<size_t>(i)]);
    q_out[i] = q[static_cast<size_t>(i)];
  }
  *y_out = static_cast<int32_t>(y);
}

TimeSeriesDataset generate_dataset(const GeneratorConfig& cfg) {
  validate(cfg);
  Dims dims = kind_dims(cfg);
  TimeSeriesDataset ds;
  ds.name = dataset_kind_to_string(cfg.kind);
  ds.N = cfg.n_train + cfg.n_val + cfg.n_test;
  ds.T = dims.T;
  ds.D = dims.D;
  ds.C = dims.C;
  ds.has_truth = true;
  ds.splits = {cfg.n_train, cfg.n_val, cfg.n_test};
  ds.X.resize(static_cast<size_t>(ds.N * ds.T * ds.D));
  ds.Y.resize(static_cast<size_t>(ds.N));
  ds.Q.resize(static_cast<size_t>(ds.N * ds.T * ds.D));
  for (int64_t i = 0; i < ds.N; ++i) {
    Rng base(cfg.seed ^ static_cast<uint64_t>(i));
    generate_instance(cfg, i % dims.C, base.derive(1), base.derive(2), ds.X.data() + i * ds.T * ds.D,
                      ds.Q.data() + i * ds.T * ds.D, &ds.Y[static_cast<size_t>(i)]);
  }
  return ds;
}

}  // namespace ibts
