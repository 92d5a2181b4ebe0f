#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "ibts/dataset.hpp"
#include "ibts/io.hpp"

using namespace ibts;

TEST_CASE("narma order 1 with zero drive follows the hand-computed trajectory") {
  std::vector<double> u(9, 0.0);
  auto y = narma_series(10, 1, u);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(y[2] == doctest::Approx(0.1305).epsilon(1e-12));
}

TEST_CASE("narma: identical seeds give identical series, different seeds differ") {
  Rng a(11), b(11), c(12);
  auto ya = narma_series(64, 10, a);
  auto yb = narma_series(64, 10, b);
  auto yc = narma_series(64, 10, c);
  CHECK(ya == yb);
  CHECK(ya != yc);
  for (double v : ya) CHECK(std::fabs(v) < 10.0);
}

TEST_CASE("narma: divergent recurrence is reported") {
  // drive values far outside U(0, 0.5) blow the recurrence up
  std::vector<double> u(199, 4000.0);
  CHECK_THROWS_AS(narma_series(200, 1, u), std::runtime_error);
}

TEST_CASE("dataset shapes, class balance, and split layout") {
  struct Want {
    DatasetKind kind;
    int64_t T, D, C;
  };
  for (Want w : {Want{DatasetKind::FreqShapes, 50, 1, 4}, Want{DatasetKind::SeqCombUV, 200, 1, 4},
                 Want{DatasetKind::SeqCombMV, 200, 4, 4}, Want{DatasetKind::LowVar, 200, 2, 4},
                 Want{DatasetKind::Signaling, 20, 1, 2}}) {
    GeneratorConfig cfg;
    cfg.kind = w.kind;
    cfg.n_train = 42;
    cfg.n_val = 11;
    cfg.n_test = 17;
    cfg.seed = 3;
    TimeSeriesDataset ds = generate_dataset(cfg);
    CHECK(ds.T == w.T);
    CHECK(ds.D == w.D);
    CHECK(ds.C == w.C);
    CHECK(ds.N == 70);
    CHECK(ds.X.size() == static_cast<size_t>(ds.N * ds.T * ds.D));
    CHECK(ds.has_truth);
    std::vector<int64_t> counts(static_cast<size_t>(ds.C), 0);
    for (int32_t y : ds.Y) counts[static_cast<size_t>(y)]++;
    int64_t lo = *std::min_element(counts.begin(), counts.end());
    int64_t hi = *std::max_element(counts.begin(), counts.end());
    CHECK(hi - lo <= 1);
    CHECK(ds.split("train").size() == 42);
    CHECK(ds.split("val").begin == 42);
    CHECK(ds.split("test").end == 70);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::FreqShapes;
  cfg.n_train = 20;
  cfg.n_val = 4;
  cfg.n_test = 4;
  cfg.seed = 77;
  auto a = generate_dataset(cfg);
  auto b = generate_dataset(cfg);
  CHECK(a.X == b.X);
  CHECK(a.Y == b.Y);
  CHECK(a.Q == b.Q);
  cfg.seed = 78;
  auto c = generate_dataset(cfg);
  CHECK(a.X != c.X);
}

TEST_CASE("labels and truth masks depend only on the motif stream") {
  GeneratorConfig cfg;
  for (DatasetKind kind : {DatasetKind::FreqShapes, DatasetKind::SeqCombUV, DatasetKind::SeqCombMV,
                           DatasetKind::LowVar, DatasetKind::Signaling}) {
    cfg.kind = kind;
    int64_t TD = (kind == DatasetKind::FreqShapes ? 50 : kind == DatasetKind::Signaling ? 20 : 200) *
                 (kind == DatasetKind::SeqCombMV ? 4 : kind == DatasetKind::LowVar ? 2 : 1);
    std::vector<float> x1(static_cast<size_t>(TD)), x2(static_cast<size_t>(TD));
    std::vector<uint8_t> q1(static_cast<size_t>(TD)), q2(static_cast<size_t>(TD));
    int32_t y1, y2;
    int64_t cls = kind == DatasetKind::Signaling ? 1 : 3;
    generate_instance(cfg, cls, Rng(100), Rng(200), x1.data(), q1.data(), &y1);
    generate_instance(cfg, cls, Rng(100), Rng(201), x2.data(), q2.data(), &y2);
    CHECK(y1 == y2);
    CHECK(q1 == q2);
    CHECK(x1 != x2);  // fresh background noise
  }
}

TEST_CASE("signaling: label is the sign at the decisive position, background flips are harmless") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::Signaling;
  cfg.n_train = 40;
  cfg.n_val = 10;
  cfg.n_test = 10;
  cfg.seed = 5;
  auto ds = generate_dataset(cfg);
  for (int64_t i = 0; i < ds.N; ++i) {
    CHECK(ds.Y[static_cast<size_t>(i)] == (ds.x(i, cfg.signal_index, 0) > 0 ? 1 : 0));
    int64_t marked = 0;
    for (int64_t t = 0; t < ds.T; ++t) marked += ds.q(i, t, 0);
    CHECK(marked == 1);
    CHECK(ds.q(i, cfg.signal_index, 0) == 1);
    for (int64_t t = 0; t < ds.T; ++t) CHECK(std::fabs(std::fabs(ds.x(i, t, 0)) - 1.0f) < 1e-6);
  }
}

TEST_CASE("freqshapes: salient fraction stays at or below a quarter on average") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::FreqShapes;
  cfg.n_train = 200;
  cfg.n_val = 4;
  cfg.n_test = 4;
  cfg.seed = 9;
  auto ds = generate_dataset(cfg);
  double frac = std::accumulate(ds.Q.begin(), ds.Q.end(), 0.0) / static_cast<double>(ds.Q.size());
  CHECK(frac > 0.05);
  CHECK(frac <= 0.25);
}

TEST_CASE("seqcomb-mv: motifs land on channels uniformly and windows are disjoint per channel") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::SeqCombMV;
  cfg.n_train = 400;
  cfg.n_val = 4;
  cfg.n_test = 4;
  cfg.seed = 123;
  auto ds = generate_dataset(cfg);
  // one window = one placement; cell counts are window_len-correlated
  std::vector<double> per_channel(4, 0.0);
  for (int64_t i = 0; i < ds.N; ++i)
    for (int64_t t = 0; t < ds.T; ++t)
      for (int64_t d = 0; d < ds.D; ++d) per_channel[static_cast<size_t>(d)] += ds.q(i, t, d);
  for (double& c : per_channel) c /= static_cast<double>(cfg.window_len);
  double total = per_channel[0] + per_channel[1] + per_channel[2] + per_channel[3];
  double expected = total / 4.0;
  double chi2 = 0.0;
  for (double c : per_channel) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 20.0);  // df = 3

  // class 3 plants exactly two window_len runs
  for (int64_t i = 0; i < ds.N; ++i) {
    if (ds.Y[static_cast<size_t>(i)] != 3) continue;
    int64_t marked = 0;
    for (int64_t t = 0; t < ds.T; ++t)
      for (int64_t d = 0; d < ds.D; ++d) marked += ds.q(i, t, d);
    CHECK(marked == 2 * cfg.window_len);
  }
}

TEST_CASE("lowvar: in-segment variance is well below background variance") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::LowVar;
  cfg.n_train = 60;
  cfg.n_val = 4;
  cfg.n_test = 4;
  cfg.seed = 21;
  auto ds = generate_dataset(cfg);
  double in_var = 0, out_var = 0;
  int64_t n_in = 0, n_out = 0;
  for (int64_t i = 0; i < ds.N; ++i) {
    int64_t ch = ds.Y[static_cast<size_t>(i)] / 2;
    double m_in = 0, m_out = 0;
    int64_t c_in = 0, c_out = 0;
    for (int64_t t = 0; t < ds.T; ++t)
      (ds.q(i, t, ch) ? m_in : m_out) += ds.x(i, t, ch), (ds.q(i, t, ch) ? c_in : c_out)++;
    m_in /= static_cast<double>(c_in);
    m_out /= static_cast<double>(c_out);
    for (int64_t t = 0; t < ds.T; ++t) {
      double v = ds.x(i, t, ch);
      if (ds.q(i, t, ch)) {
        in_var += (v - m_in) * (v - m_in);
        n_in++;
      } else {
        out_var += (v - m_out) * (v - m_out);
        n_out++;
      }
    }
  }
  in_var /= static_cast<double>(n_in);
  out_var /= static_cast<double>(n_out);
  CHECK(in_var < 0.2 * out_var);
}

TEST_CASE("dataset save/load round trip is bit exact and validates its inputs") {
  GeneratorConfig cfg;
  cfg.kind = DatasetKind::FreqShapes;
  cfg.n_train = 12;
  cfg.n_val = 4;
  cfg.n_test = 4;
  cfg.seed = 31;
  auto ds = generate_dataset(cfg);
  std::string dir = (std::filesystem::temp_directory_path() / "ibts_ds_test").string();
  std::filesystem::remove_all(dir);
  save_dataset(ds, dir);
  auto loaded = load_dataset(dir);
  CHECK(loaded.X == ds.X);
  CHECK(loaded.Y == ds.Y);
  CHECK(loaded.Q == ds.Q);
  CHECK(loaded.splits.train == ds.splits.train);
  CHECK(loaded.name == ds.name);

  // a second save must produce identical bytes
  std::string dir2 = dir + "_2";
  std::filesystem::remove_all(dir2);
  save_dataset(loaded, dir2);
  CHECK(read_bytes(dir + "/X.bin") == read_bytes(dir2 + "/X.bin"));
  CHECK(read_text(dir + "/manifest.json") == read_text(dir2 + "/manifest.json"));

  // truncated payload -> clear error
  {
    std::ofstream out(dir + "/Y.bin", std::ios::binary | std::ios::trunc);
    out << "xx";
  }
  CHECK_THROWS_WITH_AS(load_dataset(dir), doctest::Contains("Y.bin"), std::runtime_error);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  cfg.n_train = 0;
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg = {};
  cfg.amplitude = -1;
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg = {};
  cfg.kind = DatasetKind::SeqCombUV;
  cfg.window_len = 150;  // two windows cannot fit in T=200
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg = {};
  cfg.kind = DatasetKind::Signaling;
  cfg.signal_index = 99;
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
}
