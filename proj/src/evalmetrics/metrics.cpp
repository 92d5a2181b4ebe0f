#include "ibts/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ibts {

namespace {

void check_pair(const std::vector<double>& scores, const std::vector<uint8_t>& truth,
                const char* who) {
  if (scores.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
  if (scores.size() != truth.size()) {
    throw std::invalid_argument(std::string(who) + ": scores and truth sizes differ");
  }
}

int64_t count_positives(const std::vector<uint8_t>& truth) {
  int64_t p = 0;
  for (uint8_t q : truth) p += (q != 0);
  return p;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AupAur aup_aur(const std::vector<double>& scores, const std::vector<uint8_t>& truth,
               int n_thresholds) {
  check_pair(scores, truth, "aup_aur");
  if (n_thresholds < 1) throw std::invalid_argument("aup_aur: n_thresholds must be positive");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("aup_aur: scores must lie in [0, 1]");
    }
  }
  const int64_t total_pos = count_positives(truth);
  if (total_pos == 0) {
    throw std::invalid_argument("aup_aur: undefined recall, truth mask has no positive cells");
  }

  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  std::vector<double> sorted(n);
  std::vector<int64_t> suffix_pos(n + 1, 0);
  for (size_t i = 0; i < n; ++i) sorted[i] = scores[order[i]];
  for (size_t i = n; i-- > 0;) {
    suffix_pos[i] = suffix_pos[i + 1] + (truth[order[i]] != 0);
  }

  double sum_p = 0.0, sum_r = 0.0;
  for (int j = 0; j < n_thresholds; ++j) {
    const double tau = (j + 0.5) / static_cast<double>(n_thresholds);
    const size_t first = static_cast<size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), tau) - sorted.begin());
    const int64_t selected = static_cast<int64_t>(n - first);
    const int64_t tp = suffix_pos[first];
    sum_p += selected > 0 ? static_cast<double>(tp) / static_cast<double>(selected) : 1.0;
    sum_r += static_cast<double>(tp) / static_cast<double>(total_pos);
  }
  return {sum_p / n_thresholds, sum_r / n_thresholds};
}

double auprc(const std::vector<double>& scores, const std::vector<uint8_t>& truth) {
  check_pair(scores, truth, "auprc");
  const int64_t total_pos = count_positives(truth);
  if (total_pos == 0) {
    throw std::invalid_argument("auprc: undefined recall, truth mask has no positive cells");
  }

  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  double area = 0.0;
  double prev_r = 0.0, prev_p = 0.0;
  bool first_point = true;
  int64_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (truth[order[j]] != 0) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    const double r = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (first_point) {
      prev_r = 0.0;  // extend the curve flat back to recall 0
      prev_p = p;
      first_point = false;
    }
    area += (r - prev_r) * 0.5 * (p + prev_p);
    prev_r = r;
    prev_p = p;
    i = j;
  }
  return area;
}

double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& truth) {
  check_pair(scores, truth, "auroc");
  const int64_t n_pos = count_positives(truth);
  const int64_t n_neg = static_cast<int64_t>(truth.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auroc: undefined, need both positive and negative cells");
  }

  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    int64_t pos_in_group = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      pos_in_group += (truth[order[j]] != 0);
      ++j;
    }
    const double mid_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    rank_sum_pos += mid_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double accuracy(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("accuracy: size mismatch or empty input");
  }
  int64_t hit = 0;
  for (size_t i = 0; i < pred.size(); ++i) hit += (pred[i] == truth[i]);
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double macro_f1(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth, int64_t C) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("macro_f1: size mismatch or empty input");
  }
  if (C < 1) throw std::invalid_argument("macro_f1: need at least one class");
  double sum_f1 = 0.0;
  for (int64_t c = 0; c < C; ++c) {
    int64_t tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == c;
      const bool t = truth[i] == c;
      tp += (p && t);
      fp += (p && !t);
      fn += (!p && t);
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    sum_f1 += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return sum_f1 / static_cast<double>(C);
}

double macro_ovr_auroc(const std::vector<double>& probs, const std::vector<int32_t>& truth,
                       int64_t C) {
  const size_t n = truth.size();
  if (n == 0 || probs.size() != n * static_cast<size_t>(C)) {
    throw std::invalid_argument("macro_ovr_auroc: probs must be (N, C) with N = truth size");
  }
  double sum = 0.0;
  int64_t used = 0;
  std::vector<double> col(n);
  std::vector<uint8_t> is_c(n);
  for (int64_t c = 0; c < C; ++c) {
    int64_t n_c = 0;
    for (size_t i = 0; i < n; ++i) {
      col[i] = probs[i * C + c];
      is_c[i] = truth[i] == c ? 1 : 0;
      n_c += is_c[i];
    }
    if (n_c == 0 || n_c == static_cast<int64_t>(n)) continue;
    sum += auroc(col, is_c);
    ++used;
  }
  if (used == 0) {
    throw std::invalid_argument("macro_ovr_auroc: no class with both positives and negatives");
  }
  return sum / static_cast<double>(used);
}

std::vector<int32_t> argmax_rows(const std::vector<double>& probs, int64_t N, int64_t C) {
  if (probs.size() != static_cast<size_t>(N * C)) {
    throw std::invalid_argument("argmax_rows: size mismatch");
  }
  std::vector<int32_t> out(static_cast<size_t>(N), 0);
  for (int64_t i = 0; i < N; ++i) {
    int32_t best = 0;
    double best_v = probs[static_cast<size_t>(i * C)];
    for (int64_t c = 1; c < C; ++c) {
      const double v = probs[static_cast<size_t>(i * C + c)];
      if (v > best_v) {
        best_v = v;
        best = static_cast<int32_t>(c);
      }
    }
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

namespace {

// Indices of the `keep` highest-scoring cells of one instance; ties broken by
// lower cell index first.
std::vector<size_t> top_cells(const std::vector<double>& scores, size_t offset, size_t cells,
                              size_t keep) {
  std::vector<size_t> idx(cells);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return scores[offset + a] > scores[offset + b];
  });
  idx.resize(keep);
  return idx;
}

struct PredEval {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double auroc = 0.0;
};

PredEval eval_predictions(const PredictFn& predict, const Tensor& X,
                          const std::vector<int32_t>& y, bool with_auroc) {
  const Tensor probs = predict(X);
  if (probs.shape().size() != 2 || probs.shape()[0] != static_cast<int64_t>(y.size())) {
    throw std::invalid_argument("predict must return (N, C) probabilities");
  }
  const int64_t N = probs.shape()[0];
  const int64_t C = probs.shape()[1];
  const std::vector<double>& p = probs.data();
  const std::vector<int32_t> pred = argmax_rows(p, N, C);
  PredEval out;
  out.accuracy = accuracy(pred, y);
  out.macro_f1 = macro_f1(pred, y, C);
  out.auroc = with_auroc ? macro_ovr_auroc(p, y, C) : 0.0;
  return out;
}

void check_probe_inputs(const Tensor& X, const std::vector<int32_t>& y,
                        const std::vector<double>& scores, const char* who) {
  if (X.shape().size() != 3) throw std::invalid_argument(std::string(who) + ": X must be (N, T, D)");
  const int64_t N = X.shape()[0];
  if (static_cast<int64_t>(y.size()) != N) {
    throw std::invalid_argument(std::string(who) + ": label count must match N");
  }
  if (scores.size() != X.data().size()) {
    throw std::invalid_argument(std::string(who) + ": need one score per cell");
  }
}

}  // namespace

std::vector<OcclusionPoint> occlusion_curve(const PredictFn& predict, const Tensor& X,
                                            const std::vector<int32_t>& y,
                                            const std::vector<double>& scores,
                                            const std::vector<double>& occlude_percents,
                                            const BaselineDistribution& baseline, Rng& rng) {
  check_probe_inputs(X, y, scores, "occlusion_curve");
  const int64_t N = X.shape()[0], T = X.shape()[1], D = X.shape()[2];
  if (T != baseline.T || D != baseline.D) {
    throw std::invalid_argument("occlusion_curve: baseline shape does not match X");
  }
  const size_t cells = static_cast<size_t>(T * D);

  std::vector<OcclusionPoint> out;
  out.reserve(occlude_percents.size());
  for (double k : occlude_percents) {
    if (!(k >= 0.0 && k <= 100.0)) {
      throw std::invalid_argument("occlusion_curve: percentile must lie in [0, 100]");
    }
    const size_t keep = cells - static_cast<size_t>(
        std::llround(k / 100.0 * static_cast<double>(cells)));
    Tensor X_mod(X.shape(), X.data());  // deep copy: tensors share buffers
    std::vector<double>& xd = X_mod.mutable_data();
    for (int64_t i = 0; i < N; ++i) {
      const size_t offset = static_cast<size_t>(i) * cells;
      std::vector<uint8_t> kept(cells, 0);
      for (size_t c : top_cells(scores, offset, cells, keep)) kept[c] = 1;
      for (size_t c = 0; c < cells; ++c) {
        if (!kept[c]) {
          xd[offset + c] = baseline.draw(static_cast<int64_t>(c) / D,
                                         static_cast<int64_t>(c) % D, rng);
        }
      }
    }
    const PredEval ev = eval_predictions(predict, X_mod, y, true);
    out.push_back({k, ev.accuracy, ev.macro_f1, ev.auroc});
  }
  return out;
}

SubstitutionResult top_substitution(const PredictFn& predict, const Tensor& X,
                                    const std::vector<int32_t>& y,
                                    const std::vector<double>& scores, double fraction,
                                    SubstitutionFill fill, const BaselineDistribution& baseline) {
  check_probe_inputs(X, y, scores, "top_substitution");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("top_substitution: fraction must lie strictly in (0, 1)");
  }
  const int64_t N = X.shape()[0], T = X.shape()[1], D = X.shape()[2];
  if (T != baseline.T || D != baseline.D) {
    throw std::invalid_argument("top_substitution: baseline shape does not match X");
  }
  const size_t cells = static_cast<size_t>(T * D);
  const size_t count = static_cast<size_t>(std::llround(fraction * static_cast<double>(cells)));

  Tensor X_mod(X.shape(), X.data());
  std::vector<double>& xd = X_mod.mutable_data();
  for (int64_t i = 0; i < N; ++i) {
    const size_t offset = static_cast<size_t>(i) * cells;
    for (size_t c : top_cells(scores, offset, cells, count)) {
      xd[offset + c] = fill == SubstitutionFill::TrainMean ? baseline.mu[c] : 0.0;
    }
  }
  const PredEval ev = eval_predictions(predict, X_mod, y, false);
  return {ev.accuracy, ev.macro_f1};
}

namespace {

void column_moments(const std::vector<double>& a, int64_t rows, int64_t cols,
                    std::vector<double>& mean, std::vector<double>& var) {
  mean.assign(static_cast<size_t>(cols), 0.0);
  var.assign(static_cast<size_t>(cols), 0.0);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) mean[static_cast<size_t>(j)] += a[static_cast<size_t>(i * cols + j)];
  }
  for (int64_t j = 0; j < cols; ++j) mean[static_cast<size_t>(j)] /= static_cast<double>(rows);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) {
      const double c = a[static_cast<size_t>(i * cols + j)] - mean[static_cast<size_t>(j)];
      var[static_cast<size_t>(j)] += c * c;
    }
  }
  for (int64_t j = 0; j < cols; ++j) var[static_cast<size_t>(j)] /= static_cast<double>(rows);
}

void check_rows(const std::vector<double>& a, int64_t rows, int64_t cols, const char* who) {
  if (rows < 2) throw std::invalid_argument(std::string(who) + ": need at least two rows per side");
  if (cols < 1 || a.size() != static_cast<size_t>(rows * cols)) {
    throw std::invalid_argument(std::string(who) + ": data size does not match rows*cols");
  }
}

}  // namespace

double kl_divergence_estimate(const std::vector<double>& a, int64_t rows_a,
                              const std::vector<double>& b, int64_t rows_b, int64_t cols) {
  check_rows(a, rows_a, cols, "kl_divergence_estimate");
  check_rows(b, rows_b, cols, "kl_divergence_estimate");
  std::vector<double> mu_a, var_a, mu_b, var_b;
  column_moments(a, rows_a, cols, mu_a, var_a);
  column_moments(b, rows_b, cols, mu_b, var_b);
  double sum = 0.0;
  for (int64_t j = 0; j < cols; ++j) {
    const double va = std::max(var_a[static_cast<size_t>(j)], 1e-12);
    const double vb = std::max(var_b[static_cast<size_t>(j)], 1e-12);
    const double dm = mu_a[static_cast<size_t>(j)] - mu_b[static_cast<size_t>(j)];
    sum += 0.5 * std::log(vb / va) + (va + dm * dm) / (2.0 * vb) - 0.5;
  }
  return sum / static_cast<double>(cols);
}

double mmd_rbf(const std::vector<double>& a, int64_t rows_a, const std::vector<double>& b,
               int64_t rows_b, int64_t cols) {
  check_rows(a, rows_a, cols, "mmd_rbf");
  check_rows(b, rows_b, cols, "mmd_rbf");

  const int64_t total = rows_a + rows_b;
  auto row = [&](int64_t i) -> const double* {
    return i < rows_a ? a.data() + static_cast<size_t>(i * cols)
                      : b.data() + static_cast<size_t>((i - rows_a) * cols);
  };
  auto sq_dist = [&](int64_t i, int64_t j) {
    const double* x = row(i);
    const double* y = row(j);
    double s = 0.0;
    for (int64_t c = 0; c < cols; ++c) {
      const double d = x[c] - y[c];
      s += d * d;
    }
    return s;
  };

  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(total * (total - 1) / 2));
  for (int64_t i = 0; i < total; ++i) {
    for (int64_t j = i + 1; j < total; ++j) dists.push_back(std::sqrt(sq_dist(i, j)));
  }
  const double sigma = median_of(dists);
  if (sigma <= 0.0) {
    throw std::runtime_error("mmd_rbf: degenerate pooled sample, median pairwise distance is 0");
  }
  const double gamma = 1.0 / (2.0 * sigma * sigma);
  auto kern = [&](int64_t i, int64_t j) { return std::exp(-gamma * sq_dist(i, j)); };

  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (int64_t i = 0; i < rows_a; ++i) {
    for (int64_t j = 0; j < rows_a; ++j) {
      if (i != j) xx += kern(i, j);
    }
  }
  for (int64_t i = 0; i < rows_b; ++i) {
    for (int64_t j = 0; j < rows_b; ++j) {
      if (i != j) yy += kern(rows_a + i, rows_a + j);
    }
  }
  for (int64_t i = 0; i < rows_a; ++i) {
    for (int64_t j = 0; j < rows_b; ++j) xy += kern(i, rows_a + j);
  }
  xx /= static_cast<double>(rows_a) * static_cast<double>(rows_a - 1);
  yy /= static_cast<double>(rows_b) * static_cast<double>(rows_b - 1);
  xy /= static_cast<double>(rows_a) * static_cast<double>(rows_b);
  return xx + yy - 2.0 * xy;
}

double kde_loglik(const std::vector<double>& train, int64_t rows_train,
                  const std::vector<double>& eval, int64_t rows_eval, int64_t cols, int64_t q) {
  check_rows(train, rows_train, cols, "kde_loglik");
  if (rows_train < 10) throw std::invalid_argument("kde_loglik: need at least 10 training rows");
  if (rows_eval < 1 || eval.size() != static_cast<size_t>(rows_eval * cols)) {
    throw std::invalid_argument("kde_loglik: eval size does not match rows*cols");
  }
  if (q < 1 || q > cols) throw std::invalid_argument("kde_loglik: need 1 <= q <= cols");

  std::vector<double> mu(static_cast<size_t>(cols), 0.0);
  for (int64_t i = 0; i < rows_train; ++i) {
    for (int64_t j = 0; j < cols; ++j) mu[static_cast<size_t>(j)] += train[static_cast<size_t>(i * cols + j)];
  }
  for (int64_t j = 0; j < cols; ++j) mu[static_cast<size_t>(j)] /= static_cast<double>(rows_train);

  // Top-q principal directions by orthogonal power iteration on the centered
  // training rows (covariance never formed explicitly).
  Rng init_rng(0x9E3779B97F4A7C15ULL ^ static_cast<uint64_t>(cols));
  std::vector<double> V(static_cast<size_t>(cols * q));
  for (double& v : V) v = init_rng.normal();
  std::vector<double> proj(static_cast<size_t>(rows_train * q));
  std::vector<double> W(static_cast<size_t>(cols * q));
  auto project_train = [&]() {
    for (int64_t i = 0; i < rows_train; ++i) {
      for (int64_t k = 0; k < q; ++k) {
        double s = 0.0;
        for (int64_t j = 0; j < cols; ++j) {
          s += (train[static_cast<size_t>(i * cols + j)] - mu[static_cast<size_t>(j)]) *
               V[static_cast<size_t>(j * q + k)];
        }
        proj[static_cast<size_t>(i * q + k)] = s;
      }
    }
  };
  auto orthonormalize = [&]() {
    for (int64_t k = 0; k < q; ++k) {
      for (int64_t p = 0; p < k; ++p) {
        double dot = 0.0;
        for (int64_t j = 0; j < cols; ++j) {
          dot += V[static_cast<size_t>(j * q + k)] * V[static_cast<size_t>(j * q + p)];
        }
        for (int64_t j = 0; j < cols; ++j) {
          V[static_cast<size_t>(j * q + k)] -= dot * V[static_cast<size_t>(j * q + p)];
        }
      }
      double norm = 0.0;
      for (int64_t j = 0; j < cols; ++j) {
        norm += V[static_cast<size_t>(j * q + k)] * V[static_cast<size_t>(j * q + k)];
      }
      norm = std::sqrt(norm);
      if (norm < 1e-12) {
        throw std::runtime_error("kde_loglik: rank-deficient training data, reduce q");
      }
      for (int64_t j = 0; j < cols; ++j) V[static_cast<size_t>(j * q + k)] /= norm;
    }
  };
  orthonormalize();
  for (int iter = 0; iter < 200; ++iter) {
    project_train();  // proj = Xc V
    std::fill(W.begin(), W.end(), 0.0);
    for (int64_t i = 0; i < rows_train; ++i) {  // W = Xc^T proj
      for (int64_t j = 0; j < cols; ++j) {
        const double xc = train[static_cast<size_t>(i * cols + j)] - mu[static_cast<size_t>(j)];
        for (int64_t k = 0; k < q; ++k) {
          W[static_cast<size_t>(j * q + k)] += xc * proj[static_cast<size_t>(i * q + k)];
        }
      }
    }
    V.swap(W);
    orthonormalize();
  }
  project_train();

  std::vector<double> h(static_cast<size_t>(q), 0.0);
  const double scott = std::pow(static_cast<double>(rows_train),
                                -1.0 / (static_cast<double>(q) + 4.0));
  for (int64_t k = 0; k < q; ++k) {
    double m = 0.0, v = 0.0;
    for (int64_t i = 0; i < rows_train; ++i) m += proj[static_cast<size_t>(i * q + k)];
    m /= static_cast<double>(rows_train);
    for (int64_t i = 0; i < rows_train; ++i) {
      const double c = proj[static_cast<size_t>(i * q + k)] - m;
      v += c * c;
    }
    v /= static_cast<double>(rows_train);
    const double sd = std::sqrt(v);
    if (sd < 1e-12) {
      throw std::runtime_error("kde_loglik: degenerate component variance, reduce q");
    }
    h[static_cast<size_t>(k)] = sd * scott;
  }

  double log_norm = -std::log(static_cast<double>(rows_train));
  for (int64_t k = 0; k < q; ++k) {
    log_norm -= std::log(h[static_cast<size_t>(k)] * std::sqrt(2.0 * std::numbers::pi));
  }

  std::vector<double> eproj(static_cast<size_t>(q));
  std::vector<double> exps(static_cast<size_t>(rows_train));
  double total = 0.0;
  for (int64_t e = 0; e < rows_eval; ++e) {
    for (int64_t k = 0; k < q; ++k) {
      double s = 0.0;
      for (int64_t j = 0; j < cols; ++j) {
        s += (eval[static_cast<size_t>(e * cols + j)] - mu[static_cast<size_t>(j)]) *
             V[static_cast<size_t>(j * q + k)];
      }
      eproj[static_cast<size_t>(k)] = s;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < rows_train; ++i) {
      double s = 0.0;
      for (int64_t k = 0; k < q; ++k) {
        const double z = (eproj[static_cast<size_t>(k)] - proj[static_cast<size_t>(i * q + k)]) /
                         h[static_cast<size_t>(k)];
        s -= 0.5 * z * z;
      }
      exps[static_cast<size_t>(i)] = s;
      best = std::max(best, s);
    }
    double acc = 0.0;
    for (int64_t i = 0; i < rows_train; ++i) acc += std::exp(exps[static_cast<size_t>(i)] - best);
    total += best + std::log(acc) + log_norm;
  }
  return total / static_cast<double>(rows_eval);
}

std::vector<double> flatten_rows(const Tensor& X) {
  if (X.shape().size() != 3) throw std::invalid_argument("flatten_rows: X must be (N, T, D)");
  return X.data();
}

}  // namespace ibts
