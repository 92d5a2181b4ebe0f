#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ibts/baseline.hpp"
#include "ibts/random.hpp"
#include "ibts/tensor.hpp"

namespace ibts {

// ---------------------------------------------------------------------------
// Saliency-vs-ground-truth metrics. Scores and truth are pooled over all
// instances and cells before computing precision/recall, so every function
// takes flat vectors.
// ---------------------------------------------------------------------------

struct AupAur {
  double aup = 0.0;
  double aur = 0.0;
};

// Sweeps thresholds tau_j = (j + 0.5) / n_thresholds, selects {score >= tau},
// and averages precision and recall over the grid. An empty selection counts
// as precision 1. Scores must lie in [0, 1]; truth must contain at least one
// positive cell, otherwise recall is undefined and the call throws.
AupAur aup_aur(const std::vector<double>& scores, const std::vector<uint8_t>& truth,
               int n_thresholds = 200);

// Trapezoidal area under the precision/recall curve swept at every distinct
// score value, with the curve extended flat from its first point back to
// recall 0. Perfect ranking gives 1.0.
double auprc(const std::vector<double>& scores, const std::vector<uint8_t>& truth);

// Probability that a random positive outranks a random negative, ties counted
// half (normalized Mann-Whitney U). Throws unless both classes are present.
double auroc(const std::vector<double>& scores, const std::vector<uint8_t>& truth);

// ---------------------------------------------------------------------------
// Multiclass prediction quality.
// ---------------------------------------------------------------------------

double accuracy(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth);

// Unweighted mean of per-class F1; classes with no predictions and no truth
// instances contribute F1 = 0 only when they appear in neither (they are
// skipped); a class present in truth or predictions with zero TP gets F1 = 0.
double macro_f1(const std::vector<int32_t>& pred, const std::vector<int32_t>& truth, int64_t C);

// One-vs-rest AUROC averaged over classes present in the truth labels.
// probs is row-major (N, C).
double macro_ovr_auroc(const std::vector<double>& probs, const std::vector<int32_t>& truth,
                       int64_t C);

std::vector<int32_t> argmax_rows(const std::vector<double>& probs, int64_t N, int64_t C);

// ---------------------------------------------------------------------------
// Faithfulness probes. `predict` maps a (N, T, D) tensor to (N, C)
// class probabilities.
// ---------------------------------------------------------------------------

using PredictFn = std::function<Tensor(const Tensor&)>;

struct OcclusionPoint {
  double occluded_percent = 0.0;  // k: percentage of lowest-scored cells replaced
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double auroc = 0.0;  // one-vs-rest, macro
};

// For each k in occlude_percents, keeps the top (100-k)% of cells per
// instance by score and replaces the bottom k% with draws from the baseline
// distribution, then measures prediction quality on the occluded batch.
// k = 0 is the unperturbed reference experiment.
std::vector<OcclusionPoint> occlusion_curve(const PredictFn& predict, const Tensor& X,
                                            const std::vector<int32_t>& y,
                                            const std::vector<double>& scores,
                                            const std::vector<double>& occlude_percents,
                                            const BaselineDistribution& baseline, Rng& rng);

enum class SubstitutionFill { TrainMean, Zero };

struct SubstitutionResult {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Replaces the top `fraction` of cells per instance (by score) with either
// the per-cell training mean or zero and measures prediction quality.
// fraction must lie strictly inside (0, 1).
SubstitutionResult top_substitution(const PredictFn& predict, const Tensor& X,
                                    const std::vector<int32_t>& y,
                                    const std::vector<double>& scores, double fraction,
                                    SubstitutionFill fill, const BaselineDistribution& baseline);

// ---------------------------------------------------------------------------
// Distribution-shift diagnostics. Rows are flattened instances; a and b must
// have the same number of columns.
// ---------------------------------------------------------------------------

// Mean over columns of KL(N(mu_a, s_a^2) || N(mu_b, s_b^2)) with population
// moments per column and standard deviations floored at 1e-6. Needs at least
// two rows on each side.
double kl_divergence_estimate(const std::vector<double>& a, int64_t rows_a,
                              const std::vector<double>& b, int64_t rows_b, int64_t cols);

// Unbiased squared MMD with an RBF kernel; the bandwidth is the median
// pairwise distance over the pooled rows. Needs at least two rows per side.
double mmd_rbf(const std::vector<double>& a, int64_t rows_a, const std::vector<double>& b,
               int64_t rows_b, int64_t cols);

// Mean log-likelihood of eval rows under a Gaussian KDE fitted to train rows
// (at least 10) after projecting both onto the top-q principal components of
// the training rows. Bandwidth per component: sigma_hat * n^(-1/(q+4)).
double kde_loglik(const std::vector<double>& train, int64_t rows_train,
                  const std::vector<double>& eval, int64_t rows_eval, int64_t cols, int64_t q = 4);

// Flattens the instance block of a (N, T, D) tensor into N rows of T*D.
std::vector<double> flatten_rows(const Tensor& X);

}  // namespace ibts
