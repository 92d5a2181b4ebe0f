#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ibts/adam.hpp"
#include "ibts/baseline.hpp"
#include "ibts/classifier.hpp"
#include "ibts/dataset.hpp"
#include "ibts/random.hpp"
#include "ibts/tensor.hpp"

namespace ibts {

enum class InferenceMode { Threshold, Sample };

InferenceMode inference_mode_from_string(const std::string& s);
std::string inference_mode_to_string(InferenceMode m);

struct ExplainerConfig {
  double r = 0.5;           // Bernoulli prior on mask cells
  double alpha = 2.0;       // mask-loss weight
  double beta = 1.0;        // distribution-alignment weight
  double lambda_con = 1.0;  // time-continuity strength inside the mask loss
  int64_t d_hidden = 32;    // extractor block width / conditioner hidden width
  double lr = 1e-3;
  int64_t epochs = 50;
  // Batch-level moment matching needs at least 2 instances, so batches are
  // never allowed to shrink to 1 (a trailing singleton is merged into the
  // previous batch).
  int64_t batch_size = 64;
  uint64_t seed = 0;
  InferenceMode inference = InferenceMode::Threshold;
};

void validate(const ExplainerConfig& cfg);

struct ExplainerModel {
  ExplainerConfig config;
  int64_t T = 0, D = 0;
  ParamSet params;  // "ext.*" extractor g, "cond.*" conditioner psi
  BaselineDistribution baseline;
  uint64_t classifier_fingerprint = 0;  // the frozen predictor trained against
};

ExplainerModel init_explainer(const ExplainerConfig& cfg, int64_t T, int64_t D);

// pi = g(X): per-cell mask probabilities in (0,1), shape (N, T, D).
Tensor extract_pi(const ExplainerModel& model, const ParamSet& params, const Tensor& X);

// Xt = psi(M, X): explanation-embedded instances, shape (N, T, D). The mask
// enters as a differentiable input, so straight-through gradients reach the
// extractor through it.
Tensor condition(const ExplainerModel& model, const ParamSet& params, const Tensor& M,
                 const Tensor& X);

// Xr = M*X + (1-M)*b with b drawn cellwise from the baseline. Built from the
// VALUES of M and X — inference artifacts only. The trainer re-blends the
// same draws on its tape so the distance loss reaches the extractor through
// the mask. M must be exactly binary.
Tensor make_reference(const Tensor& M, const Tensor& X, const BaselineDistribution& baseline,
                      Rng& rng);

// Hardens probabilities into a binary mask: threshold mode is 1[pi >= 0.5]
// and ignores the rng; sample mode draws M ~ Bern(pi).
Tensor harden_mask(const Tensor& pi, InferenceMode mode, Rng& rng);

// ---- loss terms. Each reduces to a scalar on the tape of its inputs. ----

// Mean Jensen-Shannon divergence between probability rows (natural log):
// JS(p,q) = KL(p||m)/2 + KL(q||m)/2 with m = (p+q)/2. Rows must lie on the
// simplex within 1e-6. Result lies in [0, ln 2].
Tensor loss_lc(const Tensor& p, const Tensor& q);

struct MaskLoss {
  Tensor m;    // KL-to-prior plus continuity (i.e. the full mask loss)
  Tensor con;  // the continuity part alone, for logging
};

// Per-cell Bernoulli KL against prior r (pi clamped to [1e-7, 1-1e-7]),
// averaged over all cells, plus lambda_con/(T*D) * sum_t smooth|d pi/dt|.
MaskLoss loss_mask(const Tensor& pi, double r, double lambda_con);

// Per-cell Gaussian KL between batch moment estimates: KL(N_X || N_Xt) with
// variances floored at 1e-12, averaged over cells. Both batches need >= 2
// rows. Differentiable w.r.t. Xt.
Tensor loss_kl_dist(const Tensor& X, const Tensor& Xt);

// Mean squared deviation from the reference instance.
Tensor loss_dr(const Tensor& Xt, const Tensor& Xr);

struct LossBreakdown {
  double lc = 0.0;
  double m = 0.0;  // includes con
  double con = 0.0;
  double kl = 0.0;
  double dr = 0.0;
  double total = 0.0;
};

// total = lc + alpha*m + beta*(kl + dr); m already includes con. Throws if
// any part is non-finite, naming the term.
Tensor total_loss(const Tensor& lc, const MaskLoss& mask, const Tensor& kl, const Tensor& dr,
                  double alpha, double beta, LossBreakdown* breakdown = nullptr);

// Budget-to-prior map r = (1 - sqrt(1 - 2^(2 - b)))/2 with b = gamma*p/alpha,
// defined for budgets of at least 2 bits; satisfies -log2 r - log2(1-r) = b.
double bernoulli_prior_from_budget(double gamma, double p, double alpha);

struct ExplainerTrainReport {
  std::vector<LossBreakdown> history;  // one per epoch, batch-size weighted means
};

// Appendix-style training loop: per batch pi -> STE mask -> reference ->
// conditioned instance -> losses -> Adam step on extractor + conditioner.
// The classifier must be frozen; its parameters are never touched.
ExplainerModel train_explainer(const ClassifierModel& f, const TimeSeriesDataset& ds,
                               const ExplainerConfig& cfg,
                               ExplainerTrainReport* report = nullptr);

struct ExplanationArtifact {
  Tensor pi;  // (T, D) in [0,1]
  Tensor M;   // (T, D) binary
  Tensor Xr;  // (T, D) reference blend
  Tensor Xt;  // (T, D) conditioned instance
};

ExplanationArtifact explain(const ExplainerModel& model, const Tensor& X_single, Rng& rng);

struct BatchExplanations {
  Tensor pi, M, Xr, Xt;  // (N, T, D) each
};

BatchExplanations explain_batch(const ExplainerModel& model, const Tensor& X, Rng& rng);

// model.json + parameter blobs + baseline (mu.bin / sigma.bin).
void save_explainer(const ExplainerModel& model, const std::string& dir);
ExplainerModel load_explainer(const std::string& dir);

}  // namespace ibts
