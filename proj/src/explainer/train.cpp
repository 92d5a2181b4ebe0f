#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibts/checkpoint.hpp"
#include "ibts/explainer.hpp"

namespace ibts {

namespace {

Tensor gather_rows(const Tensor& X, const std::vector<int64_t>& order, int64_t start, int64_t stop,
                   int64_t row_width) {
  const size_t cells = static_cast<size_t>(row_width);
  Shape shape = X.shape();
  shape[0] = stop - start;
  Tensor out = Tensor::zeros(shape);
  std::vector<double>& od = out.mutable_data();
  for (int64_t i = start; i < stop; ++i) {
    const size_t src = static_cast<size_t>(order[static_cast<size_t>(i)]) * cells;
    std::copy(X.data().begin() + src, X.data().begin() + src + cells,
              od.begin() + static_cast<size_t>(i - start) * cells);
  }
  return out;
}

Tensor draw_uniforms(const Shape& shape, Rng& rng) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) x = rng.uniform();
  return Tensor(shape, std::move(v));
}

std::string format_breakdown(const LossBreakdown& b) {
  std::ostringstream os;
  os << "L_LC=" << b.lc << " L_M=" << b.m << " L_con=" << b.con << " L_KL=" << b.kl
     << " L_dr=" << b.dr << " total=" << b.total;
  return os.str();
}

}  // namespace

ExplainerModel train_explainer(const ClassifierModel& f, const TimeSeriesDataset& ds,
                               const ExplainerConfig& cfg, ExplainerTrainReport* report) {
  validate(cfg);
  if (!f.frozen) throw std::invalid_argument("train_explainer: classifier must be frozen");
  if (f.T != ds.T || f.D != ds.D || f.C != ds.C) {
    throw std::invalid_argument("train_explainer: classifier dimensions do not match dataset");
  }
  if (ds.splits.train < 2) {
    throw std::invalid_argument("train_explainer: need at least 2 training instances");
  }

  ExplainerModel model = init_explainer(cfg, ds.T, ds.D);
  model.baseline = fit_baseline(ds, "train");
  model.classifier_fingerprint = params_fingerprint(f.params);

  Rng base(cfg.seed);
  Rng ste_rng = base.derive(2);
  Rng ref_rng = base.derive(3);
  Rng shuffle_rng = base.derive(4);

  const Tensor X_train = split_tensor(ds, "train");
  const int64_t n_train = X_train.dim(0);
  const int64_t row_width = ds.T * ds.D;
  // The classifier is frozen, so its class distribution per instance is fixed
  // for the whole run; compute it once.
  const Tensor p_train = predict_proba(f, X_train);

  Adam opt({cfg.lr, 0.9, 0.999, 1e-8, 0.0});
  std::vector<int64_t> order(static_cast<size_t>(n_train));
  for (int64_t i = 0; i < n_train; ++i) order[static_cast<size_t>(i)] = i;

  if (report) *report = ExplainerTrainReport{};

  for (int64_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    LossBreakdown epoch_sum;
    for (int64_t start = 0; start < n_train; start += cfg.batch_size) {
      int64_t stop = std::min(n_train, start + cfg.batch_size);
      // Batch moments need >= 2 instances: fold a trailing singleton in.
      if (n_train - stop == 1) stop = n_train;
      const int64_t bsize = stop - start;
      const Tensor xb = gather_rows(X_train, order, start, stop, row_width);
      const Tensor pb = gather_rows(p_train, order, start, stop, ds.C);

      Tape tape;
      ParamSet bound;
      for (const auto& [name, t] : model.params) bound.emplace(name, tape.watch(t));

      Tensor pi = extract_pi(model, bound, xb);
      Tensor u = draw_uniforms(xb.shape(), ste_rng);
      Tensor M = sample_bernoulli_ste(pi, u);
      // The reference blend stays on the tape: the straight-through gradient
      // of the distance loss has to see that masking a cell in turns the
      // target into the cell's own value, or an extractor that masks
      // everything out becomes a self-reinforcing optimum.
      const Tensor noise = make_reference(Tensor::zeros(xb.shape()), xb, model.baseline, ref_rng);
      Tensor drop = add_scalar(mul_scalar(M, -1.0), 1.0);
      Tensor Xr = add(mul(M, xb), mul(drop, noise));
      Tensor Xt = condition(model, bound, M, xb);
      Tensor q = softmax_last(classifier_logits(f, f.params, Xt, nullptr));

      Tensor lc = loss_lc(pb, q);
      MaskLoss mask = loss_mask(pi, cfg.r, cfg.lambda_con);
      Tensor kl = loss_kl_dist(xb, Xt);
      Tensor dr = loss_dr(Xt, Xr);

      LossBreakdown bd;
      Tensor total;
      try {
        total = total_loss(lc, mask, kl, dr, cfg.alpha, cfg.beta, &bd);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("train_explainer: ") + e.what() + " at epoch " +
                                 std::to_string(epoch) + " (" + format_breakdown(bd) + ")");
      }
      const double w = static_cast<double>(bsize);
      epoch_sum.lc += bd.lc * w;
      epoch_sum.m += bd.m * w;
      epoch_sum.con += bd.con * w;
      epoch_sum.kl += bd.kl * w;
      epoch_sum.dr += bd.dr * w;
      epoch_sum.total += bd.total * w;

      GradientMap grads = tape.backward(total);
      ParamSet g;
      for (const auto& [name, t] : bound) g.emplace(name, grads.at(t));
      opt.step(model.params, g);
    }
    if (report) {
      const double n = static_cast<double>(n_train);
      report->history.push_back({epoch_sum.lc / n, epoch_sum.m / n, epoch_sum.con / n,
                                 epoch_sum.kl / n, epoch_sum.dr / n, epoch_sum.total / n});
    }
  }

  if (params_fingerprint(f.params) != model.classifier_fingerprint) {
    throw std::logic_error("train_explainer: classifier parameters changed during training");
  }
  return model;
}

}  // namespace ibts
