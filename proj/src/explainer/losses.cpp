#include <cmath>
#include <limits>
#include <stdexcept>

#include "ibts/explainer.hpp"

namespace ibts {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kPiClamp = 1e-7;
constexpr double kVarFloor = 1e-12;
constexpr double kSmoothAbsEps = 1e-8;

void check_simplex_rows(const Tensor& t, const char* who) {
  if (t.ndim() != 2) {
    throw std::invalid_argument(std::string("loss_lc: ") + who + " must be (N, C)");
  }
  const int64_t N = t.dim(0), C = t.dim(1);
  const std::vector<double>& v = t.data();
  for (int64_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (int64_t c = 0; c < C; ++c) {
      const double x = v[static_cast<size_t>(i * C + c)];
      if (!(x >= -1e-6)) {
        throw std::invalid_argument(std::string("loss_lc: rows of ") + who +
                                    " must lie on the probability simplex");
      }
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-6) {
      throw std::invalid_argument(std::string("loss_lc: rows of ") + who +
                                  " must lie on the probability simplex");
    }
  }
}

}  // namespace

Tensor loss_lc(const Tensor& p, const Tensor& q) {
  check_simplex_rows(p, "p");
  check_simplex_rows(q, "q");
  if (p.shape() != q.shape()) {
    throw std::invalid_argument("loss_lc: p and q must have the same shape");
  }
  const int64_t N = p.dim(0);
  Tensor pc = clamp(p, kProbFloor, 1.0);
  Tensor qc = clamp(q, kProbFloor, 1.0);
  Tensor lm = log_op(clamp(mul_scalar(add(p, q), 0.5), kProbFloor, 1.0));
  Tensor t = add(mul(pc, sub(log_op(pc), lm)), mul(qc, sub(log_op(qc), lm)));
  return mul_scalar(sum_all(t), 0.5 / static_cast<double>(N));
}

MaskLoss loss_mask(const Tensor& pi, double r, double lambda_con) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("loss_mask: r must lie in (0, 1)");
  if (lambda_con < 0.0) throw std::invalid_argument("loss_mask: lambda_con must be >= 0");
  if (pi.ndim() != 3) throw std::invalid_argument("loss_mask: pi must be (N, T, D)");
  for (double x : pi.data()) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("loss_mask: pi must lie in [0, 1]");
    }
  }
  const int64_t T = pi.dim(1);
  const double cells = static_cast<double>(pi.size());

  Tensor pc = clamp(pi, kPiClamp, 1.0 - kPiClamp);
  Tensor om = add_scalar(mul_scalar(pc, -1.0), 1.0);
  Tensor kl = add(mul(pc, add_scalar(log_op(pc), -std::log(r))),
                  mul(om, add_scalar(log_op(om), -std::log(1.0 - r))));

  MaskLoss out;
  if (lambda_con > 0.0 && T >= 2) {
    Tensor step = sub(slice(pi, 1, 0, T - 1), slice(pi, 1, 1, T));
    out.con = mul_scalar(sum_all(smooth_abs(step, kSmoothAbsEps)), lambda_con / cells);
  } else {
    out.con = Tensor::scalar(0.0);
  }
  out.m = add(mean_all(kl), out.con);
  return out;
}

Tensor loss_kl_dist(const Tensor& X, const Tensor& Xt) {
  if (X.shape() != Xt.shape() || X.ndim() < 2) {
    throw std::invalid_argument("loss_kl_dist: batches must share a (N, ...) shape");
  }
  if (X.dim(0) < 2) {
    throw std::invalid_argument("loss_kl_dist: need at least 2 instances per batch");
  }
  const double inf = std::numeric_limits<double>::infinity();
  Tensor mu_a = mean_axis(X, 0, false);
  Tensor cen_a = sub(X, mu_a);
  Tensor va = clamp(mean_axis(mul(cen_a, cen_a), 0, false), kVarFloor, inf);
  Tensor mu_b = mean_axis(Xt, 0, false);
  Tensor cen_b = sub(Xt, mu_b);
  Tensor vb = clamp(mean_axis(mul(cen_b, cen_b), 0, false), kVarFloor, inf);
  Tensor dm = sub(mu_a, mu_b);
  Tensor kl = add_scalar(add(mul_scalar(sub(log_op(vb), log_op(va)), 0.5),
                             div(add(va, mul(dm, dm)), mul_scalar(vb, 2.0))),
                         -0.5);
  return mean_all(kl);
}

Tensor loss_dr(const Tensor& Xt, const Tensor& Xr) {
  if (Xt.shape() != Xr.shape()) {
    throw std::invalid_argument("loss_dr: tensors must have the same shape");
  }
  Tensor d = sub(Xt, Xr);
  return mean_all(mul(d, d));
}

Tensor total_loss(const Tensor& lc, const MaskLoss& mask, const Tensor& kl, const Tensor& dr,
                  double alpha, double beta, LossBreakdown* breakdown) {
  const double v_lc = lc.item(), v_m = mask.m.item(), v_con = mask.con.item();
  const double v_kl = kl.item(), v_dr = dr.item();
  if (breakdown != nullptr) {
    breakdown->lc = v_lc;
    breakdown->m = v_m;
    breakdown->con = v_con;
    breakdown->kl = v_kl;
    breakdown->dr = v_dr;
    breakdown->total = std::numeric_limits<double>::quiet_NaN();
  }
  if (!std::isfinite(v_lc)) throw std::runtime_error("total_loss: non-finite L_LC");
  if (!std::isfinite(v_m)) throw std::runtime_error("total_loss: non-finite L_M");
  if (!std::isfinite(v_con)) throw std::runtime_error("total_loss: non-finite L_con");
  if (!std::isfinite(v_kl)) throw std::runtime_error("total_loss: non-finite L_KL");
  if (!std::isfinite(v_dr)) throw std::runtime_error("total_loss: non-finite L_dr");
  Tensor total = add(add(lc, mul_scalar(mask.m, alpha)), mul_scalar(add(kl, dr), beta));
  if (breakdown != nullptr) breakdown->total = total.item();
  return total;
}

double bernoulli_prior_from_budget(double gamma, double p, double alpha) {
  if (!(alpha > 0.0) || !(gamma > 0.0) || !(p > 0.0)) {
    throw std::invalid_argument("bernoulli_prior_from_budget: gamma, p, alpha must be positive");
  }
  const double budget = gamma * p / alpha;
  if (!(budget >= 2.0)) {
    throw std::domain_error("prior undefined below budget 2 bits");
  }
  return (1.0 - std::sqrt(1.0 - std::pow(2.0, 2.0 - budget))) / 2.0;
}

}  // namespace ibts
