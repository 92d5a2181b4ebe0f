#include <cmath>
#include <stdexcept>

#include "ibts/explainer.hpp"

namespace ibts {

InferenceMode inference_mode_from_string(const std::string& s) {
  if (s == "threshold") return InferenceMode::Threshold;
  if (s == "sample") return InferenceMode::Sample;
  throw std::invalid_argument("unknown inference mode: " + s);
}

std::string inference_mode_to_string(InferenceMode m) {
  switch (m) {
    case InferenceMode::Threshold: return "threshold";
    case InferenceMode::Sample: return "sample";
  }
  throw std::logic_error("unreachable");
}

void validate(const ExplainerConfig& cfg) {
  if (!(cfg.r > 0.0 && cfg.r < 1.0)) {
    throw std::invalid_argument("explainer: r must lie in (0, 1)");
  }
  if (cfg.alpha < 0.0) throw std::invalid_argument("explainer: alpha must be >= 0");
  if (cfg.beta < 0.0) throw std::invalid_argument("explainer: beta must be >= 0");
  if (cfg.lambda_con < 0.0) throw std::invalid_argument("explainer: lambda_con must be >= 0");
  if (cfg.d_hidden < 1) throw std::invalid_argument("explainer: d_hidden must be positive");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("explainer: lr must be positive");
  if (cfg.epochs < 1) throw std::invalid_argument("explainer: epochs must be positive");
  if (cfg.batch_size < 2) {
    throw std::invalid_argument(
        "explainer: batch_size must be >= 2 (batch moments need two instances)");
  }
}

namespace {

Tensor xavier(const Shape& shape, int64_t fan_in, int64_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) x = rng.uniform(-limit, limit);
  return Tensor(shape, std::move(v));
}

Tensor normal_init(const Shape& shape, double sd, Rng& rng) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  std::vector<double> v(static_cast<size_t>(n));
  for (double& x : v) x = rng.normal(0.0, sd);
  return Tensor(shape, std::move(v));
}

Tensor per_position_linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int64_t N = x.dim(0), T = x.dim(1), in = x.dim(2);
  const int64_t out = w.dim(1);
  Tensor flat = reshape(x, {N * T, in});
  return reshape(add(matmul(flat, w), b), {N, T, out});
}

Tensor layer_norm_last(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
  const int axis = x.ndim() - 1;
  Tensor centered = sub(x, mean_axis(x, axis, true));
  Tensor var = mean_axis(mul(centered, centered), axis, true);
  Tensor norm = div(centered, sqrt_op(add_scalar(var, 1e-5)));
  return add(mul(norm, gamma), beta);
}

void check_mask_input(const ExplainerModel& model, const Tensor& t, const char* who) {
  if (t.ndim() != 3 || t.dim(1) != model.T || t.dim(2) != model.D) {
    throw std::invalid_argument(std::string(who) + ": input must be (N, " +
                                std::to_string(model.T) + ", " + std::to_string(model.D) + ")");
  }
}

}  // namespace

ExplainerModel init_explainer(const ExplainerConfig& cfg, int64_t T, int64_t D) {
  validate(cfg);
  if (T < 1 || D < 1) throw std::invalid_argument("explainer: T and D must be positive");

  ExplainerModel m;
  m.config = cfg;
  m.T = T;
  m.D = D;

  Rng rng = Rng(cfg.seed).derive(1);
  const int64_t H = cfg.d_hidden;
  ParamSet& p = m.params;
  p.emplace("ext.embed.w", xavier({D, H}, D, H, rng));
  p.emplace("ext.embed.b", Tensor::zeros({H}));
  p.emplace("ext.posemb", normal_init({T, H}, 0.02, rng));
  p.emplace("ext.ln1.gamma", Tensor::full({H}, 1.0));
  p.emplace("ext.ln1.beta", Tensor::zeros({H}));
  p.emplace("ext.attn.wq", xavier({H, H}, H, H, rng));
  p.emplace("ext.attn.bq", Tensor::zeros({H}));
  p.emplace("ext.attn.wk", xavier({H, H}, H, H, rng));
  p.emplace("ext.attn.bk", Tensor::zeros({H}));
  p.emplace("ext.attn.wv", xavier({H, H}, H, H, rng));
  p.emplace("ext.attn.bv", Tensor::zeros({H}));
  p.emplace("ext.attn.wo", xavier({H, H}, H, H, rng));
  p.emplace("ext.attn.bo", Tensor::zeros({H}));
  p.emplace("ext.ln2.gamma", Tensor::full({H}, 1.0));
  p.emplace("ext.ln2.beta", Tensor::zeros({H}));
  p.emplace("ext.ffn.w1", xavier({H, H}, H, H, rng));
  p.emplace("ext.ffn.b1", Tensor::zeros({H}));
  p.emplace("ext.ffn.w2", xavier({H, H}, H, H, rng));
  p.emplace("ext.ffn.b2", Tensor::zeros({H}));
  p.emplace("ext.out.w", xavier({H, D}, H, D, rng));
  p.emplace("ext.out.b", Tensor::zeros({D}));
  p.emplace("cond.w1", xavier({2, H}, 2, H, rng));
  p.emplace("cond.b1", Tensor::zeros({H}));
  p.emplace("cond.w2", xavier({H, 1}, H, 1, rng));
  p.emplace("cond.b2", Tensor::zeros({1}));
  return m;
}

Tensor extract_pi(const ExplainerModel& model, const ParamSet& p, const Tensor& X) {
  check_mask_input(model, X, "extract_pi");
  const double scale = 1.0 / std::sqrt(static_cast<double>(model.config.d_hidden));
  Tensor h = per_position_linear(X, p.at("ext.embed.w"), p.at("ext.embed.b"));
  h = add(h, p.at("ext.posemb"));
  Tensor a = layer_norm_last(h, p.at("ext.ln1.gamma"), p.at("ext.ln1.beta"));
  Tensor q = per_position_linear(a, p.at("ext.attn.wq"), p.at("ext.attn.bq"));
  Tensor k = per_position_linear(a, p.at("ext.attn.wk"), p.at("ext.attn.bk"));
  Tensor v = per_position_linear(a, p.at("ext.attn.wv"), p.at("ext.attn.bv"));
  Tensor attn = softmax_last(mul_scalar(matmul(q, transpose_last2(k)), scale));
  Tensor out = per_position_linear(matmul(attn, v), p.at("ext.attn.wo"), p.at("ext.attn.bo"));
  h = add(h, out);
  Tensor f = layer_norm_last(h, p.at("ext.ln2.gamma"), p.at("ext.ln2.beta"));
  f = per_position_linear(elu(per_position_linear(f, p.at("ext.ffn.w1"), p.at("ext.ffn.b1"))),
                          p.at("ext.ffn.w2"), p.at("ext.ffn.b2"));
  h = add(h, f);
  return sigmoid(per_position_linear(h, p.at("ext.out.w"), p.at("ext.out.b")));
}

Tensor condition(const ExplainerModel& model, const ParamSet& p, const Tensor& M,
                 const Tensor& X) {
  check_mask_input(model, X, "condition");
  if (M.shape() != X.shape()) {
    throw std::invalid_argument("condition: M and X must have the same shape");
  }
  const int64_t cells = X.dim(0) * model.T * model.D;
  Tensor pair = concat_last({reshape(M, {cells, 1}), reshape(X, {cells, 1})});
  Tensor h = elu(add(matmul(pair, p.at("cond.w1")), p.at("cond.b1")));
  Tensor out = add(matmul(h, p.at("cond.w2")), p.at("cond.b2"));
  return reshape(out, X.shape());
}

Tensor make_reference(const Tensor& M, const Tensor& X, const BaselineDistribution& baseline,
                      Rng& rng) {
  if (M.shape() != X.shape() || X.ndim() != 3) {
    throw std::invalid_argument("make_reference: M and X must be matching (N, T, D) tensors");
  }
  if (X.dim(1) != baseline.T || X.dim(2) != baseline.D) {
    throw std::invalid_argument("make_reference: baseline dimensions do not match");
  }
  const int64_t N = X.dim(0), T = X.dim(1), D = X.dim(2);
  const std::vector<double>& m = M.data();
  const std::vector<double>& x = X.data();
  std::vector<double> out(x.size());
  size_t idx = 0;
  for (int64_t i = 0; i < N; ++i) {
    for (int64_t t = 0; t < T; ++t) {
      for (int64_t d = 0; d < D; ++d, ++idx) {
        const double b = baseline.draw(t, d, rng);
        if (m[idx] == 1.0) {
          out[idx] = x[idx];
        } else if (m[idx] == 0.0) {
          out[idx] = b;
        } else {
          throw std::invalid_argument("make_reference: M must be binary");
        }
      }
    }
  }
  return Tensor(X.shape(), std::move(out));
}

Tensor harden_mask(const Tensor& pi, InferenceMode mode, Rng& rng) {
  const std::vector<double>& p = pi.data();
  std::vector<double> m(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || p[i] > 1.0) {
      throw std::invalid_argument("harden_mask: pi must lie in [0, 1]");
    }
    if (mode == InferenceMode::Threshold) {
      m[i] = p[i] >= 0.5 ? 1.0 : 0.0;
    } else {
      m[i] = rng.uniform() < p[i] ? 1.0 : 0.0;
    }
  }
  return Tensor(pi.shape(), std::move(m));
}

BatchExplanations explain_batch(const ExplainerModel& model, const Tensor& X, Rng& rng) {
  check_mask_input(model, X, "explain_batch");
  BatchExplanations out;
  out.pi = extract_pi(model, model.params, X);
  out.M = harden_mask(out.pi, model.config.inference, rng);
  out.Xr = make_reference(out.M, X, model.baseline, rng);
  out.Xt = condition(model, model.params, out.M, X);
  return out;
}

ExplanationArtifact explain(const ExplainerModel& model, const Tensor& X_single, Rng& rng) {
  if (X_single.ndim() != 2 || X_single.dim(0) != model.T || X_single.dim(1) != model.D) {
    throw std::invalid_argument("explain: X must be (T, D)");
  }
  Tensor batched(Shape{1, model.T, model.D}, X_single.data());
  BatchExplanations b = explain_batch(model, batched, rng);
  const Shape flat{model.T, model.D};
  ExplanationArtifact a;
  a.pi = Tensor(flat, b.pi.data());
  a.M = Tensor(flat, b.M.data());
  a.Xr = Tensor(flat, b.Xr.data());
  a.Xt = Tensor(flat, b.Xt.data());
  return a;
}

}  // namespace ibts
