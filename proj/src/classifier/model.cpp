#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibts/classifier.hpp"

namespace ibts {

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "self_attention") return EncoderKind::SelfAttention;
  if (s == "gated_recurrent") return EncoderKind::GatedRecurrent;
  if (s == "temporal_mlp") return EncoderKind::TemporalMlp;
  throw std::invalid_argument("unknown encoder kind: " + s);
}

std::string encoder_kind_to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::SelfAttention: return "self_attention";
    case EncoderKind::GatedRecurrent: return "gated_recurrent";
    case EncoderKind::TemporalMlp: return "temporal_mlp";
  }
  throw std::logic_error("unreachable");
}

void validate(const ClassifierConfig& cfg) {
  if (cfg.d_hidden < 1) throw std::invalid_argument("classifier: d_hidden must be positive");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
    throw std::invalid_argument("classifier: dropout must lie in [0, 1)");
  }
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("classifier: lr must be positive");
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("classifier: weight_decay must be >= 0");
  if (cfg.epochs < 1) throw std::invalid_argument("classifier: epochs must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("classifier: batch_size must be positive");
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

// x ([.., T, In]) @ w (In, Out) + b (Out), applied position-wise.
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

Tensor dropout(const Tensor& x, double p, Rng* rng) {
  if (rng == nullptr || p <= 0.0) return x;
  const double keep = 1.0 - p;
  std::vector<double> mask(static_cast<size_t>(x.size()));
  for (double& m : mask) m = rng->uniform() < keep ? 1.0 / keep : 0.0;
  return mul(x, Tensor(x.shape(), std::move(mask)));
}

Tensor attention_encode(const ClassifierModel& model, const ParamSet& p, const Tensor& X,
                        Rng* drop_rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(model.config.d_hidden));
  Tensor h = per_position_linear(X, p.at("embed.w"), p.at("embed.b"));
  h = add(h, p.at("posemb"));
  Tensor x_norm = layer_norm_last(h, p.at("attn.ln.gamma"), p.at("attn.ln.beta"));
  Tensor q = per_position_linear(x_norm, p.at("attn.wq"), p.at("attn.bq"));
  Tensor k = per_position_linear(x_norm, p.at("attn.wk"), p.at("attn.bk"));
  Tensor v = per_position_linear(x_norm, p.at("attn.wv"), p.at("attn.bv"));
  Tensor attn = softmax_last(mul_scalar(matmul(q, transpose_last2(k)), scale));
  Tensor out = per_position_linear(matmul(attn, v), p.at("attn.wo"), p.at("attn.bo"));
  h = add(h, dropout(out, model.config.dropout, drop_rng));
  return mean_axis(h, 1, false);
}

Tensor gated_recurrent_encode(const ClassifierModel& model, const ParamSet& p, const Tensor& X,
                              Rng* drop_rng) {
  const int64_t N = X.dim(0), T = X.dim(1), D = X.dim(2);
  Tensor h = Tensor::zeros({N, model.config.d_hidden});
  for (int64_t t = 0; t < T; ++t) {
    Tensor x_t = reshape(slice(X, 1, t, t + 1), {N, D});
    Tensor cat = concat_last({x_t, h});
    Tensor z = sigmoid(add(matmul(cat, p.at("gru.wz")), p.at("gru.bz")));
    Tensor r = sigmoid(add(matmul(cat, p.at("gru.wr")), p.at("gru.br")));
    Tensor cat2 = concat_last({x_t, mul(r, h)});
    Tensor hc = tanh_op(add(matmul(cat2, p.at("gru.wh")), p.at("gru.bh")));
    h = add(mul(add_scalar(mul_scalar(z, -1.0), 1.0), h), mul(z, hc));
  }
  return dropout(h, model.config.dropout, drop_rng);
}

Tensor temporal_mlp_encode(const ClassifierModel& model, const ParamSet& p, const Tensor& X,
                           Rng* drop_rng) {
  const int64_t N = X.dim(0), T = X.dim(1), D = X.dim(2);
  Tensor flat = reshape(X, {N, T * D});
  Tensor h = elu(add(matmul(flat, p.at("mlp.w1")), p.at("mlp.b1")));
  h = dropout(h, model.config.dropout, drop_rng);
  return elu(add(matmul(h, p.at("mlp.w2")), p.at("mlp.b2")));
}

}  // namespace

ClassifierModel init_classifier(const ClassifierConfig& cfg, int64_t T, int64_t D, int64_t C) {
  validate(cfg);
  if (T < 1 || D < 1) throw std::invalid_argument("classifier: T and D must be positive");
  if (C < 2) throw std::invalid_argument("classifier: need at least two classes");

  ClassifierModel m;
  m.config = cfg;
  m.T = T;
  m.D = D;
  m.C = C;

  Rng rng = Rng(cfg.seed).derive(1);
  const int64_t H = cfg.d_hidden;
  ParamSet& p = m.params;
  switch (cfg.encoder) {
    case EncoderKind::SelfAttention:
      p.emplace("embed.w", xavier({D, H}, D, H, rng));
      p.emplace("embed.b", Tensor::zeros({H}));
      p.emplace("posemb", normal_init({T, H}, 0.02, rng));
      p.emplace("attn.ln.gamma", Tensor::full({H}, 1.0));
      p.emplace("attn.ln.beta", Tensor::zeros({H}));
      p.emplace("attn.wq", xavier({H, H}, H, H, rng));
      p.emplace("attn.bq", Tensor::zeros({H}));
      p.emplace("attn.wk", xavier({H, H}, H, H, rng));
      p.emplace("attn.bk", Tensor::zeros({H}));
      p.emplace("attn.wv", xavier({H, H}, H, H, rng));
      p.emplace("attn.bv", Tensor::zeros({H}));
      p.emplace("attn.wo", xavier({H, H}, H, H, rng));
      p.emplace("attn.bo", Tensor::zeros({H}));
      break;
    case EncoderKind::GatedRecurrent:
      p.emplace("gru.wz", xavier({D + H, H}, D + H, H, rng));
      p.emplace("gru.bz", Tensor::zeros({H}));
      p.emplace("gru.wr", xavier({D + H, H}, D + H, H, rng));
      p.emplace("gru.br", Tensor::zeros({H}));
      p.emplace("gru.wh", xavier({D + H, H}, D + H, H, rng));
      p.emplace("gru.bh", Tensor::zeros({H}));
      break;
    case EncoderKind::TemporalMlp:
      p.emplace("mlp.w1", xavier({T * D, H}, T * D, H, rng));
      p.emplace("mlp.b1", Tensor::zeros({H}));
      p.emplace("mlp.w2", xavier({H, H}, H, H, rng));
      p.emplace("mlp.b2", Tensor::zeros({H}));
      break;
  }
  p.emplace("head.w", xavier({H, C}, H, C, rng));
  p.emplace("head.b", Tensor::zeros({C}));
  return m;
}

Tensor classifier_logits(const ClassifierModel& model, const ParamSet& params, const Tensor& X,
                         Rng* dropout_rng) {
  if (X.ndim() != 3 || X.dim(1) != model.T || X.dim(2) != model.D) {
    throw std::invalid_argument("classifier_logits: X must be (N, " + std::to_string(model.T) +
                                ", " + std::to_string(model.D) + ")");
  }
  Tensor pooled;
  switch (model.config.encoder) {
    case EncoderKind::SelfAttention:
      pooled = attention_encode(model, params, X, dropout_rng);
      break;
    case EncoderKind::GatedRecurrent:
      pooled = gated_recurrent_encode(model, params, X, dropout_rng);
      break;
    case EncoderKind::TemporalMlp:
      pooled = temporal_mlp_encode(model, params, X, dropout_rng);
      break;
  }
  return add(matmul(pooled, params.at("head.w")), params.at("head.b"));
}

Tensor predict_proba(const ClassifierModel& model, const Tensor& X) {
  if (X.ndim() != 3) throw std::invalid_argument("predict_proba: X must be (N, T, D)");
  const int64_t N = X.dim(0);
  const int64_t chunk = 128;
  Tensor out = Tensor::zeros({N, model.C});
  std::vector<double>& od = out.mutable_data();
  for (int64_t start = 0; start < N; start += chunk) {
    const int64_t stop = std::min(N, start + chunk);
    Tensor xs = slice(X, 0, start, stop);
    Tensor probs = softmax_last(classifier_logits(model, model.params, xs, nullptr));
    std::copy(probs.data().begin(), probs.data().end(),
              od.begin() + static_cast<size_t>(start * model.C));
  }
  return out;
}

Tensor input_vjp(const ClassifierModel& model, const Tensor& X, const Tensor& upstream) {
  if (!model.frozen) throw std::logic_error("input_vjp: classifier must be frozen");
  if (X.ndim() != 3) throw std::invalid_argument("input_vjp: X must be (N, T, D)");
  if (upstream.ndim() != 2 || upstream.dim(0) != X.dim(0) || upstream.dim(1) != model.C) {
    throw std::invalid_argument("input_vjp: upstream must be (N, C)");
  }
  Tape tape;
  Tensor x_leaf = tape.watch(X);
  Tensor probs = softmax_last(classifier_logits(model, model.params, x_leaf, nullptr));
  GradientMap g = tape.backward(sum_all(mul(probs, upstream)));
  return g.at(x_leaf);
}

Tensor split_tensor(const TimeSeriesDataset& ds, const std::string& which) {
  const SplitRange r = ds.split(which);
  const int64_t n = r.size();
  Tensor out = Tensor::zeros({n, ds.T, ds.D});
  std::vector<double>& od = out.mutable_data();
  const size_t cells = static_cast<size_t>(ds.T * ds.D);
  for (int64_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < cells; ++c) {
      od[static_cast<size_t>(i) * cells + c] =
          ds.X[static_cast<size_t>(r.begin + i) * cells + c];
    }
  }
  return out;
}

std::vector<int32_t> split_labels(const TimeSeriesDataset& ds, const std::string& which) {
  const SplitRange r = ds.split(which);
  return std::vector<int32_t>(ds.Y.begin() + r.begin, ds.Y.begin() + r.end);
}

}  // namespace ibts
