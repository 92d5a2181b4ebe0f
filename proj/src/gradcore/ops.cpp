#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibts/tensor.hpp"

namespace ibts {
namespace {

Tape* common_tape(std::initializer_list<const Tensor*> ts, const char* op) {
  Tape* tape = nullptr;
  for (const Tensor* t : ts) {
    if (!t->on_tape()) continue;
    if (!tape)
      tape = t->tape();
    else if (tape != t->tape())
      throw std::invalid_argument(std::string(op) + ": operands live on different tapes");
  }
  return tape;
}

std::shared_ptr<std::vector<double>> share(const Tensor& t) {
  return std::make_shared<std::vector<double>>(t.data());
}

// Right-aligned broadcast shape, or an error naming the op.
Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  size_t n = std::max(a.size(), b.size());
  Shape out(n);
  for (size_t i = 0; i < n; ++i) {
    int64_t da = i < n - a.size() ? 1 : a[i - (n - a.size())];
    int64_t db = i < n - b.size() ? 1 : b[i - (n - b.size())];
    if (da != db && da != 1 && db != 1)
      throw std::invalid_argument(std::string(op) + ": cannot broadcast " + shape_str(a) + " and " + shape_str(b));
    out[i] = std::max(da, db);
  }
  return out;
}

// Strides for indexing `shape` from the index space of `out` (0 where
// broadcast). Shapes are right-aligned.
std::vector<int64_t> broadcast_strides(const Shape& shape, const Shape& out) {
  std::vector<int64_t> strides(out.size(), 0);
  int64_t stride = 1;
  for (size_t i = 0; i < shape.size(); ++i) {
    size_t si = shape.size() - 1 - i;
    size_t oi = out.size() - 1 - i;
    strides[oi] = shape[si] == 1 ? 0 : stride;
    stride *= shape[si];
  }
  return strides;
}

// True when `shape`, right-aligned against `out`, is a contiguous suffix:
// index into it is simply out_linear % numel(shape).
bool is_suffix(const Shape& shape, const Shape& out) {
  size_t off = out.size() - shape.size();
  for (size_t i = 0; i < shape.size(); ++i)
    if (shape[i] != out[off + i]) return false;
  return true;
}

// Visits the broadcast index space once: f(out_linear, a_linear, b_linear).
template <class F>
void for_each_broadcast(const Shape& out, const Shape& a, const Shape& b, F&& f) {
  int64_t n = numel(out);
  if (a == out && b == out) {
    for (int64_t i = 0; i < n; ++i) f(i, i, i);
    return;
  }
  if (a == out && is_suffix(b, out)) {
    int64_t nb = numel(b);
    for (int64_t i = 0; i < n; ++i) f(i, i, i % nb);
    return;
  }
  if (b == out && is_suffix(a, out)) {
    int64_t na = numel(a);
    for (int64_t i = 0; i < n; ++i) f(i, i % na, i);
    return;
  }
  auto sa = broadcast_strides(a, out);
  auto sb = broadcast_strides(b, out);
  std::vector<int64_t> idx(out.size(), 0);
  int64_t ia = 0, ib = 0;
  for (int64_t i = 0; i < n; ++i) {
    f(i, ia, ib);
    for (int d = static_cast<int>(out.size()) - 1; d >= 0; --d) {
      idx[d]++;
      ia += sa[d];
      ib += sb[d];
      if (idx[d] < out[d]) break;
      ia -= sa[d] * out[d];
      ib -= sb[d] * out[d];
      idx[d] = 0;
    }
  }
}

// Shared skeleton for broadcasting binary ops. fwd(x, y) -> value;
// bwd_a(up, x, y) and bwd_b(up, x, y) -> per-element gradient contributions.
template <class Fwd, class BwdA, class BwdB>
Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, Fwd fwd, BwdA bwd_a, BwdB bwd_b) {
  Shape out_shape = broadcast_shape(a.shape(), b.shape(), name);
  std::vector<double> out(static_cast<size_t>(numel(out_shape)));
  const auto& av = a.data();
  const auto& bv = b.data();
  for_each_broadcast(out_shape, a.shape(), b.shape(),
                     [&](int64_t i, int64_t ia, int64_t ib) { out[static_cast<size_t>(i)] = fwd(av[static_cast<size_t>(ia)], bv[static_cast<size_t>(ib)]); });
  Tape* tape = common_tape({&a, &b}, name);
  if (!tape) return Tensor(std::move(out_shape), std::move(out));

  std::vector<int> parents;
  if (a.on_tape()) parents.push_back(a.node());
  if (b.on_tape()) parents.push_back(b.node());
  int na = a.on_tape() ? a.node() : -1;
  int nb = b.on_tape() ? b.node() : -1;
  auto ad = share(a);
  auto bd = share(b);
  Shape as = a.shape(), bs = b.shape(), os = out_shape;
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    std::vector<double>* ga = na >= 0 ? &t.grad_buffer(na) : nullptr;
    std::vector<double>* gb = nb >= 0 ? &t.grad_buffer(nb) : nullptr;
    for_each_broadcast(os, as, bs, [&](int64_t i, int64_t ia, int64_t ib) {
      double u = up[static_cast<size_t>(i)];
      double x = (*ad)[static_cast<size_t>(ia)];
      double y = (*bd)[static_cast<size_t>(ib)];
      if (ga) (*ga)[static_cast<size_t>(ia)] += bwd_a(u, x, y);
      if (gb) (*gb)[static_cast<size_t>(ib)] += bwd_b(u, x, y);
    });
  };
  return tape->emit(name, std::move(out_shape), std::move(out), std::move(parents), std::move(backward));
}

// Shared skeleton for elementwise unary ops. dfdx(x, y) is evaluated from the
// input and the forward value.
template <class Fwd, class Dfdx>
Tensor unary_op(const char* name, const Tensor& a, Fwd fwd, Dfdx dfdx) {
  std::vector<double> out(a.data().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = fwd(a.data()[i]);
  if (!a.on_tape()) return Tensor(a.shape(), std::move(out));
  auto ad = share(a);
  auto yd = std::make_shared<std::vector<double>>(out);
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += up[i] * dfdx((*ad)[i], (*yd)[i]);
  };
  return a.tape()->emit(name, a.shape(), std::move(out), {na}, std::move(backward));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// ---- matmul kernels (row-major, accumulate into C) ----

void mm_ab(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    double* c = C + i * n;
    const double* arow = A + i * k;
    for (int64_t p = 0; p < k; ++p) {
      double a = arow[p];
      const double* b = B + p * n;
      for (int64_t j = 0; j < n; ++j) c[j] += a * b[j];
    }
  }
}

// C(m,k) += A(m,n) * B(k,n)^T
void mm_abt(const double* A, const double* B, double* C, int64_t m, int64_t n, int64_t k) {
  for (int64_t i = 0; i < m; ++i) {
    const double* arow = A + i * n;
    double* crow = C + i * k;
    for (int64_t p = 0; p < k; ++p) {
      const double* brow = B + p * n;
      double dot = 0.0;
      for (int64_t j = 0; j < n; ++j) dot += arow[j] * brow[j];
      crow[p] += dot;
    }
  }
}

// C(k,n) += A(m,k)^T * B(m,n)
void mm_atb(const double* A, const double* B, double* C, int64_t m, int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const double* arow = A + i * k;
    const double* brow = B + i * n;
    for (int64_t p = 0; p < k; ++p) {
      double a = arow[p];
      double* crow = C + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += a * brow[j];
    }
  }
}

int64_t reduce_rows(const Shape& s, int upto) {
  int64_t n = 1;
  for (int i = 0; i < upto; ++i) n *= s[static_cast<size_t>(i)];
  return n;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double u, double, double) { return u; }, [](double u, double, double) { return u; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double u, double, double) { return u; }, [](double u, double, double) { return -u; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double u, double, double y) { return u * y; }, [](double u, double x, double) { return u * x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  for (double y : b.data())
    if (y == 0.0) throw std::domain_error("div: division by zero");
  return binary_op(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double u, double, double y) { return u / y; },
      [](double u, double x, double y) { return -u * x / (y * y); });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary_op(
      "add_scalar", a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary_op(
      "mul_scalar", a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor div_scalar(const Tensor& a, double s) {
  if (s == 0.0) throw std::domain_error("div_scalar: division by zero");
  return mul_scalar(a, 1.0 / s);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  bool ok = (as.size() == 2 && bs.size() == 2 && as[1] == bs[0]) ||
            (as.size() == 3 && bs.size() == 3 && as[0] == bs[0] && as[2] == bs[1]) ||
            (as.size() == 3 && bs.size() == 2 && as[2] == bs[0]);
  if (!ok)
    throw std::invalid_argument("matmul: shape mismatch " + shape_str(as) + " x " + shape_str(bs) +
                                " (supported: (m,k)x(k,n), (B,m,k)x(B,k,n), (B,m,k)x(k,n))");
  int64_t batch = as.size() == 3 ? as[0] : 1;
  int64_t m = as[as.size() - 2], k = as[as.size() - 1], n = bs[bs.size() - 1];
  bool b_batched = bs.size() == 3;
  Shape out_shape = as.size() == 3 ? Shape{batch, m, n} : Shape{m, n};
  std::vector<double> out(static_cast<size_t>(batch * m * n), 0.0);
  const double* A = a.data().data();
  const double* B = b.data().data();
  for (int64_t c = 0; c < batch; ++c)
    mm_ab(A + c * m * k, B + (b_batched ? c * k * n : 0), out.data() + c * m * n, m, k, n);

  Tape* tape = common_tape({&a, &b}, "matmul");
  if (!tape) return Tensor(std::move(out_shape), std::move(out));
  std::vector<int> parents;
  if (a.on_tape()) parents.push_back(a.node());
  if (b.on_tape()) parents.push_back(b.node());
  int na = a.on_tape() ? a.node() : -1;
  int nb = b.on_tape() ? b.node() : -1;
  auto ad = share(a);
  auto bd = share(b);
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    if (na >= 0) {
      auto& ga = t.grad_buffer(na);
      for (int64_t c = 0; c < batch; ++c)
        mm_abt(up.data() + c * m * n, bd->data() + (b_batched ? c * k * n : 0), ga.data() + c * m * k, m, n, k);
    }
    if (nb >= 0) {
      auto& gb = t.grad_buffer(nb);
      for (int64_t c = 0; c < batch; ++c)
        mm_atb(ad->data() + c * m * k, up.data() + c * m * n, gb.data() + (b_batched ? c * k * n : 0), m, k, n);
    }
  };
  return tape->emit("matmul", std::move(out_shape), std::move(out), std::move(parents), std::move(backward));
}

Tensor transpose_last2(const Tensor& a) {
  if (a.ndim() < 2) throw std::invalid_argument("transpose_last2: rank must be >= 2, got " + shape_str(a.shape()));
  Shape os = a.shape();
  std::swap(os[os.size() - 1], os[os.size() - 2]);
  int64_t r = a.shape()[a.shape().size() - 2];
  int64_t c = a.shape()[a.shape().size() - 1];
  int64_t batch = numel(a.shape()) / (r * c);
  std::vector<double> out(a.data().size());
  for (int64_t bI = 0; bI < batch; ++bI) {
    const double* src = a.data().data() + bI * r * c;
    double* dst = out.data() + bI * r * c;
    for (int64_t i = 0; i < r; ++i)
      for (int64_t j = 0; j < c; ++j) dst[j * r + i] = src[i * c + j];
  }
  if (!a.on_tape()) return Tensor(std::move(os), std::move(out));
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (int64_t bI = 0; bI < batch; ++bI) {
      const double* u = up.data() + bI * r * c;
      double* g = ga.data() + bI * r * c;
      for (int64_t j = 0; j < c; ++j)
        for (int64_t i = 0; i < r; ++i) g[i * c + j] += u[j * r + i];
    }
  };
  return a.tape()->emit("transpose_last2", std::move(os), std::move(out), {na}, std::move(backward));
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      "sigmoid", a, [](double x) { return stable_sigmoid(x); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh_op(const Tensor& a) {
  return unary_op(
      "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor elu(const Tensor& a) {
  return unary_op(
      "elu", a, [](double x) { return x >= 0.0 ? x : std::expm1(x); },
      [](double x, double y) { return x >= 0.0 ? 1.0 : y + 1.0; });
}

Tensor exp_op(const Tensor& a) {
  return unary_op(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log_op(const Tensor& a) {
  for (double x : a.data())
    if (x <= 0.0) throw std::domain_error("log: input must be positive, got " + std::to_string(x));
  return unary_op(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt_op(const Tensor& a) {
  for (double x : a.data())
    if (x < 0.0) throw std::domain_error("sqrt: input must be non-negative, got " + std::to_string(x));
  if (a.on_tape())
    for (double x : a.data())
      if (x == 0.0) throw std::domain_error("sqrt: gradient undefined at zero");
  return unary_op(
      "sqrt", a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Tensor abs_op(const Tensor& a) {
  return unary_op(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor smooth_abs(const Tensor& a, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("smooth_abs: eps must be positive");
  return unary_op(
      "smooth_abs", a, [eps](double x) { return std::sqrt(x * x + eps); },
      [](double x, double y) { return x / y; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  return unary_op(
      "clamp", a, [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor softmax_last(const Tensor& a) {
  if (a.ndim() < 1) throw std::invalid_argument("softmax: rank must be >= 1");
  int64_t L = a.shape().back();
  int64_t rows = numel(a.shape()) / L;
  std::vector<double> out(a.data().size());
  for (int64_t r = 0; r < rows; ++r) {
    const double* x = a.data().data() + r * L;
    double* y = out.data() + r * L;
    double mx = x[0];
    for (int64_t j = 1; j < L; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (int64_t j = 0; j < L; ++j) z += (y[j] = std::exp(x[j] - mx));
    for (int64_t j = 0; j < L; ++j) y[j] /= z;
  }
  if (!a.on_tape()) return Tensor(a.shape(), std::move(out));
  auto yd = std::make_shared<std::vector<double>>(out);
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (int64_t r = 0; r < rows; ++r) {
      const double* y = yd->data() + r * L;
      const double* u = up.data() + r * L;
      double dot = 0.0;
      for (int64_t j = 0; j < L; ++j) dot += u[j] * y[j];
      double* g = ga.data() + r * L;
      for (int64_t j = 0; j < L; ++j) g[j] += y[j] * (u[j] - dot);
    }
  };
  return a.tape()->emit("softmax", a.shape(), std::move(out), {na}, std::move(backward));
}

Tensor log_softmax_last(const Tensor& a) {
  if (a.ndim() < 1) throw std::invalid_argument("log_softmax: rank must be >= 1");
  int64_t L = a.shape().back();
  int64_t rows = numel(a.shape()) / L;
  std::vector<double> out(a.data().size());
  for (int64_t r = 0; r < rows; ++r) {
    const double* x = a.data().data() + r * L;
    double* y = out.data() + r * L;
    double mx = x[0];
    for (int64_t j = 1; j < L; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (int64_t j = 0; j < L; ++j) z += std::exp(x[j] - mx);
    double lz = std::log(z) + mx;
    for (int64_t j = 0; j < L; ++j) y[j] = x[j] - lz;
  }
  if (!a.on_tape()) return Tensor(a.shape(), std::move(out));
  auto yd = std::make_shared<std::vector<double>>(out);
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (int64_t r = 0; r < rows; ++r) {
      const double* y = yd->data() + r * L;
      const double* u = up.data() + r * L;
      double usum = 0.0;
      for (int64_t j = 0; j < L; ++j) usum += u[j];
      double* g = ga.data() + r * L;
      for (int64_t j = 0; j < L; ++j) g[j] += u[j] - std::exp(y[j]) * usum;
    }
  };
  return a.tape()->emit("log_softmax", a.shape(), std::move(out), {na}, std::move(backward));
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  if (!a.on_tape()) return Tensor::scalar(s);
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (double& g : ga) g += up[0];
  };
  return a.tape()->emit("sum_all", Shape{}, {s}, {na}, std::move(backward));
}

Tensor mean_all(const Tensor& a) { return div_scalar(sum_all(a), static_cast<double>(a.size())); }

namespace {
int normalize_axis(int axis, int ndim, const char* op) {
  if (axis < 0) axis += ndim;
  if (axis < 0 || axis >= ndim)
    throw std::invalid_argument(std::string(op) + ": axis out of range for rank " + std::to_string(ndim));
  return axis;
}
}  // namespace

Tensor sum_axis(const Tensor& a, int axis, bool keepdims) {
  axis = normalize_axis(axis, a.ndim(), "sum_axis");
  int64_t L = a.dim(axis);
  int64_t outer = reduce_rows(a.shape(), axis);
  int64_t inner = numel(a.shape()) / (outer * L);
  Shape os;
  for (int i = 0; i < a.ndim(); ++i) {
    if (i == axis) {
      if (keepdims) os.push_back(1);
    } else {
      os.push_back(a.dim(i));
    }
  }
  std::vector<double> out(static_cast<size_t>(outer * inner), 0.0);
  const double* x = a.data().data();
  for (int64_t o = 0; o < outer; ++o)
    for (int64_t l = 0; l < L; ++l) {
      const double* src = x + (o * L + l) * inner;
      double* dst = out.data() + o * inner;
      for (int64_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  if (!a.on_tape()) return Tensor(std::move(os), std::move(out));
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (int64_t o = 0; o < outer; ++o)
      for (int64_t l = 0; l < L; ++l) {
        double* dst = ga.data() + (o * L + l) * inner;
        const double* src = up.data() + o * inner;
        for (int64_t i = 0; i < inner; ++i) dst[i] += src[i];
      }
  };
  return a.tape()->emit("sum_axis", std::move(os), std::move(out), {na}, std::move(backward));
}

Tensor mean_axis(const Tensor& a, int axis, bool keepdims) {
  int ax = normalize_axis(axis, a.ndim(), "mean_axis");
  return div_scalar(sum_axis(a, ax, keepdims), static_cast<double>(a.dim(ax)));
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  if (numel(shape) != a.size())
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  std::vector<double> out = a.data();
  if (!a.on_tape()) return Tensor(shape, std::move(out));
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) { t.accumulate(na, up); };
  return a.tape()->emit("reshape", shape, std::move(out), {na}, std::move(backward));
}

Tensor slice(const Tensor& a, int axis, int64_t start, int64_t stop) {
  axis = normalize_axis(axis, a.ndim(), "slice");
  if (start < 0 || stop > a.dim(axis) || start >= stop)
    throw std::invalid_argument("slice: range [" + std::to_string(start) + "," + std::to_string(stop) +
                                ") invalid for axis size " + std::to_string(a.dim(axis)));
  int64_t L = a.dim(axis);
  int64_t W = stop - start;
  int64_t outer = reduce_rows(a.shape(), axis);
  int64_t inner = numel(a.shape()) / (outer * L);
  Shape os = a.shape();
  os[static_cast<size_t>(axis)] = W;
  std::vector<double> out(static_cast<size_t>(outer * W * inner));
  const double* x = a.data().data();
  for (int64_t o = 0; o < outer; ++o)
    std::copy(x + (o * L + start) * inner, x + (o * L + stop) * inner, out.data() + o * W * inner);
  if (!a.on_tape()) return Tensor(std::move(os), std::move(out));
  int na = a.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    auto& ga = t.grad_buffer(na);
    for (int64_t o = 0; o < outer; ++o) {
      double* dst = ga.data() + (o * L + start) * inner;
      const double* src = up.data() + o * W * inner;
      for (int64_t i = 0; i < W * inner; ++i) dst[i] += src[i];
    }
  };
  return a.tape()->emit("slice", std::move(os), std::move(out), {na}, std::move(backward));
}

Tensor concat_last(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no operands");
  const Shape& first = parts[0].shape();
  if (first.empty()) throw std::invalid_argument("concat: rank must be >= 1");
  int64_t width = 0;
  for (const Tensor& p : parts) {
    if (p.ndim() != parts[0].ndim())
      throw std::invalid_argument("concat: rank mismatch " + shape_str(first) + " vs " + shape_str(p.shape()));
    for (int i = 0; i + 1 < p.ndim(); ++i)
      if (p.dim(i) != parts[0].dim(i))
        throw std::invalid_argument("concat: shape mismatch " + shape_str(first) + " vs " + shape_str(p.shape()));
    width += p.shape().back();
  }
  Shape os = first;
  os.back() = width;
  int64_t rows = numel(os) / width;
  std::vector<double> out(static_cast<size_t>(rows * width));
  int64_t offset = 0;
  for (const Tensor& p : parts) {
    int64_t w = p.shape().back();
    for (int64_t r = 0; r < rows; ++r)
      std::copy(p.data().data() + r * w, p.data().data() + (r + 1) * w, out.data() + r * width + offset);
    offset += w;
  }
  Tape* tape = nullptr;
  for (const Tensor& p : parts)
    if (p.on_tape()) {
      if (tape && tape != p.tape()) throw std::invalid_argument("concat: operands live on different tapes");
      tape = p.tape();
    }
  if (!tape) return Tensor(std::move(os), std::move(out));
  std::vector<int> parents;
  struct Piece {
    int node;
    int64_t offset, width;
  };
  std::vector<Piece> pieces;
  offset = 0;
  for (const Tensor& p : parts) {
    if (p.on_tape()) {
      parents.push_back(p.node());
      pieces.push_back({p.node(), offset, p.shape().back()});
    }
    offset += p.shape().back();
  }
  auto backward = [=](Tape& t, const std::vector<double>& up) {
    for (const Piece& pc : pieces) {
      auto& g = t.grad_buffer(pc.node);
      for (int64_t r = 0; r < rows; ++r) {
        const double* src = up.data() + r * width + pc.offset;
        double* dst = g.data() + r * pc.width;
        for (int64_t i = 0; i < pc.width; ++i) dst[i] += src[i];
      }
    }
  };
  return tape->emit("concat", std::move(os), std::move(out), std::move(parents), std::move(backward));
}

Tensor sample_bernoulli_ste(const Tensor& pi, const Tensor& uniforms) {
  if (pi.shape() != uniforms.shape())
    throw std::invalid_argument("bernoulli_ste: pi shape " + shape_str(pi.shape()) + " != uniforms shape " +
                                shape_str(uniforms.shape()));
  for (double p : pi.data())
    if (p < -1e-9 || p > 1.0 + 1e-9)
      throw std::invalid_argument("bernoulli_ste: pi must lie in [0,1], got " + std::to_string(p));
  std::vector<double> out(pi.data().size());
  for (size_t i = 0; i < out.size(); ++i) {
    double p = std::min(std::max(pi.data()[i], 0.0), 1.0);
    out[i] = uniforms.data()[i] < p ? 1.0 : 0.0;
  }
  if (!pi.on_tape()) return Tensor(pi.shape(), std::move(out));
  int np = pi.node();
  auto backward = [=](Tape& t, const std::vector<double>& up) { t.accumulate(np, up); };
  return pi.tape()->emit("bernoulli_ste", pi.shape(), std::move(out), {np}, std::move(backward));
}

}  // namespace ibts
