#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ibts {

using Shape = std::vector<int64_t>;

int64_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

class Tape;

// Dense double-precision n-d array with value semantics (data is shared,
// copy-on-write is not needed because ops never mutate inputs). A tensor may
// additionally be a live node on a Tape, in which case every op that consumes
// it records itself for reverse-mode differentiation. Tensors with no tape are
// plain values; ops on them evaluate eagerly and return plain values.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(const Shape& shape);
  static Tensor full(const Shape& shape, double value);
  static Tensor scalar(double value);

  const Shape& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const;
  const std::vector<double>& data() const { return *data_; }
  std::vector<double>& mutable_data();
  double item() const;  // requires size() == 1

  bool on_tape() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }

 private:
  friend class Tape;
  Shape shape_;
  std::shared_ptr<std::vector<double>> data_ = std::make_shared<std::vector<double>>();
  Tape* tape_ = nullptr;
  int node_ = -1;
};

// Gradients of one backward pass, keyed by the leaf tensors that were watched
// on the tape. Leaves that do not lie on any path to the output get zeros.
class GradientMap {
 public:
  Tensor at(const Tensor& leaf) const;

 private:
  friend class Tape;
  const Tape* tape_ = nullptr;
  std::map<int, Tensor> grads_;
};

// Ordered record of recorded operations. Node order is creation order, which
// is topological by construction: every parent precedes its consumers, so the
// backward sweep visits each node exactly once in reverse order.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a differentiable leaf. Gradients w.r.t. watched leaves are
  // available from backward().
  Tensor watch(const Tensor& value);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  // Reverse-mode sweep from a scalar output on this tape.
  GradientMap backward(const Tensor& output);

  // --- used by op implementations ---
  using BackwardFn = std::function<void(Tape&, const std::vector<double>& upstream)>;
  Tensor emit(const char* op, Shape shape, std::vector<double> values,
              std::vector<int> parents, BackwardFn backward);
  void accumulate(int node, const std::vector<double>& contribution);
  void accumulate_scaled(int node, const std::vector<double>& contribution, double scale);
  std::vector<double>& grad_buffer(int node);
  const Shape& node_shape(int node) const { return nodes_[static_cast<size_t>(node)].shape; }

 private:
  struct NodeRec {
    const char* op;
    Shape shape;
    std::vector<int> parents;
    BackwardFn backward;
    bool is_leaf;
  };
  std::vector<NodeRec> nodes_;
  std::vector<std::vector<double>> grads_;  // scratch, rebuilt per backward()
};

// ---- op set -------------------------------------------------------------
// Binary elementwise ops broadcast with standard right-aligned rules.
// All ops validate shapes and value domains eagerly and throw
// std::invalid_argument / std::domain_error naming the op; none produce NaN
// silently.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
Tensor div_scalar(const Tensor& a, double s);

// (m,k)x(k,n), (B,m,k)x(B,k,n) or (B,m,k)x(k,n).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose_last2(const Tensor& a);

Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor elu(const Tensor& a);
Tensor exp_op(const Tensor& a);
Tensor log_op(const Tensor& a);
Tensor sqrt_op(const Tensor& a);
Tensor abs_op(const Tensor& a);
// sqrt(x^2 + eps): smooth surrogate for |x|, differentiable everywhere.
Tensor smooth_abs(const Tensor& a, double eps);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor softmax_last(const Tensor& a);
Tensor log_softmax_last(const Tensor& a);

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor sum_axis(const Tensor& a, int axis, bool keepdims);
Tensor mean_axis(const Tensor& a, int axis, bool keepdims);

Tensor reshape(const Tensor& a, const Shape& shape);
Tensor slice(const Tensor& a, int axis, int64_t start, int64_t stop);
Tensor concat_last(const std::vector<Tensor>& parts);

// Hard Bernoulli draw with straight-through backward: forward emits exactly
// 1[u < pi] in {0,1}; the backward pass treats dM/dpi as identity. `uniforms`
// must match pi's shape; pi must lie in [0,1] up to 1e-9.
Tensor sample_bernoulli_ste(const Tensor& pi, const Tensor& uniforms);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

}  // namespace ibts
