#include "ibts/tensor.hpp"

#include <stdexcept>

namespace ibts {

int64_t numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
  for (int64_t d : shape_)
    if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension in shape " + shape_str(shape_));
  if (numel(shape_) != static_cast<int64_t>(values.size()))
    throw std::invalid_argument("Tensor: " + std::to_string(values.size()) + " values do not fill shape " +
                                shape_str(shape_));
  data_ = std::make_shared<std::vector<double>>(std::move(values));
}

Tensor Tensor::zeros(const Shape& shape) {
  return Tensor(shape, std::vector<double>(static_cast<size_t>(numel(shape)), 0.0));
}

Tensor Tensor::full(const Shape& shape, double value) {
  return Tensor(shape, std::vector<double>(static_cast<size_t>(numel(shape)), value));
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

int64_t Tensor::size() const { return static_cast<int64_t>(data_->size()); }

std::vector<double>& Tensor::mutable_data() {
  if (on_tape()) throw std::invalid_argument("Tensor: values recorded on a tape are immutable");
  return *data_;
}

double Tensor::item() const {
  if (size() != 1)
    throw std::invalid_argument("Tensor: item() requires a single element, shape is " + shape_str(shape_));
  return (*data_)[0];
}

Tensor Tape::watch(const Tensor& value) {
  if (value.on_tape()) throw std::invalid_argument("Tape: tensor is already on a tape");
  Tensor leaf;
  leaf.shape_ = value.shape_;
  leaf.data_ = std::make_shared<std::vector<double>>(*value.data_);  // snapshot
  leaf.tape_ = this;
  leaf.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back(NodeRec{"leaf", value.shape_, {}, nullptr, true});
  return leaf;
}

Tensor Tape::emit(const char* op, Shape shape, std::vector<double> values, std::vector<int> parents,
                  BackwardFn backward) {
  Tensor out(std::move(shape), std::move(values));
  out.tape_ = this;
  out.node_ = static_cast<int>(nodes_.size());
  nodes_.push_back(NodeRec{op, out.shape_, std::move(parents), std::move(backward), false});
  return out;
}

std::vector<double>& Tape::grad_buffer(int node) {
  auto& buf = grads_[static_cast<size_t>(node)];
  if (buf.empty()) buf.assign(static_cast<size_t>(numel(nodes_[static_cast<size_t>(node)].shape)), 0.0);
  return buf;
}

void Tape::accumulate(int node, const std::vector<double>& contribution) {
  auto& buf = grad_buffer(node);
  for (size_t i = 0; i < buf.size(); ++i) buf[i] += contribution[i];
}

void Tape::accumulate_scaled(int node, const std::vector<double>& contribution, double scale) {
  auto& buf = grad_buffer(node);
  for (size_t i = 0; i < buf.size(); ++i) buf[i] += scale * contribution[i];
}

GradientMap Tape::backward(const Tensor& output) {
  if (output.tape() != this) throw std::invalid_argument("backward: output is not on this tape");
  if (output.size() != 1)
    throw std::invalid_argument("backward: output must be scalar, got shape " + shape_str(output.shape()));
  grads_.assign(nodes_.size(), {});
  grads_[static_cast<size_t>(output.node())] = {1.0};
  for (int i = output.node(); i >= 0; --i) {
    auto& rec = nodes_[static_cast<size_t>(i)];
    if (grads_[static_cast<size_t>(i)].empty() || !rec.backward) continue;
    rec.backward(*this, grads_[static_cast<size_t>(i)]);
  }
  GradientMap gm;
  gm.tape_ = this;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf) continue;
    auto& buf = grads_[i];
    if (buf.empty())
      gm.grads_.emplace(static_cast<int>(i), Tensor::zeros(nodes_[i].shape));
    else
      gm.grads_.emplace(static_cast<int>(i), Tensor(nodes_[i].shape, std::move(buf)));
  }
  grads_.clear();
  return gm;
}

Tensor GradientMap::at(const Tensor& leaf) const {
  if (leaf.tape() != tape_) throw std::invalid_argument("gradient map: tensor belongs to a different tape");
  auto it = grads_.find(leaf.node());
  if (it == grads_.end())
    throw std::invalid_argument("gradient map: tensor is not a watched leaf");
  return it->second;
}

}  // namespace ibts
