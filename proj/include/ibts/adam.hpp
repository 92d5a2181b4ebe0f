#pragma once

#include <map>
#include <string>

#include "ibts/tensor.hpp"

namespace ibts {

// Named parameter collection. std::map keeps iteration order deterministic.
using ParamSet = std::map<std::string, Tensor>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: p -= lr * wd * p, applied after the moment update
};

// Adam with bias correction. State (first/second moments, step count) lives in
// the optimizer; parameters are updated in place.
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(ParamSet& params, const std::map<std::string, Tensor>& grads);
  int64_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  int64_t t_ = 0;
  std::map<std::string, std::vector<double>> m_, v_;
};

}  // namespace ibts
