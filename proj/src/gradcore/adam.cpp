#include "ibts/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ibts {

void Adam::step(ParamSet& params, const std::map<std::string, Tensor>& grads) {
  ++t_;
  double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (auto& [name, param] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) throw std::invalid_argument("adam: missing gradient for parameter '" + name + "'");
    const Tensor& grad = git->second;
    if (grad.shape() != param.shape())
      throw std::invalid_argument("adam: gradient shape " + shape_str(grad.shape()) + " != parameter shape " +
                                  shape_str(param.shape()) + " for '" + name + "'");
    auto& m = m_[name];
    auto& v = v_[name];
    if (m.empty()) {
      m.assign(param.data().size(), 0.0);
      v.assign(param.data().size(), 0.0);
    }
    auto& p = param.mutable_data();
    const auto& g = grad.data();
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      p[i] -= config_.lr * (mhat / (std::sqrt(vhat) + config_.eps) + config_.weight_decay * p[i]);
    }
  }
}

}  // namespace ibts
