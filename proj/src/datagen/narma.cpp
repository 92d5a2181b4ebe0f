#include <cmath>
#include <stdexcept>

#include "ibts/dataset.hpp"

namespace ibts {

std::vector<double> narma_series(int64_t T, int order, const std::vector<double>& u) {
  if (T <= 0) throw std::invalid_argument("narma: T must be positive");
  if (order < 1) throw std::invalid_argument("narma: order must be >= 1");
  std::vector<double> y(static_cast<size_t>(T), 0.0);
  auto yat = [&](int64_t t) { return t < 0 ? 0.0 : y[static_cast<size_t>(t)]; };
  auto uat = [&](int64_t t) { return (t < 0 || t >= static_cast<int64_t>(u.size())) ? 0.0 : u[static_cast<size_t>(t)]; };
  for (int64_t t = 0; t + 1 < T; ++t) {
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += yat(t - i);
    double next = 0.3 * yat(t) + 0.05 * yat(t) * acc + 1.5 * uat(t - order + 1) * uat(t) + 0.1;
    if (!std::isfinite(next) || std::fabs(next) > 1e6)
      throw std::runtime_error("narma: series diverged at t=" + std::to_string(t + 1));
    y[static_cast<size_t>(t + 1)] = next;
  }
  return y;
}

std::vector<double> narma_series(int64_t T, int order, Rng& rng) {
  std::vector<double> u(T > 0 ? static_cast<size_t>(T - 1) : 0);
  for (double& v : u) v = rng.uniform(0.0, 0.5);
  return narma_series(T, order, u);
}

}  // namespace ibts
