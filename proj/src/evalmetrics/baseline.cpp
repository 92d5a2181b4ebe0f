#include "ibts/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ibts {

double BaselineDistribution::draw(int64_t t, int64_t d, Rng& rng) const {
  const size_t idx = static_cast<size_t>(t * D + d);
  return rng.normal(mu[idx], sigma[idx]);
}

BaselineDistribution fit_baseline(const TimeSeriesDataset& ds, const std::string& split) {
  const SplitRange range = ds.split(split);
  const int64_t n = range.size();
  if (n < 2) {
    throw std::invalid_argument("fit_baseline: split '" + split + "' needs at least 2 instances");
  }
  BaselineDistribution b;
  b.T = ds.T;
  b.D = ds.D;
  b.mu.assign(static_cast<size_t>(ds.T * ds.D), 0.0);
  b.sigma.assign(static_cast<size_t>(ds.T * ds.D), 0.0);
  for (int64_t t = 0; t < ds.T; ++t) {
    for (int64_t d = 0; d < ds.D; ++d) {
      double mean = 0.0;
      for (int64_t i = range.begin; i < range.end; ++i) mean += ds.x(i, t, d);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (int64_t i = range.begin; i < range.end; ++i) {
        const double c = ds.x(i, t, d) - mean;
        var += c * c;
      }
      var /= static_cast<double>(n);
      const size_t idx = static_cast<size_t>(t * ds.D + d);
      b.mu[idx] = mean;
      b.sigma[idx] = std::max(std::sqrt(var), 1e-6);
    }
  }
  return b;
}

}  // namespace ibts
