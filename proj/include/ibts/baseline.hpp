#pragma once

#include <string>
#include <vector>

#include "ibts/dataset.hpp"
#include "ibts/random.hpp"

namespace ibts {

// Per-cell Gaussian fitted over training instances: mu[t,d], sigma[t,d]
// (population moments, sigma floored at 1e-6). Draws from it fill masked-out
// or occluded cells.
struct BaselineDistribution {
  int64_t T = 0, D = 0;
  std::vector<double> mu;     // T*D
  std::vector<double> sigma;  // T*D

  double draw(int64_t t, int64_t d, Rng& rng) const;
};

BaselineDistribution fit_baseline(const TimeSeriesDataset& ds, const std::string& split = "train");

}  // namespace ibts
