#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ibts {

// Deterministic random source. The raw engine is std::mt19937_64 (whose
// output sequence is fixed by the standard); the distribution transforms are
// implemented here rather than taken from <random> so that streams are
// identical across standard libraries. Identical seeds give bit-identical
// streams.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  double uniform();                    // [0, 1)
  double uniform(double a, double b);  // [a, b)
  double normal();                     // standard normal, Box-Muller
  double normal(double mu, double sigma);
  int64_t randint(int64_t n);          // uniform in [0, n)
  void shuffle(std::vector<int64_t>& v);

  // Independent child stream; repeatable for the same (seed, stream) pair and
  // unaffected by how much this rng has been consumed.
  Rng derive(uint64_t stream) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ibts
