#pragma once

#include <cstdint>

// Deterministic per-stream generator: xoshiro256++ state derived from
// (seed, stream) through splitmix64, so realization streams are independent
// of each other and of execution order. All sampling routines are
// self-contained (no std::*_distribution) to keep results bit-identical
// across standard libraries.

namespace ege {

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// uniform double in (0, 1)
  double uniform01();

  /// uniform double in (lo, hi)
  double uniform(double lo, double hi);

  /// standard normal (Marsaglia polar method)
  double normal();

  /// gamma(shape, scale) via Marsaglia-Tsang squeeze
  double gamma(double shape, double scale);

  /// chi distribution with dof degrees of freedom: sqrt(gamma(dof/2, 2))
  double chi(double dof);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ege
