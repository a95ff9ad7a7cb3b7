#pragma once

#include <cstdint>
#include <vector>

#include "nsmooth/linalg.hpp"

namespace nsmooth {

/// Radical-inverse Halton sequence in [0,1)^dim (bases 2, 3, 5, ...). The seed selects the
/// starting index so different seeds give disjoint, reproducible streams.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  Vec next_in_cube();
  /// Next point of the sequence mapped to [-1,1]^dim that falls in the open unit ball.
  Vec next_in_ball();
  std::uint64_t index() const { return index_; }

 private:
  int dim_;
  std::uint64_t index_;
};

/// Fibonacci lattice on the unit 2-sphere in R^3.
std::vector<Vec> fibonacci_sphere(int n);

/// Deterministic unit directions in R^n for searches over the unit sphere: {+1, -1} for
/// n = 1, `count` evenly spaced circle points for n = 2, a Fibonacci lattice otherwise.
std::vector<Vec> unit_direction_grid(int n, int count);

}  // namespace nsmooth
