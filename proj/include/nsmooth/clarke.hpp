#pragma once

// Generalized gradients and differentials of Lipschitz maps estimated by gradient
// sampling: differentials at nearby differentiability points are parallel
// transported back to the base point and their convex hull stands in for the
// generalized gradient / differential there.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsmooth/hull.hpp"
#include "nsmooth/manifold.hpp"

namespace nsmooth {

struct ScalarField {
  Manifold manifold;
  std::function<double(const Point&)> eval;
  /// Exact gradient as an ambient tangent vector, nullopt where F is not differentiable.
  std::function<std::optional<Vec>(const Point&)> gradient;
  std::optional<double> lipschitz_hint;
  std::string name;
};

struct MapField {
  Manifold source;
  Manifold target;
  std::function<Point(const Point&)> eval;
  /// Ambient Jacobian (target.coord_dim x source.coord_dim) acting on tangent vectors,
  /// nullopt where F is not differentiable.
  std::function<std::optional<Mat>(const Point&)> differential;
  std::optional<double> lipschitz_hint;
  std::string name;
};

/// A ScalarField viewed as a map into Euclidean(1).
MapField as_map(const ScalarField& F);

/// Linear map T_p M -> T_{F(p)} N as an n x m matrix in orthonormal frames.
struct LinearMapRep {
  Frame source_frame;
  Frame target_frame;
  Mat matrix;
};

/// Transpose with frames swapped; exact for orthonormal frames.
LinearMapRep adjoint(const LinearMapRep& A);
int rank(const LinearMapRep& A, double tol = 1e-10);
double operator_norm(const LinearMapRep& A);

struct ClarkeParams {
  int samples_per_radius = 24;
  int rungs = 3;
  /// First rung of the radius ladder; 0 selects min(1e-2, convexity_radius / 10).
  double r0 = 0.0;
  double tol_sing = 1e-4;
  /// A sample is rejected as a kink when forward and backward quotients differ by more
  /// than this fraction of the Lipschitz estimate.
  double kink_ratio = 0.1;
  std::uint64_t seed = 1;
  /// Unit directions searched when estimating delta(p) of a map with n >= 2.
  int direction_count = 64;
  int geodesic_cap = 64;
};

double default_r0(const Manifold& M);

struct MixtureSample {
  HullSample hull;  // components in frame_at(p)
  int drawn = 0;
  int discarded = 0;
  double max_gradient_norm = 0.0;
};

struct GradientEstimate {
  HullSample hull;
  std::vector<double> radii;
  int drawn = 0;
  int discarded = 0;
  /// Lipschitz hint when available, otherwise the largest sampled gradient norm.
  double lipschitz = 0.0;
};

struct SingularityVerdict {
  bool singular = false;
  double margin = 0.0;
  double threshold = 0.0;
  int samples_used = 0;
  std::vector<double> radii_used;
};

/// Gradients at n quasi-random points of B_radius(p), transported to p.
MixtureSample sample_mixture(const ScalarField& F, const Point& p, double radius, int n, std::uint64_t seed,
                             const ClarkeParams& params = {});

/// Merged mixture samples over the radius ladder r0, r0/2, r0/4, ...
GradientEstimate generalized_gradient(const ScalarField& F, const Point& p, const ClarkeParams& params = {});

struct DifferentialEstimate {
  HullSample hull;  // row-major n x m matrices in frames at p and F(p)
  int rows = 0;
  int cols = 0;
  std::vector<double> radii;
  int drawn = 0;
  int discarded = 0;
};

DifferentialEstimate generalized_differential(const MapField& F, const Point& p, const ClarkeParams& params = {});

SingularityVerdict is_singular_scalar(const ScalarField& F, const Point& p, const ClarkeParams& params = {});

/// Half the smallest distance from the origin to {A^T u : A in the hull} over unit u.
double delta_estimate(const DifferentialEstimate& D, int direction_count);

SingularityVerdict is_singular_map(const MapField& F, const Point& p, const ClarkeParams& params = {});

/// Grove-Shiohama criticality of q for the distance from p: the arrival velocities of all
/// minimal geodesics p -> q have the origin in their convex hull.
SingularityVerdict gs_critical(const Manifold& M, const Point& p, const Point& q, const ClarkeParams& params = {});

/// Largest radius lambda on a halving ladder such that gradients sampled over
/// B_{2 lambda}(p) stay at least margin/2 away from the origin. 0 when none qualifies.
double nonsingular_radius(const ScalarField& F, const Point& p, double margin, const ClarkeParams& params = {});

}  // namespace nsmooth
