#pragma once

// Riemannian convolution smoothing. On each chart ball B_r(p_i) of a finite
// cover the map is pulled back through exp_{p_i}, convolved with the bump
// mollifier of radius eps in T_{p_i} M, and the local results are blended with
// a bump partition of unity subordinate to the cover.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsmooth/clarke.hpp"
#include "nsmooth/manifold.hpp"
#include "nsmooth/quadrature.hpp"

namespace nsmooth {

/// Map M -> R^out_dim that the smoothing acts on (out_dim = 1 for scalar fields).
struct VectorMap {
  Manifold source;
  int out_dim = 1;
  std::function<Vec(const Point&)> eval;
  /// out_dim x coord_dim Jacobian acting on ambient tangent vectors; nullopt at kinks.
  std::function<std::optional<Mat>(const Point&)> jacobian;
  std::optional<double> lipschitz_hint;
  std::string name;
};

VectorMap as_vector_map(const ScalarField& F);

struct Cover {
  std::vector<Point> centers;
  std::vector<double> radii;

  std::size_t size() const { return centers.size(); }
};

struct CoverOptions {
  /// Half-width of the box [-box, box]^m standing in for Euclidean space.
  double box = 1.0;
  int grid_points = 10000;
  /// Greedy covering stops once every grid point is within fill * r of a center.
  double fill = 0.9;
};

/// Dense deterministic test grid (>= grid_points points) used for coverage checks.
std::vector<Point> coverage_grid(const Manifold& M, int grid_points, double box = 1.0);

/// Greedy farthest-point cover with all radii equal to target_r.
Cover build_cover(const Manifold& M, double target_r, const CoverOptions& options = {});

/// Radius used when none is given: injectivity_radius / 4 (box / 2 on Euclidean space).
double default_cover_radius(const Manifold& M, double box = 1.0);

/// Fraction of grid points inside some cover ball.
double coverage_fraction(const Manifold& M, const Cover& cover, const std::vector<Point>& grid);

class PartitionOfUnity {
 public:
  struct Term {
    int chart;
    double weight;
    Vec gradient;  // ambient tangent at q; empty unless requested
  };

  PartitionOfUnity(Manifold M, Cover cover);

  /// psi_i(q) = b_i(q) / sum_j b_j(q), b_i(q) = exp(-1 / (1 - (d(p_i, q) / r_i)^2)).
  /// Only charts with psi_i(q) > 0 are returned, in chart order.
  std::vector<Term> evaluate(const Point& q, bool with_gradient = false) const;
  double weight(int chart, const Point& q) const;
  const Cover& cover() const { return cover_; }

 private:
  Manifold manifold_;
  Cover cover_;
  std::vector<double> center_rows_;
};

struct QuadratureSpec {
  int radial = 8;
  int angular = 16;
  /// Node count for the quasi-Monte Carlo fallback when m > 4.
  int monte_carlo_points = 4096;
  std::uint64_t seed = 1;
};

/// rho_eps(y) = alpha * exp(-1 / (1 - |y/eps|^2)) / eps^m, discretised on a ball rule.
struct MollifierSpec {
  int dim = 0;
  double eps = 0.0;
  double alpha = 0.0;
  QuadratureRule rule;
  /// Quadrature weight times density, rescaled to sum to exactly one.
  std::vector<double> weights;
  /// Quadrature value of the integral of rho_eps before rescaling.
  double raw_mass = 0.0;
};

MollifierSpec make_mollifier(int m, double eps, const QuadratureSpec& quad = {});
double mollifier_density(const MollifierSpec& mol, const Vec& y);

/// Lambda(eps): largest Lipschitz constant of exp_{p_i} on B_{r_i + eps}(0), closed form.
double lambda_eps(const Manifold& M, const Cover& cover, double eps);
/// Sampled difference-quotient cross-check of lambda_eps.
double lambda_eps_sampled(const Manifold& M, const Cover& cover, double eps, int n_pairs, std::uint64_t seed);

struct LipschitzEstimate {
  double value = 0.0;
  /// A sampled maximum can only under-estimate the true constant.
  bool lower_bound = true;
  int pairs = 0;
};

LipschitzEstimate lipschitz_estimate(const ScalarField& F, int n_pairs, std::uint64_t seed, double box = 1.0);
LipschitzEstimate lipschitz_estimate(const MapField& F, int n_pairs, std::uint64_t seed, double box = 1.0);

class SmoothedMap {
 public:
  /// Throws DomainViolation unless eps < inj/2, r_i + eps < inj, and
  /// eps < inj / (2 * Lambda(eps) * 1.01).
  SmoothedMap(VectorMap base, Cover cover, double eps, const QuadratureSpec& quad = {});

  const VectorMap& base() const { return base_; }
  const Manifold& manifold() const { return base_.source; }
  const Cover& cover() const { return partition_.cover(); }
  const PartitionOfUnity& partition() const { return partition_; }
  const MollifierSpec& mollifier() const { return mollifier_; }
  double eps() const { return eps_; }
  double lambda() const { return lambda_; }

  /// Local smoothing on chart i; q must lie in B_{r_i}(p_i).
  Vec local(int chart, const Point& q) const;
  /// Global smoothing sum_i psi_i(q) * local_i(q).
  Vec value(const Point& q) const;
  double scalar(const Point& q) const { return value(q)[0]; }

  /// Differential as an out_dim x m matrix in frame_at(q), via Jacobi fields under the
  /// integral and the product rule across the partition of unity.
  Mat jacobian(const Point& q) const;
  /// Central differences of value() along frame_at(q) with step h.
  Mat jacobian_fd(const Point& q, double h = 1e-5) const;
  /// Gradient of a scalar smoothing as an ambient tangent vector at q.
  Vec gradient(const Point& q) const;

 private:
  Mat local_jacobian(int chart, const Point& q, const Frame& fq) const;
  Vec derivative_at(const Point& x, const Vec& J) const;

  VectorMap base_;
  PartitionOfUnity partition_;
  std::vector<Frame> frames_;
  double eps_;
  MollifierSpec mollifier_;
  double lambda_;
};

/// Single-chart local smoothing centred at `center`, evaluated at q.
Vec local_smooth(const VectorMap& F, const Point& center, double eps, const Point& q, const QuadratureSpec& quad = {});

/// The smoothing error bound eps * Lambda(eps) * Lip(F).
inline double smoothing_error_bound(double eps, double lambda, double lipschitz) { return eps * lambda * lipschitz; }

}  // namespace nsmooth
