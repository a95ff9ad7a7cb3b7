#pragma once

// Closed-form Riemannian geometry of the built-in manifolds: Euclidean space,
// round spheres embedded in R^{m+1}, and flat tori R^m / (L_1 Z x ... x L_m Z).
//
// Points and tangent vectors are stored in the coordinate space of the manifold
// (ambient R^{m+1} for spheres, R^m otherwise). Tangent inner products are the
// Euclidean inner products of those coordinates.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nsmooth/linalg.hpp"

namespace nsmooth {

enum class ManifoldKind { Euclidean, Sphere, FlatTorus };

struct Point {
  Vec coords;
};

struct Tangent {
  Point base;
  Vec vec;

  double norm() const { return vec.norm(); }
};

/// Orthonormal basis of T_base M; columns of `basis` are the frame vectors.
struct Frame {
  Point base;
  Mat basis;

  int size() const { return static_cast<int>(basis.cols()); }
  Vec components(const Vec& v) const { return basis.transpose() * v; }
  Vec vector(const Vec& components) const { return basis * components; }
};

class Manifold {
 public:
  static Manifold euclidean(int dim);
  static Manifold sphere(int dim, double radius = 1.0);
  static Manifold flat_torus(std::vector<double> periods);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Length of Point::coords.
  int coord_dim() const { return kind_ == ManifoldKind::Sphere ? dim_ + 1 : dim_; }
  double radius() const { return radius_; }
  const std::vector<double>& periods() const { return periods_; }
  bool compact() const { return kind_ != ManifoldKind::Euclidean; }

  /// +infinity for Euclidean space.
  double injectivity_radius() const;
  /// Radius below which balls are strongly convex (used for all sampling balls).
  double convexity_radius() const;
  double volume() const;
  std::string name() const;

  /// Validates and canonicalises coordinates (wraps torus angles, renormalises sphere
  /// points that are within 1e-6 relative of the sphere). Throws DomainViolation otherwise.
  Point point(const Vec& coords) const;
  Point point(std::initializer_list<double> coords) const;
  bool contains(const Point& p, double tol = 1e-12) const;
  /// Orthogonal projection of an ambient vector onto T_p M.
  Vec to_tangent(const Point& p, const Vec& v) const;

  bool operator==(const Manifold&) const = default;

 private:
  Manifold(ManifoldKind kind, int dim, double radius, std::vector<double> periods);

  ManifoldKind kind_;
  int dim_;
  double radius_ = 0.0;
  std::vector<double> periods_;
};

/// Minimal geodesics between two points, as unit initial velocities at p and the
/// matching unit arrival velocities at q.
struct MinimalGeodesics {
  double length = 0.0;
  std::vector<Vec> initial;
  std::vector<Vec> arrival;
  /// Set for sphere antipodes, where the sample stands in for a full sphere of directions.
  bool continuum = false;
};

/// Cut-locus tolerances: sphere antipodal angle threshold and torus half-period margin.
inline constexpr double kAntipodeAngleTol = 1e-6;
inline constexpr double kCutTol = 1e-8;

double distance(const Manifold& M, const Point& p, const Point& q);
Point exp(const Manifold& M, const Tangent& v);
Point exp(const Manifold& M, const Point& p, const Vec& v);
/// Throws CutLocusAmbiguity when p and q are not joined by a unique minimal geodesic.
Tangent log(const Manifold& M, const Point& p, const Point& q);
/// True when log(p, q) would throw.
bool cut_ambiguous(const Manifold& M, const Point& p, const Point& q);

/// `slack` widens the tie tolerance for lattice translates on tori (default 1e-9 relative).
MinimalGeodesics minimal_geodesics(const Manifold& M, const Point& p, const Point& q, int cap,
                                   double slack = -1.0);

Tangent parallel_transport(const Manifold& M, const Point& p, const Point& q, const Vec& v);

/// d(exp_center)_w (W) for w, W in T_center M; the result lies in T_{exp(w)} M.
Vec dexp(const Manifold& M, const Point& center, const Vec& w, const Vec& W);
/// d(log_center)_q (v) for v in T_q M; the result lies in T_center M.
Vec dlog(const Manifold& M, const Point& center, const Point& q, const Vec& v);

/// Endpoint J(1) of the Jacobi field of the variation
///   s -> exp_center t [log_center(exp_q(s v)) - y],
/// attached at exp_center(log_center(q) - y). Throws DomainViolation when
/// |log_center q| + |y| reaches the injectivity radius.
Tangent jacobi_endpoint(const Manifold& M, const Point& center, const Point& q, const Vec& y,
                        const Vec& v);

/// Deterministic orthonormal frame at p.
Frame frame_at(const Manifold& M, const Point& p);

Point antipode(const Manifold& M, const Point& p);

/// Uniform random point (Euclidean space: uniform in [-box, box]^m).
Point random_point(const Manifold& M, std::mt19937_64& rng, double box = 1.0);
/// Uniform random unit tangent vector at p.
Vec random_unit_tangent(const Manifold& M, const Point& p, std::mt19937_64& rng);

/// Distances from q to many points, given as a row-major block of coordinates.
void batch_distances(const Manifold& M, std::span<const double> rows, const Point& q, std::span<double> out);

}  // namespace nsmooth
