#pragma once

// Built-in Lipschitz test fields and their compositions.

#include <optional>
#include <string>
#include <vector>

#include "nsmooth/clarke.hpp"
#include "nsmooth/manifold.hpp"

namespace nsmooth::catalog {

/// d_p(q) = distance(p, q). Lipschitz constant 1.
ScalarField dist_to_point(const Manifold& M, const Point& p);

/// The last ambient coordinate on a sphere (z on Sphere(2)).
ScalarField height(const Manifold& M);

/// max{|x| - 1, (x - 2)^2 - 1} on Euclidean(1), Lipschitz on [-box, box].
ScalarField abs_max(double box = 1.0);

/// x^2 sin(1/x) on Euclidean(1), extended by 0 at the origin.
ScalarField x2sin(double box = 1.0);

/// z + a * x^2 on Sphere(2, 1). For a > 1/2 it has four critical points: both poles and
/// (+-sqrt(1 - 1/(4a^2)), 0, 1/(2a)).
ScalarField double_bump(const Manifold& M, double a = 1.0);

/// <a, x> + b on Euclidean(m).
ScalarField affine(const Manifold& M, const Vec& a, double b = 0.0);

ScalarField scale(const ScalarField& F, double c);
ScalarField add(const ScalarField& F, const ScalarField& G);
ScalarField max(const ScalarField& F, const ScalarField& G);
ScalarField min(const ScalarField& F, const ScalarField& G);

/// Torus -> circle map theta |-> R (cos phi, sin phi), phi = 2 pi k theta_1 / L_1, into
/// Sphere(1, target_radius). Its differential has the single singular value
/// 2 pi k R / L_1.
MapField angle(const Manifold& torus, double target_radius = 1.0, int windings = 1);

/// Triangle wave of slope +-1 and period L: the distance from t to L Z.
double triangle_wave(double t, double period);

/// angle with phi = 2 pi / L_1 * (theta_1 + a tri(theta_1) + b tri(theta_2)). Piecewise
/// linear, nonsingular whenever |a| + |b| < 1.
MapField pwl_wobble(const Manifold& torus, double target_radius = 1.0, double a = 0.3, double b = 0.3);

/// Catalog lookup result with ground truth where it is known analytically.
struct Entry {
  std::string name;
  std::optional<ScalarField> scalar;
  std::optional<MapField> map;
  /// Set when the singular set is known and finite.
  std::optional<std::vector<Point>> known_singular_set;
};

/// Analytic singular set of d_p: p with its cut-locus criticalities (antipode on spheres,
/// the 2^m half-period translates on tori).
std::vector<Point> dist_singular_set(const Manifold& M, const Point& p);

std::vector<std::string> names();

}  // namespace nsmooth::catalog
