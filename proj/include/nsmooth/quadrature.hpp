#pragma once

#include <cstdint>
#include <vector>

#include "nsmooth/linalg.hpp"

namespace nsmooth {

struct QuadratureRule {
  int dim = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Product rule on the ball of radius eps in R^m: Gauss-Legendre in the radius
/// (weighted by r^{m-1}) times an angular rule on S^{m-1}. `angular` is the number of
/// azimuthal points; polar factors use (angular+1)/2 Gauss points. Supports m <= 4 and
/// throws UnsupportedDim beyond.
QuadratureRule ball_rule(int m, double eps, int radial, int angular);

/// Rule exact for polynomials of total degree <= order over the ball of radius eps.
QuadratureRule ball_quadrature(int m, double eps, int order);

/// Equal-weight Halton points in the ball, the fallback for m > 4.
QuadratureRule ball_monte_carlo(int m, double eps, int n, std::uint64_t seed);

/// Volume of the m-ball of radius r.
double ball_volume(int m, double r);

/// Normalisation alpha with int_{B_1} alpha * exp(-1 / (1 - |y|^2)) dy = 1; m in [1, 4].
double mollifier_alpha(int m);

/// The unnormalised bump exp(-1/(1 - t^2)) for |t| < 1, zero otherwise.
double bump(double t_squared);

}  // namespace nsmooth
