#include "nsmooth/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "nsmooth/errors.hpp"
#include "nsmooth/sampling.hpp"

namespace nsmooth {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss rule for the weight sqrt(1 - t^2) on [-1, 1] (Chebyshev of the second kind).
void gauss_chebyshev_u(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int k = 1; k <= n; ++k) {
    const double a = k * kPi / (n + 1);
    nodes[k - 1] = std::cos(a);
    weights[k - 1] = kPi / (n + 1) * std::sin(a) * std::sin(a);
  }
}

// Angular rule on the unit sphere S^{d-1} in R^d. Weights sum to |S^{d-1}|.
void sphere_rule(int d, int angular, std::vector<Vec>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (d == 1) {
    Vec a(1), b(1);
    a[0] = 1.0;
    b[0] = -1.0;
    nodes = {a, b};
    weights = {1.0, 1.0};
    return;
  }
  if (d == 2) {
    for (int k = 0; k < angular; ++k) {
      const double t = 2.0 * kPi * (k + 0.5) / angular;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      nodes.push_back(v);
      weights.push_back(2.0 * kPi / angular);
    }
    return;
  }
  // S^{d-1}: first coordinate t with density (1 - t^2)^{(d-3)/2}, remainder on S^{d-2}.
  const int nt = std::max(2, (angular + 1) / 2);
  std::vector<double> tn, tw;
  if (d == 3) {
    gauss_legendre(nt, tn, tw);
  } else {
    gauss_chebyshev_u(nt, tn, tw);
  }
  std::vector<Vec> sub_nodes;
  std::vector<double> sub_weights;
  sphere_rule(d - 1, angular, sub_nodes, sub_weights);
  for (std::size_t i = 0; i < tn.size(); ++i) {
    const double s = std::sqrt(1.0 - tn[i] * tn[i]);
    for (std::size_t j = 0; j < sub_nodes.size(); ++j) {
      Vec v(d);
      v[0] = tn[i];
      v.tail(d - 1) = s * sub_nodes[j];
      nodes.push_back(v);
      weights.push_back(tw[i] * sub_weights[j]);
    }
  }
}

}  // namespace

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p = n == 0 ? 1.0 : p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, p, dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureRule ball_rule(int m, double eps, int radial, int angular) {
  if (m < 1) throw UnsupportedDim("ball_rule: dimension must be positive");
  if (m > 4) throw UnsupportedDim("ball_rule: product quadrature supports m <= 4");
  if (!(eps > 0.0)) throw DomainViolation("ball_rule: radius must be positive");
  if (radial < 1 || angular < 2) throw DomainViolation("ball_rule: need radial >= 1 and angular >= 2");
  std::vector<double> rn, rw;
  gauss_legendre(radial, rn, rw);
  std::vector<Vec> dirs;
  std::vector<double> dw;
  sphere_rule(m, angular, dirs, dw);
  QuadratureRule rule;
  rule.dim = m;
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const double r = 0.5 * eps * (rn[i] + 1.0);
    const double w = 0.5 * eps * rw[i] * std::pow(r, m - 1);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rule.nodes.push_back(r * dirs[j]);
      rule.weights.push_back(w * dw[j]);
    }
  }
  return rule;
}

QuadratureRule ball_quadrature(int m, double eps, int order) {
  if (order < 2) throw DomainViolation("ball_quadrature: order must be >= 2");
  // Radial integrand r^{k + m - 1} with k <= order needs 2n - 1 >= order + m - 1.
  const int radial = (order + m + 1) / 2;
  return ball_rule(m, eps, radial, order + 1);
}

QuadratureRule ball_monte_carlo(int m, double eps, int n, std::uint64_t seed) {
  if (m < 1 || m > kMaxCoords) throw UnsupportedDim("ball_monte_carlo: dimension out of range");
  QuadratureRule rule;
  rule.dim = m;
  HaltonSequence halton(m, seed);
  while (static_cast<int>(rule.nodes.size()) < n) {
    Vec y = halton.next_in_ball();
    rule.nodes.push_back(eps * y);
  }
  const double w = ball_volume(m, eps) / n;
  rule.weights.assign(n, w);
  return rule;
}

double ball_volume(int m, double r) {
  return std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0 + 1.0) * std::pow(r, m);
}

double bump(double t_squared) {
  if (t_squared >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t_squared));
}

double mollifier_alpha(int m) {
  if (m < 1 || m > 4) throw UnsupportedDim("mollifier_alpha: dimension must be in [1, 4]");
  // Radial integral |S^{m-1}| int_0^1 r^{m-1} bump(r^2) dr, composite Gauss-Legendre.
  std::vector<double> xn, xw;
  gauss_legendre(20, xn, xw);
  const int panels = 64;
  double integral = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels;
    const double b = static_cast<double>(k + 1) / panels;
    for (std::size_t i = 0; i < xn.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * xn[i];
      integral += 0.5 * (b - a) * xw[i] * std::pow(r, m - 1) * bump(r * r);
    }
  }
  const double sphere_area = 2.0 * std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0);
  return 1.0 / (sphere_area * integral);
}

}  // namespace nsmooth
