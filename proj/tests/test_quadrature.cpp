#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "nsmooth/errors.hpp"
#include "nsmooth/quadrature.hpp"
#include "nsmooth/smoothing.hpp"
#include "oracles.hpp"

using namespace nsmooth;
constexpr double kPi = std::numbers::pi;

namespace {

double integrate(const QuadratureRule& rule, const std::function<double(const Vec&)>& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(rule.nodes[k]);
  return s;
}

}  // namespace

TEST_CASE("ball quadrature examples") {
  for (int m = 1; m <= 4; ++m) {
    const QuadratureRule rule = ball_quadrature(m, 0.7, 4);
    CHECK(rule.total_weight() == doctest::Approx(ball_volume(m, 0.7)).epsilon(1e-12));
    CHECK(std::abs(integrate(rule, [](const Vec& y) { return y[0]; })) < 1e-12);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      CHECK(rule.nodes[k].norm() < 0.7);
      CHECK(rule.weights[k] > 0.0);
    }
  }
  const QuadratureRule disc = ball_quadrature(2, 1.0, 2);
  CHECK(integrate(disc, [](const Vec& y) { return y.squaredNorm(); }) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK_THROWS_AS(ball_quadrature(5, 1.0, 2), UnsupportedDim);
}

TEST_CASE("ball quadrature is exact on monomials up to its order") {
  for (int m = 1; m <= 4; ++m) {
    for (int order = 2; order <= 8; ++order) {
      const double eps = 0.37;
      const QuadratureRule rule = ball_quadrature(m, eps, order);
      std::vector<int> alpha(m, 0);
      std::function<void(int, int)> walk = [&](int i, int left) {
        if (i == m) {
          const double got = integrate(rule, [&](const Vec& y) {
            double t = 1.0;
            for (int d = 0; d < m; ++d) t *= std::pow(y[d], alpha[d]);
            return t;
          });
          const double exact = oracle::ball_monomial_integral(alpha, eps);
          const double scale = ball_volume(m, eps) * std::pow(eps, order);
          CHECK(std::abs(got - exact) <= 1e-10 * std::max(std::abs(exact), scale));
          return;
        }
        for (int a = 0; a <= left; ++a) {
          alpha[i] = a;
          walk(i + 1, left - a);
        }
      };
      walk(0, order);
    }
  }
}

TEST_CASE("mollifier normalisation constant") {
  const double integral = oracle::adaptive_simpson([](double t) { return bump(t * t); }, -1.0, 1.0, 1e-14);
  CHECK(mollifier_alpha(1) == doctest::Approx(1.0 / integral).epsilon(1e-9));
  CHECK(mollifier_alpha(1) == doctest::Approx(2.252283).epsilon(1e-6));
  // Polar oracle for m = 2: 2 pi int_0^1 r b(r^2) dr.
  const double disc = 2.0 * kPi * oracle::adaptive_simpson([](double r) { return r * bump(r * r); }, 0.0, 1.0, 1e-14);
  CHECK(mollifier_alpha(2) > 0.0);
  CHECK(mollifier_alpha(2) == doctest::Approx(1.0 / disc).epsilon(1e-9));
  CHECK_THROWS_AS(mollifier_alpha(5), UnsupportedDim);
}

TEST_CASE("discrete mollifier") {
  for (int m = 1; m <= 3; ++m) {
    for (double eps : {0.2, 0.1, 0.05}) {
      const MollifierSpec mol = make_mollifier(m, eps);
      double s = 0.0;
      for (double w : mol.weights) s += w;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(mol.raw_mass - 1.0) < 1e-2);
      for (const Vec& y : mol.rule.nodes) CHECK(y.norm() < eps);
      Vec outside = Vec::Zero(m);
      outside[0] = eps;
      CHECK(mollifier_density(mol, outside) == 0.0);
    }
  }
}

TEST_CASE("Monte Carlo fallback is deterministic") {
  const QuadratureRule a = ball_monte_carlo(6, 0.5, 500, 9);
  const QuadratureRule b = ball_monte_carlo(6, 0.5, 500, 9);
  REQUIRE(a.size() == 500);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK((a.nodes[k] - b.nodes[k]).norm() == 0.0);
  CHECK(a.total_weight() == doctest::Approx(ball_volume(6, 0.5)).epsilon(1e-12));
}
