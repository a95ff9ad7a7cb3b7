#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsmooth/catalog.hpp"
#include "nsmooth/errors.hpp"
#include "nsmooth/grids.hpp"
#include "nsmooth/smoothing.hpp"
#include "oracles.hpp"

using namespace nsmooth;
constexpr double kPi = std::numbers::pi;

namespace {

ScalarField abs_field() {
  const Manifold R1 = Manifold::euclidean(1);
  ScalarField F{R1, [](const Point& q) { return std::abs(q.coords[0]); },
                [](const Point& q) -> std::optional<Vec> {
                  if (q.coords[0] == 0.0) return std::nullopt;
                  Vec g(1);
                  g << (q.coords[0] > 0.0 ? 1.0 : -1.0);
                  return g;
                },
                1.0, "abs"};
  return F;
}

}  // namespace

TEST_CASE("cover examples") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Cover c = build_cover(S2, 1.0);
  CHECK(c.size() <= 12);
  CHECK(coverage_fraction(S2, c, coverage_grid(S2, 10000)) == 1.0);

  const Manifold T1 = Manifold::flat_torus({1.0});
  const Cover t = build_cover(T1, 0.2);
  CHECK(t.size() >= 3);
  CHECK(t.size() <= 6);
  CHECK(coverage_fraction(T1, t, coverage_grid(T1, 10000)) == 1.0);

  CHECK_THROWS_AS(build_cover(S2, kPi / 2), DomainViolation);
  CHECK_THROWS_AS(build_cover(T1, 0.25), DomainViolation);

  const Manifold R2 = Manifold::euclidean(2);
  CoverOptions o;
  o.box = 2.0;
  const Cover e = build_cover(R2, 1.0, o);
  CHECK(coverage_fraction(R2, e, coverage_grid(R2, 10000, 2.0)) == 1.0);
}

TEST_CASE("partition of unity") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Cover cover = build_cover(S2, default_cover_radius(S2));
  const PartitionOfUnity pou(S2, cover);
  double worst = 0.0;
  for (const Point& q : coverage_grid(S2, 3000)) {
    double s = 0.0;
    for (const auto& t : pou.evaluate(q)) {
      CHECK(t.weight > 0.0);
      s += t.weight;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst <= 1e-12);

  // Two far-apart charts on the line: each centre belongs to its own chart only.
  const Manifold R1 = Manifold::euclidean(1);
  Cover two{{R1.point({-1.0}), R1.point({1.0})}, {0.8, 0.8}};
  const PartitionOfUnity p2(R1, two);
  CHECK(p2.weight(0, R1.point({-1.0})) == 1.0);
  CHECK(p2.weight(1, R1.point({1.0})) == 1.0);

  // On the boundary of a chart its weight and gradient vanish.
  Cover overlap{{R1.point({0.0}), R1.point({0.5})}, {1.0, 1.0}};
  const PartitionOfUnity p3(R1, overlap);
  CHECK(p3.weight(1, R1.point({-0.5})) == 0.0);
  for (const auto& t : p3.evaluate(R1.point({-0.5 + 1e-3}), true)) {
    if (t.chart == 1) {
      CHECK(t.weight < 1e-100);
      CHECK(t.gradient.norm() < 1e-100);
    }
  }
}

TEST_CASE("partition gradients match finite differences") {
  std::mt19937_64 rng(31);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Cover cover = build_cover(S2, default_cover_radius(S2));
  const PartitionOfUnity pou(S2, cover);
  for (int k = 0; k < 30; ++k) {
    const Point q = random_point(S2, rng);
    const Frame f = frame_at(S2, q);
    for (const auto& t : pou.evaluate(q, true)) {
      for (int j = 0; j < 2; ++j) {
        const double h = 1e-6;
        const double fd = (pou.weight(t.chart, exp(S2, q, h * f.basis.col(j))) -
                           pou.weight(t.chart, exp(S2, q, -h * f.basis.col(j)))) / (2.0 * h);
        CHECK(std::abs(t.gradient.dot(f.basis.col(j)) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("local smoothing") {
  const Manifold R2 = Manifold::euclidean(2);
  Vec a(2);
  a << 1.5, -0.5;
  const VectorMap lin = as_vector_map(catalog::affine(R2, a, 0.3));
  const Point q = R2.point({0.2, 0.1});
  CHECK(std::abs(local_smooth(lin, R2.point({0.0, 0.0}), 0.1, q)[0] - lin.eval(q)[0]) <= 1e-10);

  const VectorMap absm = as_vector_map(abs_field());
  const Manifold R1 = Manifold::euclidean(1);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.05, 0.025}) {
    const double v = local_smooth(absm, R1.point({0.0}), eps, R1.point({0.0}))[0];
    CHECK(v > 0.0);
    CHECK(v <= eps);
    // 1-D oracle: int rho_eps(y) |y| dy = eps * alpha * int_{-1}^{1} b(t^2) |t| dt.
    const double oracle_value =
        eps * mollifier_alpha(1) * 2.0 * oracle::adaptive_simpson([](double t) { return t * bump(t * t); }, 0.0, 1.0, 1e-14);
    CHECK(v == doctest::Approx(oracle_value).epsilon(1e-3));
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("global smoothing") {
  const Manifold R2 = Manifold::euclidean(2);
  Vec a(2);
  a << 0.7, 2.0;
  const VectorMap lin = as_vector_map(catalog::affine(R2, a, -1.0));
  const SmoothedMap S(lin, build_cover(R2, 0.5), 0.1);
  std::mt19937_64 rng(32);
  for (int k = 0; k < 100; ++k) {
    const Point q = random_point(R2, rng, 0.9);
    CHECK(std::abs(S.scalar(q) - lin.eval(q)[0]) <= 1e-9);
    CHECK((S.gradient(q) - a).norm() <= 1e-9);
  }

  const Manifold R1 = Manifold::euclidean(1);
  const VectorMap absm = as_vector_map(abs_field());
  Cover one{{R1.point({0.0})}, {1.0}};
  const SmoothedMap single(absm, one, 0.1);
  for (double x : {-0.5, -0.05, 0.0, 0.3}) {
    CHECK(single.scalar(R1.point({x})) == doctest::Approx(local_smooth(absm, R1.point({0.0}), 0.1, R1.point({x}))[0]).epsilon(1e-14));
  }
}

TEST_CASE("height on the sphere") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const VectorMap h = as_vector_map(catalog::height(S2));
  const Cover cover = build_cover(S2, default_cover_radius(S2));
  const SmoothedMap S(h, cover, 0.05);
  double worst = 0.0;
  for (const Point& q : fibonacci_grid(S2, 500).points) worst = std::max(worst, std::abs(S.scalar(q) - h.eval(q)[0]));
  CHECK(worst <= smoothing_error_bound(0.05, S.lambda(), 1.0));

  const double g = S.gradient(S2.point({1.0, 0.0, 0.0})).norm();
  CHECK(g >= 0.9);
  CHECK(g <= 1.0);
}

TEST_CASE("smoothed Jacobian matches finite differences") {
  std::mt19937_64 rng(33);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  const VectorMap d = as_vector_map(catalog::dist_to_point(S2, n));
  const SmoothedMap S(d, build_cover(S2, default_cover_radius(S2)), 0.1);
  for (int k = 0; k < 25; ++k) {
    const Point q = random_point(S2, rng);
    const Mat J = S.jacobian(q);
    const Mat fd = S.jacobian_fd(q);
    CHECK((J - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
  }
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  const VectorMap t = as_vector_map(catalog::dist_to_point(T2, T2.point({0.0, 0.0})));
  const SmoothedMap ST(t, build_cover(T2, default_cover_radius(T2)), 0.05);
  for (int k = 0; k < 25; ++k) {
    const Point q = random_point(T2, rng);
    CHECK((ST.jacobian(q) - ST.jacobian_fd(q)).norm() <= 1e-4 * std::max(1.0, ST.jacobian_fd(q).norm()));
  }
}

TEST_CASE("Lambda") {
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  CHECK(lambda_eps(T2, build_cover(T2, 0.2), 0.1) == 1.0);
  const Manifold R2 = Manifold::euclidean(2);
  CHECK(lambda_eps(R2, build_cover(R2, 0.5), 0.3) == 1.0);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  Cover c{{S2.point({0.0, 0.0, 1.0})}, {0.9}};
  CHECK(lambda_eps(S2, c, 0.1) == 1.0);
  CHECK(lambda_eps_sampled(S2, c, 0.1, 10000, 4) <= 1.0 + 1e-6);
}

TEST_CASE("smoothing preconditions") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const VectorMap h = as_vector_map(catalog::height(S2));
  const Cover cover = build_cover(S2, default_cover_radius(S2));
  CHECK_THROWS_AS(SmoothedMap(h, cover, kPi / 2), DomainViolation);
  CHECK_THROWS_AS(SmoothedMap(h, cover, 0.0), DomainViolation);
}

TEST_CASE("Lipschitz estimates") {
  const Manifold R1 = Manifold::euclidean(1);
  Vec a(1);
  a << -2.5;
  CHECK(lipschitz_estimate(catalog::affine(R1, a), 2000, 1).value == doctest::Approx(2.5).epsilon(1e-9));
  const Manifold R2 = Manifold::euclidean(2);
  Vec b(2);
  b << 3.0, 4.0;
  const LipschitzEstimate l2 = lipschitz_estimate(catalog::affine(R2, b), 4000, 1);
  CHECK(l2.value <= 5.0 + 1e-9);
  CHECK(l2.value >= 5.0 - 1e-3);
  CHECK(l2.lower_bound);

  const Manifold S2 = Manifold::sphere(2, 1.0);
  const double dp = lipschitz_estimate(catalog::dist_to_point(S2, S2.point({0.0, 0.0, 1.0})), 4000, 2).value;
  CHECK(dp <= 1.0 + 1e-9);
  CHECK(dp >= 0.99);
  CHECK(lipschitz_estimate(catalog::affine(R2, Vec::Zero(2), 3.0), 1000, 1).value == 0.0);
  CHECK_THROWS_AS(lipschitz_estimate(catalog::height(S2), 10, 1), DomainViolation);
}
