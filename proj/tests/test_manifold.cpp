#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsmooth/errors.hpp"
#include "nsmooth/manifold.hpp"
#include "oracles.hpp"

using namespace nsmooth;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<Manifold> manifolds() {
  return {Manifold::euclidean(1), Manifold::euclidean(3),           Manifold::sphere(1, 1.0),
          Manifold::sphere(2, 1.0), Manifold::sphere(3, 2.5),       Manifold::flat_torus({1.0}),
          Manifold::flat_torus({1.0, 1.0}), Manifold::flat_torus({2.0, 1.0, 0.7})};
}

double reach(const Manifold& M) {
  const double inj = M.injectivity_radius();
  return std::isfinite(inj) ? 0.9 * inj : 5.0;
}

}  // namespace

TEST_CASE("injectivity radii") {
  CHECK(std::isinf(Manifold::euclidean(2).injectivity_radius()));
  CHECK(Manifold::sphere(2, 3.0).injectivity_radius() == kPi * 3.0);
  CHECK(Manifold::flat_torus({2.0, 0.8}).injectivity_radius() == 0.4);
  CHECK_THROWS_AS(Manifold::sphere(2, -1.0), DomainViolation);
  CHECK_THROWS_AS(Manifold::flat_torus({1.0, 0.0}), DomainViolation);
}

TEST_CASE("distance examples") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  CHECK(distance(S2, n, n) == 0.0);
  CHECK(distance(S2, n, S2.point({1.0, 0.0, 0.0})) == doctest::Approx(kPi / 2).epsilon(1e-15));
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  CHECK(distance(T2, T2.point({0.0, 0.0}), T2.point({0.75, 0.0})) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("exp and log examples") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  const Point e = exp(S2, n, Vec::Unit(3, 0) * (kPi / 2));
  CHECK((e.coords - Vec::Unit(3, 0)).norm() < 1e-15);
  CHECK((exp(S2, n, Vec::Zero(3)).coords - n.coords).norm() == 0.0);
  CHECK((log(S2, n, S2.point({1.0, 0.0, 0.0})).vec - Vec::Unit(3, 0) * (kPi / 2)).norm() < 1e-15);
  CHECK(log(S2, n, n).vec.norm() == 0.0);
  CHECK_THROWS_AS(log(S2, n, antipode(S2, n)), CutLocusAmbiguity);

  const Manifold T1 = Manifold::flat_torus({1.0});
  Vec v(1);
  v << 0.2;
  CHECK(exp(T1, T1.point({0.9}), v).coords[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(log(T1, T1.point({0.0}), T1.point({0.5})), CutLocusAmbiguity);
}

TEST_CASE("points are canonicalised") {
  const Manifold T2 = Manifold::flat_torus({1.0, 2.0});
  const Point p = T2.point({-0.25, 4.5});
  CHECK(p.coords[0] == doctest::Approx(0.75));
  CHECK(p.coords[1] == doctest::Approx(0.5));
  const Manifold S2 = Manifold::sphere(2, 2.0);
  CHECK_THROWS_AS(S2.point({1.0, 0.0, 0.0}), DomainViolation);
  CHECK(S2.contains(S2.point({0.0, 2.0 * (1.0 + 1e-9), 0.0})));
}

TEST_CASE("minimal geodesic examples") {
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  const MinimalGeodesics g = minimal_geodesics(T2, T2.point({0.0, 0.0}), T2.point({0.5, 0.5}), 64);
  CHECK(g.initial.size() == 4);
  CHECK(g.length == doctest::Approx(std::sqrt(0.5)));
  for (const Vec& u : g.initial) {
    CHECK(std::abs(std::abs(u[0]) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(std::abs(u[1]) - std::sqrt(0.5)) < 1e-12);
  }
  const Manifold T1 = Manifold::flat_torus({1.0});
  CHECK(minimal_geodesics(T1, T1.point({0.0}), T1.point({0.5}), 64).initial.size() == 2);

  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  const Point q = S2.point({std::sin(1.0), 0.0, std::cos(1.0)});
  const MinimalGeodesics one = minimal_geodesics(S2, n, q, 64);
  REQUIRE(one.initial.size() == 1);
  CHECK((one.initial[0] - log(S2, n, q).vec / distance(S2, n, q)).norm() < 1e-12);
  const MinimalGeodesics anti = minimal_geodesics(S2, n, antipode(S2, n), 32);
  CHECK(anti.continuum);
  CHECK(anti.initial.size() == 32);
  for (const Vec& u : anti.initial) CHECK((exp(S2, n, kPi * u).coords - antipode(S2, n).coords).norm() < 1e-9);
}

TEST_CASE("torus minimal geodesics match lattice enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> L{1.0, 0.7};
  const Manifold T = Manifold::flat_torus(L);
  for (int k = 0; k < 100; ++k) {
    const Point p = random_point(T, rng);
    // Half the pairs sit on a half-period translate so ties actually occur.
    Vec d(2);
    d << (k % 2 ? 0.5 : u(rng)) * L[0], (k % 4 < 2 ? 0.5 : u(rng)) * L[1];
    const Point q = T.point(p.coords + d);
    const MinimalGeodesics g = minimal_geodesics(T, p, q, 64);
    Eigen::VectorXd pe = p.coords, qe = q.coords;
    const auto expected = oracle::lattice_geodesics(L, pe, qe, 1e-9);
    CHECK(g.initial.size() == expected.size());
    for (const auto& e : expected) {
      bool found = false;
      for (const Vec& v : g.initial) found = found || (Eigen::VectorXd(v) - e).norm() < 1e-9;
      CHECK(found);
    }
    for (const Vec& v : g.initial) CHECK(distance(T, exp(T, p, g.length * v), q) < 1e-9);
  }
}

TEST_CASE("exp/log inversion and distance on random samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Manifold& M : manifolds()) {
    CAPTURE(M.name());
    double worst_log = 0.0, worst_dist = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Point p = random_point(M, rng, 3.0);
      const Vec v = reach(M) * u(rng) * random_unit_tangent(M, p, rng);
      const Point q = exp(M, p, v);
      worst_log = std::max(worst_log, (log(M, p, q).vec - v).norm() / (1.0 + v.norm()));
      worst_dist = std::max(worst_dist, std::abs(distance(M, p, q) - v.norm()));
    }
    CHECK(worst_log <= 1e-9);
    CHECK(worst_dist <= 1e-10);
  }
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(12);
  for (const Manifold& M : manifolds()) {
    for (int k = 0; k < 200; ++k) {
      const Point a = random_point(M, rng), b = random_point(M, rng), c = random_point(M, rng);
      CHECK(distance(M, a, b) == doctest::Approx(distance(M, b, a)).epsilon(1e-13));
      CHECK(distance(M, a, c) <= distance(M, a, b) + distance(M, b, c) + 1e-12);
    }
  }
}

TEST_CASE("frames are orthonormal and tangent") {
  std::mt19937_64 rng(13);
  for (const Manifold& M : manifolds()) {
    for (int k = 0; k < 50; ++k) {
      const Point p = random_point(M, rng);
      const Frame f = frame_at(M, p);
      CHECK(f.size() == M.dim());
      CHECK((f.basis.transpose() * f.basis - Mat::Identity(M.dim(), M.dim())).cwiseAbs().maxCoeff() < 1e-10);
      if (M.kind() == ManifoldKind::Sphere) CHECK((f.basis.transpose() * p.coords).norm() < 1e-12);
    }
  }
}

TEST_CASE("parallel transport is an isometry and transports geodesic velocities") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Manifold& M : manifolds()) {
    CAPTURE(M.name());
    for (int k = 0; k < 100; ++k) {
      const Point p = random_point(M, rng);
      const Vec dir = random_unit_tangent(M, p, rng);
      const double t = reach(M) * u(rng);
      const Point q = exp(M, p, t * dir);
      const Frame f = frame_at(M, p);
      Mat moved(M.coord_dim(), M.dim());
      for (int j = 0; j < M.dim(); ++j) moved.col(j) = parallel_transport(M, p, q, f.basis.col(j)).vec;
      CHECK((moved.transpose() * moved - Mat::Identity(M.dim(), M.dim())).cwiseAbs().maxCoeff() < 1e-10);
      const Vec arrival = -log(M, q, p).vec / t;
      CHECK((parallel_transport(M, p, q, dir).vec - arrival).norm() < 1e-9);
    }
  }
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  Vec v(2);
  v << 0.3, -0.4;
  CHECK(parallel_transport(T2, T2.point({0.1, 0.1}), T2.point({0.3, 0.2}), v).vec == v);
}

TEST_CASE("Jacobi endpoint") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point c = S2.point({0.0, 0.0, 1.0});
  const Point q = exp(S2, c, Vec::Unit(3, 0) * 0.4);
  const Vec v = frame_at(S2, q).basis.col(1);
  CHECK((jacobi_endpoint(S2, c, q, Vec::Zero(3), v).vec - v).norm() < 1e-12);

  const Manifold R2 = Manifold::euclidean(2);
  Vec y(2), w(2);
  y << 0.3, -0.1;
  w << 0.5, 2.0;
  CHECK((jacobi_endpoint(R2, R2.point({0.0, 0.0}), R2.point({1.0, 1.0}), y, w).vec - w).norm() < 1e-15);

  for (const Manifold& M : manifolds()) {
    CAPTURE(M.name());
    const double budget = 0.45 * (std::isfinite(M.injectivity_radius()) ? M.injectivity_radius() : 10.0);
    for (int k = 0; k < 100; ++k) {
      const Point center = random_point(M, rng);
      const Point qq = exp(M, center, budget * u(rng) * random_unit_tangent(M, center, rng));
      const Vec yy = (M.kind() == ManifoldKind::Sphere && k < 20 ? 0.1 : budget * u(rng)) * random_unit_tangent(M, center, rng);
      const Vec vv = random_unit_tangent(M, qq, rng);
      const Vec J = jacobi_endpoint(M, center, qq, yy, vv).vec;
      const Vec fd = oracle::jacobi_fd(M, center, qq, yy, vv, 1e-5);
      CHECK((J - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
  }
  CHECK_THROWS_AS(jacobi_endpoint(S2, c, exp(S2, c, Vec::Unit(3, 0) * 2.0), Vec::Unit(3, 1) * 1.5, v), DomainViolation);
}
