#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nsmooth/catalog.hpp"
#include "nsmooth/clarke.hpp"
#include "nsmooth/errors.hpp"
#include "nsmooth/hull.hpp"
#include "oracles.hpp"

using namespace nsmooth;
constexpr double kPi = std::numbers::pi;

TEST_CASE("min-norm point examples") {
  HullSample H(2);
  H.add(Eigen::Vector2d(1.0, 0.0));
  H.add(Eigen::Vector2d(0.0, 1.0));
  const MinNormResult r = min_norm_point(H);
  CHECK(r.norm == doctest::Approx(0.7071067811865476).epsilon(1e-12));
  CHECK(r.norm == doctest::Approx(oracle::min_norm_segment_grid(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), 1e-4))
                      .epsilon(1e-6));
  CHECK(r.point[0] == doctest::Approx(0.5));
  CHECK(r.point[1] == doctest::Approx(0.5));

  HullSample O(2);
  O.add(Eigen::Vector2d(1.0, 1.0));
  O.add(Eigen::Vector2d(-1.0, 0.5));
  O.add(Eigen::Vector2d(0.0, -1.0));
  CHECK(min_norm_point(O).norm < 1e-14);

  HullSample S(3);
  S.add(Eigen::Vector3d(1.0, -2.0, 2.0));
  CHECK(min_norm_point(S).norm == doctest::Approx(3.0));
}

TEST_CASE("min-norm point matches subset enumeration") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 2;
    const int n = 2 + t % 5;
    HullSample H(d);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v[j] = g(rng) + 0.8;
      pts.push_back(v);
      H.add(v);
    }
    const MinNormResult r = min_norm_point(H);
    CHECK(r.norm == doctest::Approx(oracle::min_norm_enumerate(pts)).epsilon(1e-6));
    CHECK(static_cast<int>(r.support.size()) <= d + 1);
    double s = 0.0;
    for (double c : r.coefficients) s += c;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    if (r.norm > 1e-12) CHECK(wolfe_gap(H, r.point) <= 1e-10);
  }
}

TEST_CASE("kinked max example") {
  const ScalarField f = catalog::abs_max(5.0);
  const Manifold& M = f.manifold;
  const GradientEstimate g1 = generalized_gradient(f, M.point({1.0}));
  CHECK(g1.hull.lower()[0] == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(g1.hull.upper()[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(is_singular_scalar(f, M.point({1.0})).singular);
  const GradientEstimate g4 = generalized_gradient(f, M.point({4.0}));
  CHECK(g4.hull.lower()[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(g4.hull.upper()[0] == doctest::Approx(4.0).epsilon(0.01));
  const SingularityVerdict v4 = is_singular_scalar(f, M.point({4.0}));
  CHECK_FALSE(v4.singular);
  CHECK(v4.margin == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("oscillating example") {
  const ScalarField g = catalog::x2sin(1.0);
  const GradientEstimate est = generalized_gradient(g, g.manifold.point({0.0}));
  CHECK(std::abs(est.hull.lower()[0] + 1.0) <= 0.05);
  CHECK(std::abs(est.hull.upper()[0] - 1.0) <= 0.05);
}

TEST_CASE("smooth fields have point-like generalized gradients") {
  const Manifold R3 = Manifold::euclidean(3);
  Vec a(3);
  a << 0.3, -1.2, 2.0;
  const ScalarField lin = catalog::affine(R3, a, 1.0);
  const GradientEstimate e = generalized_gradient(lin, R3.point({0.2, 0.1, -0.4}));
  CHECK(e.hull.diameter() < 1e-8);
  CHECK((Eigen::VectorXd(e.hull.point(0)) - Eigen::VectorXd(a)).norm() < 1e-12);

  const Manifold S2 = Manifold::sphere(2, 1.0);
  const ScalarField h = catalog::height(S2);
  const Point q = S2.point({0.6, 0.0, 0.8});
  ClarkeParams wide, narrow;
  wide.r0 = 0.05;
  narrow.r0 = 0.005;
  CHECK(generalized_gradient(h, q, narrow).hull.diameter() < generalized_gradient(h, q, wide).hull.diameter());
  CHECK(generalized_gradient(h, q, narrow).hull.diameter() < 0.02);
}

TEST_CASE("distance function on the sphere") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  const ScalarField d = catalog::dist_to_point(S2, n);
  const SingularityVerdict at_anti = is_singular_scalar(d, antipode(S2, n));
  CHECK(at_anti.singular);
  CHECK(at_anti.margin < 1e-3);
  CHECK(is_singular_scalar(d, n).singular);
  const SingularityVerdict equator = is_singular_scalar(d, S2.point({1.0, 0.0, 0.0}));
  CHECK_FALSE(equator.singular);
  CHECK(equator.margin == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("generalized differential of maps") {
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  MapField id{T2, T2, [](const Point& p) { return p; }, [](const Point&) -> std::optional<Mat> { return Mat::Identity(2, 2); },
              1.0, "identity"};
  const DifferentialEstimate D = generalized_differential(id, T2.point({0.3, 0.6}));
  REQUIRE(D.rows == 2);
  REQUIRE(D.cols == 2);
  for (std::size_t i = 0; i < D.hull.size(); ++i) {
    const Eigen::VectorXd s = D.hull.point(i);
    CHECK((s - Eigen::Vector4d(1.0, 0.0, 0.0, 1.0)).norm() < 1e-12);
  }

  // Angle map into a circle of radius 1/(2 pi) has unit speed: delta = 1/2.
  const MapField angle = catalog::angle(T2, 1.0 / (2.0 * kPi));
  const DifferentialEstimate A = generalized_differential(angle, T2.point({0.2, 0.7}));
  for (std::size_t i = 0; i < A.hull.size(); ++i) {
    CHECK(std::abs(A.hull.point(i)[0]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(A.hull.point(i)[1]) < 1e-9);
  }
  const SingularityVerdict va = is_singular_map(angle, T2.point({0.2, 0.7}));
  CHECK_FALSE(va.singular);
  CHECK(va.margin == doctest::Approx(0.5).epsilon(1e-6));

  const Manifold S1 = Manifold::sphere(1, 1.0);
  MapField constant{T2, S1, [S1](const Point&) { return S1.point({1.0, 0.0}); },
                    [](const Point&) -> std::optional<Mat> { return Mat::Zero(2, 2); }, 0.0, "constant"};
  const SingularityVerdict vc = is_singular_map(constant, T2.point({0.5, 0.5}));
  CHECK(vc.singular);
  CHECK(vc.margin == 0.0);
}

TEST_CASE("map verdict reduces to scalar verdict") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Manifold R2 = Manifold::euclidean(2);
  for (int t = 0; t < 20; ++t) {
    Vec a(2), b(2);
    a << u(rng), u(rng);
    b << u(rng), u(rng);
    const ScalarField F = t % 2 ? catalog::max(catalog::affine(R2, a), catalog::affine(R2, b))
                                : catalog::affine(R2, t % 4 == 0 ? Vec(Vec::Zero(2)) : a);
    const Point p = R2.point({0.0, 0.0});
    const SingularityVerdict s = is_singular_scalar(F, p);
    const SingularityVerdict m = is_singular_map(as_map(F), p);
    CHECK(s.singular == m.singular);
    CHECK(m.margin == doctest::Approx(0.5 * s.margin).epsilon(1e-6));
  }
}

TEST_CASE("adjoints") {
  const Manifold R2 = Manifold::euclidean(2);
  const Frame f = frame_at(R2, R2.point({0.0, 0.0}));
  Mat A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;
  const LinearMapRep rep{f, f, A};
  Mat At(2, 2);
  At << 1.0, 0.0, 2.0, 1.0;
  CHECK(adjoint(rep).matrix == At);
  CHECK(adjoint(adjoint(rep)).matrix == A);
  CHECK(rank(rep) == 2);
  const LinearMapRep id{f, f, Mat::Identity(2, 2)};
  CHECK(adjoint(id).matrix == Mat::Identity(2, 2));

  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 1.0);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Manifold R3 = Manifold::euclidean(3);
  for (int t = 0; t < 20; ++t) {
    Mat B(3, 2);
    for (int i = 0; i < 6; ++i) B(i / 2, i % 2) = g(rng);
    const LinearMapRep r{frame_at(S2, random_point(S2, rng)), frame_at(R3, R3.point({0.0, 0.0, 0.0})), B};
    Vec v(2), w(3);
    v << g(rng), g(rng);
    w << g(rng), g(rng), g(rng);
    CHECK(std::abs((r.matrix * v).dot(w) - v.dot(adjoint(r).matrix * w)) < 1e-12);
    CHECK(rank(adjoint(r)) == rank(r));
  }
}

TEST_CASE("Grove-Shiohama criticality") {
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const Point n = S2.point({0.0, 0.0, 1.0});
  CHECK(gs_critical(S2, n, antipode(S2, n)).singular);
  const SingularityVerdict eq = gs_critical(S2, n, S2.point({0.0, 1.0, 0.0}));
  CHECK_FALSE(eq.singular);
  CHECK(eq.margin == doctest::Approx(1.0).epsilon(1e-12));
  const Manifold T2 = Manifold::flat_torus({1.0, 1.0});
  CHECK(gs_critical(T2, T2.point({0.0, 0.0}), T2.point({0.5, 0.5})).singular);
  CHECK_FALSE(gs_critical(T2, T2.point({0.0, 0.0}), T2.point({0.3, 0.1})).singular);
}

TEST_CASE("verdicts are deterministic in the seed") {
  const ScalarField f = catalog::abs_max(5.0);
  ClarkeParams p;
  p.seed = 99;
  const SingularityVerdict a = is_singular_scalar(f, f.manifold.point({1.0}), p);
  const SingularityVerdict b = is_singular_scalar(f, f.manifold.point({1.0}), p);
  CHECK(a.margin == b.margin);
  CHECK(a.samples_used == b.samples_used);
}

TEST_CASE("singular iff margin below tolerance") {
  std::mt19937_64 rng(24);
  const Manifold S2 = Manifold::sphere(2, 1.0);
  const ScalarField d = catalog::dist_to_point(S2, S2.point({0.0, 0.0, 1.0}));
  ClarkeParams p;
  for (int k = 0; k < 30; ++k) {
    const SingularityVerdict v = is_singular_scalar(d, random_point(S2, rng), p);
    CHECK(v.singular == (v.margin < v.threshold));
  }
}
