#include "nsmooth/clarke.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nsmooth/errors.hpp"
#include "nsmooth/sampling.hpp"

namespace nsmooth {

namespace {

double fd_step(const Point& x) { return 1e-6 * (1.0 + x.coords.norm()); }

struct FdGradient {
  Vec gradient;     // ambient tangent vector at x
  double kink = 0;  // max over frame directions of |forward - backward|
  double slope = 0; // largest one-sided quotient
};

FdGradient fd_gradient(const ScalarField& F, const Point& x) {
  const Manifold& M = F.manifold;
  const Frame f = frame_at(M, x);
  const double h = fd_step(x);
  const double f0 = F.eval(x);
  FdGradient out{Vec::Zero(M.coord_dim())};
  Vec comps(M.dim());
  for (int j = 0; j < M.dim(); ++j) {
    const Vec e = f.basis.col(j);
    const double fp = F.eval(exp(M, x, h * e));
    const double fm = F.eval(exp(M, x, -h * e));
    const double fwd = (fp - f0) / h;
    const double bwd = (f0 - fm) / h;
    comps[j] = (fp - fm) / (2.0 * h);
    out.kink = std::max(out.kink, std::abs(fwd - bwd));
    out.slope = std::max({out.slope, std::abs(fwd), std::abs(bwd)});
  }
  out.gradient = f.vector(comps);
  return out;
}

// Quasi-random points of B_radius(p), as exp_p of frame combinations.
std::vector<Point> ball_points(const Manifold& M, const Point& p, double radius, int n, std::uint64_t seed) {
  const Frame f = frame_at(M, p);
  HaltonSequence h(M.dim(), seed);
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(exp(M, p, radius * f.vector(h.next_in_ball())));
  return pts;
}

void check_radius(const Manifold& M, double radius, const char* who) {
  if (!(radius > 0.0) || radius >= M.convexity_radius()) {
    throw DomainViolation(std::string(who) + ": radius must lie in (0, convexity radius)");
  }
}

}  // namespace

MapField as_map(const ScalarField& F) {
  MapField out{F.manifold, Manifold::euclidean(1), {}, {}, F.lipschitz_hint, F.name};
  auto eval = F.eval;
  out.eval = [eval](const Point& x) {
    Vec v(1);
    v[0] = eval(x);
    return Point{v};
  };
  if (F.gradient) {
    auto grad = F.gradient;
    out.differential = [grad](const Point& x) -> std::optional<Mat> {
      auto g = grad(x);
      if (!g) return std::nullopt;
      return Mat(g->transpose());
    };
  }
  return out;
}

LinearMapRep adjoint(const LinearMapRep& A) {
  return LinearMapRep{A.target_frame, A.source_frame, A.matrix.transpose()};
}

int rank(const LinearMapRep& A, double tol) {
  if (A.matrix.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(A.matrix));
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > tol ? 1 : 0;
  return r;
}

double operator_norm(const LinearMapRep& A) {
  if (A.matrix.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(A.matrix));
  return svd.singularValues()[0];
}

double default_r0(const Manifold& M) { return std::min(1e-2, M.convexity_radius() / 10.0); }

MixtureSample sample_mixture(const ScalarField& F, const Point& p, double radius, int n, std::uint64_t seed,
                             const ClarkeParams& params) {
  const Manifold& M = F.manifold;
  check_radius(M, radius, "sample_mixture");
  if (n < M.dim() + 1) throw DomainViolation("sample_mixture: need at least m + 1 samples");

  struct Draw {
    Point x;
    Vec g;
    double kink;
    bool ok;
  };
  std::vector<Draw> draws;
  draws.reserve(n);
  double slope = 0.0;
  for (Point& x : ball_points(M, p, radius, n, seed)) {
    if (F.gradient) {
      auto g = F.gradient(x);
      draws.push_back({x, g.value_or(Vec::Zero(M.coord_dim())), 0.0, g.has_value()});
      if (g) slope = std::max(slope, g->norm());
    } else {
      FdGradient fd = fd_gradient(F, x);
      slope = std::max(slope, fd.slope);
      draws.push_back({x, fd.gradient, fd.kink, true});
    }
  }
  const double lip = std::max(F.lipschitz_hint.value_or(slope), 1e-300);

  const Frame frame = frame_at(M, p);
  MixtureSample out{HullSample(M.dim()), n, 0, 0.0};
  for (const Draw& d : draws) {
    if (!d.ok || d.kink > params.kink_ratio * lip) {
      ++out.discarded;
      continue;
    }
    const Vec moved = parallel_transport(M, d.x, p, d.g).vec;
    out.hull.add(frame.components(moved));
    out.max_gradient_norm = std::max(out.max_gradient_norm, d.g.norm());
  }
  if (2 * out.discarded > n) {
    throw InsufficientSamples("sample_mixture: " + std::to_string(out.discarded) + " of " + std::to_string(n) +
                              " samples rejected as non-differentiable");
  }
  return out;
}

GradientEstimate generalized_gradient(const ScalarField& F, const Point& p, const ClarkeParams& params) {
  const double r0 = params.r0 > 0.0 ? params.r0 : default_r0(F.manifold);
  GradientEstimate out;
  out.hull = HullSample(F.manifold.dim());
  double slope = 0.0;
  for (int k = 0; k < params.rungs; ++k) {
    const double r = r0 / std::pow(2.0, k);
    MixtureSample s = sample_mixture(F, p, r, params.samples_per_radius, params.seed + 7919 * k, params);
    out.hull.merge(s.hull);
    out.radii.push_back(r);
    out.drawn += s.drawn;
    out.discarded += s.discarded;
    slope = std::max(slope, s.max_gradient_norm);
  }
  out.lipschitz = F.lipschitz_hint.value_or(slope);
  return out;
}

SingularityVerdict is_singular_scalar(const ScalarField& F, const Point& p, const ClarkeParams& params) {
  const GradientEstimate g = generalized_gradient(F, p, params);
  const MinNormResult mn = min_norm_point(g.hull);
  SingularityVerdict v;
  v.margin = mn.norm;
  v.threshold = params.tol_sing * std::max(1.0, g.lipschitz);
  v.singular = mn.norm < v.threshold;
  v.samples_used = static_cast<int>(g.hull.size());
  v.radii_used = g.radii;
  return v;
}

DifferentialEstimate generalized_differential(const MapField& F, const Point& p, const ClarkeParams& params) {
  const Manifold& M = F.source;
  const Manifold& N = F.target;
  const int m = M.dim();
  const int n = N.dim();
  const double r0 = params.r0 > 0.0 ? params.r0 : default_r0(M);
  const Point Fp = F.eval(p);
  const Frame src = frame_at(M, p);
  const Frame dst = frame_at(N, Fp);
  const double target_ball = N.convexity_radius();

  DifferentialEstimate out;
  out.hull = HullSample(n * m);
  out.rows = n;
  out.cols = m;
  for (int k = 0; k < params.rungs; ++k) {
    const double r = r0 / std::pow(2.0, k);
    check_radius(M, r, "generalized_differential");
    out.radii.push_back(r);
    const std::vector<Point> xs = ball_points(M, p, r, params.samples_per_radius, params.seed + 7919 * k);

    struct Draw {
      Point x, Fx;
      Mat columns;  // dF_x(e_j(x)) as ambient target vectors
      double kink;
      bool ok;
    };
    std::vector<Draw> draws;
    double slope = 0.0;
    for (const Point& x : xs) {
      const Point Fx = F.eval(x);
      if (distance(N, Fx, Fp) >= target_ball) {
        throw TargetBallViolation("generalized_differential: F(B_r(p)) leaves the convex ball around F(p)");
      }
      const Frame fx = frame_at(M, x);
      Draw d{x, Fx, Mat::Zero(N.coord_dim(), m), 0.0, true};
      std::optional<Mat> J = F.differential ? F.differential(x) : std::nullopt;
      if (F.differential && !J) {
        d.ok = false;
      } else if (J) {
        d.columns = (*J) * fx.basis;
        for (int j = 0; j < m; ++j) slope = std::max(slope, d.columns.col(j).norm());
      } else {
        const double h = fd_step(x);
        for (int j = 0; j < m; ++j) {
          const Vec e = fx.basis.col(j);
          const Vec fwd = log(N, Fx, F.eval(exp(M, x, h * e))).vec / h;
          const Vec bwd = -log(N, Fx, F.eval(exp(M, x, -h * e))).vec / h;
          d.columns.col(j) = 0.5 * (fwd + bwd);
          d.kink = std::max(d.kink, (fwd - bwd).norm());
          slope = std::max({slope, fwd.norm(), bwd.norm()});
        }
      }
      draws.push_back(std::move(d));
    }
    const double lip = std::max(F.lipschitz_hint.value_or(slope), 1e-300);
    int rejected = 0;
    for (const Draw& d : draws) {
      if (!d.ok || d.kink > params.kink_ratio * lip) {
        ++rejected;
        continue;
      }
      const Frame fx = frame_at(M, d.x);
      Mat A(n, m);
      for (int j = 0; j < m; ++j) {
        // dF_x applied to the transported frame vector e_j(p), then carried back to F(p).
        const Vec ej = parallel_transport(M, p, d.x, src.basis.col(j)).vec;
        const Vec image = d.columns * fx.components(ej);
        const Vec back = parallel_transport(N, d.Fx, Fp, image).vec;
        A.col(j) = dst.components(back);
      }
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = A;
      out.hull.add(std::span<const double>(row_major.data(), static_cast<std::size_t>(row_major.size())));
    }
    out.drawn += static_cast<int>(xs.size());
    out.discarded += rejected;
    if (2 * rejected > static_cast<int>(xs.size())) {
      throw InsufficientSamples("generalized_differential: too many samples rejected as non-differentiable");
    }
  }
  return out;
}

double delta_estimate(const DifferentialEstimate& D, int direction_count) {
  const int n = D.rows;
  const int m = D.cols;
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& u : unit_direction_grid(n, direction_count)) {
    HullSample images(m);
    for (std::size_t k = 0; k < D.hull.size(); ++k) {
      const auto flat = D.hull.point(k);
      Eigen::VectorXd au = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < n; ++i) au += u[i] * flat.segment(i * m, m);
      images.add(au);
    }
    best = std::min(best, min_norm_point(images).norm);
  }
  return best / 2.0;
}

SingularityVerdict is_singular_map(const MapField& F, const Point& p, const ClarkeParams& params) {
  const DifferentialEstimate D = generalized_differential(F, p, params);
  SingularityVerdict v;
  v.margin = delta_estimate(D, params.direction_count);
  v.threshold = params.tol_sing;
  v.singular = !(v.margin > params.tol_sing);
  v.samples_used = static_cast<int>(D.hull.size());
  v.radii_used = D.radii;
  return v;
}

SingularityVerdict gs_critical(const Manifold& M, const Point& p, const Point& q, const ClarkeParams& params) {
  const MinimalGeodesics g = minimal_geodesics(M, p, q, params.geodesic_cap);
  if (g.initial.empty()) throw DomainViolation("gs_critical: p and q coincide");
  const Frame fq = frame_at(M, q);
  HullSample arrivals(M.dim());
  for (const Vec& a : g.arrival) arrivals.add(fq.components(a));
  const MinNormResult mn = min_norm_point(arrivals);
  SingularityVerdict v;
  v.margin = mn.norm;
  v.threshold = params.tol_sing;
  v.singular = mn.norm < params.tol_sing;
  v.samples_used = static_cast<int>(arrivals.size());
  return v;
}

double nonsingular_radius(const ScalarField& F, const Point& p, double margin, const ClarkeParams& params) {
  const Manifold& M = F.manifold;
  const double top = M.compact() ? M.convexity_radius() / 4.0 : 1.0;
  for (int k = 0; k < 12; ++k) {
    const double lambda = top / std::pow(2.0, k);
    try {
      const MixtureSample s = sample_mixture(F, p, 2.0 * lambda, 4 * params.samples_per_radius, params.seed, params);
      if (min_norm_point(s.hull).norm >= margin / 2.0) return lambda;
    } catch (const InsufficientSamples&) {
    }
  }
  return 0.0;
}

}  // namespace nsmooth
