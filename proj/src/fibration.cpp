#include "nsmooth/fibration.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

std::vector<double> coords_of(const Point& p) { return {p.coords.data(), p.coords.data() + p.coords.size()}; }

double plane_radius(const Manifold& torus, int i) { return torus.periods()[i] / (2.0 * std::numbers::pi); }

double smallest_singular_value(const Mat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(A)};
  const auto& s = svd.singularValues();
  return s[s.size() - 1];
}

}  // namespace

EmbeddingSpec::EmbeddingSpec(Manifold target) : target_(std::move(target)) {
  switch (target_.kind()) {
    case ManifoldKind::Euclidean:
      ambient_dim_ = target_.dim();
      tube_radius_ = std::numeric_limits<double>::infinity();
      break;
    case ManifoldKind::Sphere:
      ambient_dim_ = target_.dim() + 1;
      tube_radius_ = target_.radius() / 2.0;
      break;
    case ManifoldKind::FlatTorus:
      ambient_dim_ = 2 * target_.dim();
      tube_radius_ = *std::min_element(target_.periods().begin(), target_.periods().end()) /
                     (4.0 * std::numbers::pi);
      break;
  }
  if (ambient_dim_ > kMaxCoords) throw UnsupportedTarget("embedding: ambient dimension exceeds " + std::to_string(kMaxCoords));
}

Vec EmbeddingSpec::embed(const Point& x) const {
  if (target_.kind() != ManifoldKind::FlatTorus) return x.coords;
  Vec y(ambient_dim_);
  for (int i = 0; i < target_.dim(); ++i) {
    const double r = plane_radius(target_, i);
    const double t = x.coords[i] / r;
    y[2 * i] = r * std::cos(t);
    y[2 * i + 1] = r * std::sin(t);
  }
  return y;
}

Point EmbeddingSpec::project(const Vec& y) const {
  if (y.size() != ambient_dim_) throw DomainViolation("project: wrong ambient dimension");
  switch (target_.kind()) {
    case ManifoldKind::Euclidean:
      return target_.point(y);
    case ManifoldKind::Sphere: {
      const double n = y.norm();
      if (!(n > 0.0)) throw TubeEscape("project: the origin has no nearest sphere point", coords_of(Point{y}));
      return target_.point(target_.radius() * y / n);
    }
    case ManifoldKind::FlatTorus: {
      Vec x(target_.dim());
      for (int i = 0; i < target_.dim(); ++i) {
        const double a = y[2 * i];
        const double b = y[2 * i + 1];
        if (a == 0.0 && b == 0.0) throw TubeEscape("project: a circle centre has no nearest point", coords_of(Point{y}));
        x[i] = plane_radius(target_, i) * std::atan2(b, a);
      }
      return target_.point(x);
    }
  }
  return target_.point(y);
}

Mat EmbeddingSpec::dproject(const Vec& y) const {
  Mat D = Mat::Zero(ambient_dim_, ambient_dim_);
  switch (target_.kind()) {
    case ManifoldKind::Euclidean:
      D.setIdentity();
      break;
    case ManifoldKind::Sphere: {
      const double n = y.norm();
      const Vec u = y / n;
      D = (target_.radius() / n) * (Mat::Identity(ambient_dim_, ambient_dim_) - u * u.transpose());
      break;
    }
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < target_.dim(); ++i) {
        Vec u = y.segment(2 * i, 2);
        const double n = u.norm();
        u /= n;
        D.block(2 * i, 2 * i, 2, 2) =
            (plane_radius(target_, i) / n) * (Mat::Identity(2, 2) - u * u.transpose());
      }
      break;
  }
  return D;
}

Mat EmbeddingSpec::dembed(const Point& x) const {
  if (target_.kind() != ManifoldKind::FlatTorus) return Mat::Identity(ambient_dim_, ambient_dim_);
  Mat D = Mat::Zero(ambient_dim_, target_.dim());
  for (int i = 0; i < target_.dim(); ++i) {
    const double t = x.coords[i] / plane_radius(target_, i);
    D(2 * i, i) = -std::sin(t);
    D(2 * i + 1, i) = std::cos(t);
  }
  return D;
}

Mat EmbeddingSpec::tangent_frame(const Point& x) const { return dembed(x) * frame_at(target_, x).basis; }

double EmbeddingSpec::distance_to_image(const Vec& y) const {
  switch (target_.kind()) {
    case ManifoldKind::Euclidean:
      return 0.0;
    case ManifoldKind::Sphere:
      return std::abs(y.norm() - target_.radius());
    case ManifoldKind::FlatTorus: {
      double s = 0.0;
      for (int i = 0; i < target_.dim(); ++i) {
        const double d = y.segment(2 * i, 2).norm() - plane_radius(target_, i);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

EmbeddingSpec embedding(const Manifold& N) { return EmbeddingSpec(N); }

VectorMap embedded_map(const MapField& F, const EmbeddingSpec& E) {
  VectorMap out{F.source, E.ambient_dim(), {}, {}, F.lipschitz_hint, F.name};
  auto eval = F.eval;
  out.eval = [eval, E](const Point& x) { return E.embed(eval(x)); };
  if (F.differential) {
    auto diff = F.differential;
    out.jacobian = [eval, diff, E](const Point& x) -> std::optional<Mat> {
      auto D = diff(x);
      if (!D) return std::nullopt;
      if (E.target().kind() != ManifoldKind::FlatTorus) return D;
      return Mat(E.dembed(eval(x)) * *D);
    };
  }
  return out;
}

Fibration::Fibration(SmoothedMap smoothed, EmbeddingSpec E) : smoothed_(std::move(smoothed)), embedding_(std::move(E)) {
  if (smoothed_.base().out_dim != embedding_.ambient_dim()) {
    throw DomainViolation("Fibration: smoothing does not take values in the embedding space");
  }
}

Point Fibration::value(const Point& q) const {
  const Vec y = smoothed_.value(q);
  if (embedding_.distance_to_image(y) >= embedding_.tube_radius()) {
    throw TubeEscape("f_eps: smoothed value left the tubular neighbourhood", coords_of(q));
  }
  return embedding_.project(y);
}

Mat Fibration::differential(const Point& q) const {
  const Vec y = smoothed_.value(q);
  const Point x = embedding_.project(y);
  return embedding_.tangent_frame(x).transpose() * embedding_.dproject(y) * smoothed_.jacobian(q);
}

Mat Fibration::differential_fd(const Point& q, double h) const {
  const Manifold& M = smoothed_.manifold();
  const Frame fq = frame_at(M, q);
  const Mat T = embedding_.tangent_frame(value(q));
  Mat out(T.cols(), M.dim());
  for (int j = 0; j < M.dim(); ++j) {
    const Vec e = fq.basis.col(j);
    const Vec plus = embedding_.embed(value(exp(M, q, h * e)));
    const Vec minus = embedding_.embed(value(exp(M, q, -h * e)));
    out.col(j) = T.transpose() * (plus - minus) / (2.0 * h);
  }
  return out;
}

Fibration compose_fibration(SmoothedMap smoothed, EmbeddingSpec E, const std::vector<Point>& grid) {
  for (const Point& q : grid) {
    if (E.distance_to_image(smoothed.value(q)) >= E.tube_radius()) {
      throw TubeEscape("compose_fibration: smoothed value left the tubular neighbourhood", coords_of(q));
    }
  }
  return Fibration(std::move(smoothed), std::move(E));
}

SubmersionResult submersion_check(const Fibration& f, const std::vector<Point>& grid, double tol) {
  SubmersionResult out{std::numeric_limits<double>::infinity(), false, -1};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = smallest_singular_value(f.differential(grid[i]));
    if (s < out.min_sigma) {
      out.min_sigma = s;
      out.argmin = static_cast<int>(i);
    }
  }
  if (grid.empty()) out.min_sigma = 0.0;
  out.transversal = out.min_sigma > tol;
  return out;
}

FibrationReport fibration_report(const MapField& F, const Fibration& f, const std::vector<Point>& grid, double eta,
                                 double sigma_tol) {
  const EmbeddingSpec& E = f.embedding();
  const SmoothedMap& S = f.smoothed();
  FibrationReport rep;
  rep.eps = S.eps();
  rep.eta = eta;
  rep.grid_size = static_cast<int>(grid.size());
  rep.tube_radius = E.tube_radius();
  rep.sigma_tol = sigma_tol;
  rep.min_sigma = std::numeric_limits<double>::infinity();
  for (const Point& q : grid) {
    const Vec y = S.value(q);
    const double tube = E.distance_to_image(y);
    if (tube >= E.tube_radius()) {
      throw TubeEscape("fibration: smoothed value left the tubular neighbourhood", coords_of(q));
    }
    rep.max_tube_distance = std::max(rep.max_tube_distance, tube);
    const Point x = E.project(y);
    rep.max_dist = std::max(rep.max_dist, distance(E.target(), x, F.eval(q)));
    const Mat df = E.tangent_frame(x).transpose() * E.dproject(y) * S.jacobian(q);
    rep.min_sigma = std::min(rep.min_sigma, smallest_singular_value(df));
  }
  if (grid.empty()) rep.min_sigma = 0.0;
  rep.transversal = rep.min_sigma > sigma_tol;
  return rep;
}

EtaSearchResult eta_search(const MapField& F, const EmbeddingSpec& E, double eta, const std::vector<Point>& grid,
                           const EtaSearchOptions& options) {
  if (!(eta > 0.0)) throw DomainViolation("eta_search: eta must be positive");
  if (!(F.target == E.target())) throw DomainViolation("eta_search: embedding target differs from the map target");
  const Manifold& M = F.source;
  const double r = options.cover_radius > 0.0 ? options.cover_radius : default_cover_radius(M);
  const Cover cover = build_cover(M, r);
  const VectorMap base = embedded_map(F, E);

  EtaSearchResult out;
  for (double eps : options.ladder) {
    EtaRung rung{eps, "", std::nullopt, ""};
    try {
      Fibration f(SmoothedMap(base, cover, eps, options.quadrature), E);
      rung.report = fibration_report(F, f, grid, eta, options.sigma_tol);
      const bool ok = rung.report->max_dist < eta && rung.report->transversal;
      rung.status = ok ? "accepted" : "rejected";
    } catch (const TubeEscape& e) {
      rung.status = "tube-escape";
      rung.detail = e.what();
    } catch (const DomainViolation& e) {
      rung.status = "domain";
      rung.detail = e.what();
    }
    out.rungs.push_back(rung);
    if (rung.status == "accepted" && !out.accepted) {
      out.accepted = true;
      out.eps_accepted = eps;
      out.report = rung.report;
      if (!options.full_ladder) break;
    }
  }
  if (!out.accepted) {
    for (const EtaRung& rung : out.rungs) {
      if (rung.report && (!out.report || rung.report->max_dist < out.report->max_dist)) out.report = rung.report;
    }
  }
  return out;
}

}  // namespace nsmooth
