#include "nsmooth/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsmooth/errors.hpp"
#include "nsmooth/kernels.hpp"
#include "nsmooth/sampling.hpp"

namespace nsmooth {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period) r -= period;
  if (r < 0.0) r = 0.0;
  return r;
}

// Torus difference q - p reduced to [-L/2, L/2].
Vec torus_delta(const Manifold& M, const Point& p, const Point& q) {
  Vec d = q.coords - p.coords;
  for (int i = 0; i < d.size(); ++i) {
    const double L = M.periods()[i];
    d[i] -= L * std::round(d[i] / L);
  }
  return d;
}

// Angle between sphere points and the unit direction of q's component orthogonal to p.
struct SphereLog {
  double angle;
  Vec direction;  // zero when q == p
};

SphereLog sphere_log_parts(const Manifold& M, const Point& p, const Point& q) {
  const double R = M.radius();
  const double c = p.coords.dot(q.coords) / (R * R);
  Vec w = q.coords - c * p.coords;
  const double wn = w.norm();
  SphereLog out{std::atan2(wn / R, c), Vec::Zero(p.coords.size())};
  if (wn > 0.0) out.direction = w / wn;
  return out;
}

}  // namespace

Manifold::Manifold(ManifoldKind kind, int dim, double radius, std::vector<double> periods)
    : kind_(kind), dim_(dim), radius_(radius), periods_(std::move(periods)) {}

Manifold Manifold::euclidean(int dim) {
  if (dim < 1 || dim > kMaxCoords) throw DomainViolation("euclidean: dimension must be in [1, 8]");
  return Manifold(ManifoldKind::Euclidean, dim, 0.0, {});
}

Manifold Manifold::sphere(int dim, double radius) {
  if (dim < 1 || dim + 1 > kMaxCoords) throw DomainViolation("sphere: dimension must be in [1, 7]");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainViolation("sphere: radius must be positive");
  return Manifold(ManifoldKind::Sphere, dim, radius, {});
}

Manifold Manifold::flat_torus(std::vector<double> periods) {
  const int dim = static_cast<int>(periods.size());
  if (dim < 1 || dim > kMaxCoords / 2) throw DomainViolation("flat_torus: dimension must be in [1, 4]");
  for (double L : periods) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainViolation("flat_torus: periods must be positive");
  }
  return Manifold(ManifoldKind::FlatTorus, dim, 0.0, std::move(periods));
}

double Manifold::injectivity_radius() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return std::numeric_limits<double>::infinity();
    case ManifoldKind::Sphere:
      return kPi * radius_;
    case ManifoldKind::FlatTorus:
      return *std::min_element(periods_.begin(), periods_.end()) / 2.0;
  }
  return 0.0;
}

double Manifold::convexity_radius() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return std::numeric_limits<double>::infinity();
    case ManifoldKind::Sphere:
      return kPi * radius_ / 2.0 * 0.99;
    case ManifoldKind::FlatTorus:
      return *std::min_element(periods_.begin(), periods_.end()) / 4.0;
  }
  return 0.0;
}

double Manifold::volume() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return std::numeric_limits<double>::infinity();
    case ManifoldKind::Sphere: {
      // |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2)
      const double n = dim_ + 1;
      return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0) * std::pow(radius_, dim_);
    }
    case ManifoldKind::FlatTorus: {
      double v = 1.0;
      for (double L : periods_) v *= L;
      return v;
    }
  }
  return 0.0;
}

std::string Manifold::name() const {
  std::ostringstream os;
  switch (kind_) {
    case ManifoldKind::Euclidean:
      os << "euclidean(" << dim_ << ")";
      break;
    case ManifoldKind::Sphere:
      os << "sphere(" << dim_ << ", R=" << radius_ << ")";
      break;
    case ManifoldKind::FlatTorus:
      os << "flat_torus(";
      for (std::size_t i = 0; i < periods_.size(); ++i) os << (i ? ", " : "") << periods_[i];
      os << ")";
      break;
  }
  return os.str();
}

Point Manifold::point(const Vec& coords) const {
  if (coords.size() != coord_dim()) throw DomainViolation(name() + ": wrong number of coordinates");
  if (!coords.allFinite()) throw DomainViolation(name() + ": non-finite coordinates");
  Point p{coords};
  switch (kind_) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::Sphere: {
      const double n = coords.norm();
      if (std::abs(n - radius_) > 1e-6 * radius_) throw DomainViolation(name() + ": point is off the sphere");
      p.coords *= radius_ / n;
      break;
    }
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < dim_; ++i) p.coords[i] = wrap_angle(coords[i], periods_[i]);
      break;
  }
  return p;
}

Point Manifold::point(std::initializer_list<double> coords) const {
  Vec v(static_cast<Eigen::Index>(coords.size()));
  int i = 0;
  for (double c : coords) v[i++] = c;
  return point(v);
}

bool Manifold::contains(const Point& p, double tol) const {
  if (p.coords.size() != coord_dim() || !p.coords.allFinite()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return true;
    case ManifoldKind::Sphere:
      return std::abs(p.coords.norm() - radius_) <= tol * radius_;
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < dim_; ++i) {
        if (p.coords[i] < 0.0 || p.coords[i] >= periods_[i]) return false;
      }
      return true;
  }
  return false;
}

Vec Manifold::to_tangent(const Point& p, const Vec& v) const {
  if (kind_ != ManifoldKind::Sphere) return v;
  return v - (p.coords.dot(v) / (radius_ * radius_)) * p.coords;
}

double distance(const Manifold& M, const Point& p, const Point& q) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      return (q.coords - p.coords).norm();
    case ManifoldKind::Sphere:
      return M.radius() * sphere_log_parts(M, p, q).angle;
    case ManifoldKind::FlatTorus:
      return torus_delta(M, p, q).norm();
  }
  return 0.0;
}

Point exp(const Manifold& M, const Point& p, const Vec& v) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      return Point{p.coords + v};
    case ManifoldKind::Sphere: {
      const double R = M.radius();
      const double n = v.norm();
      if (n == 0.0) return p;
      const double t = n / R;
      Vec x = std::cos(t) * p.coords + (R * std::sin(t) / n) * v;
      x *= R / x.norm();
      return Point{x};
    }
    case ManifoldKind::FlatTorus: {
      Point out{p.coords + v};
      for (int i = 0; i < M.dim(); ++i) out.coords[i] = wrap_angle(out.coords[i], M.periods()[i]);
      return out;
    }
  }
  return p;
}

Point exp(const Manifold& M, const Tangent& v) { return exp(M, v.base, v.vec); }

bool cut_ambiguous(const Manifold& M, const Point& p, const Point& q) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      return false;
    case ManifoldKind::Sphere:
      return sphere_log_parts(M, p, q).angle > kPi - kAntipodeAngleTol;
    case ManifoldKind::FlatTorus: {
      const Vec d = torus_delta(M, p, q);
      for (int i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) > M.periods()[i] / 2.0 - kCutTol) return true;
      }
      return false;
    }
  }
  return false;
}

Tangent log(const Manifold& M, const Point& p, const Point& q) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      return Tangent{p, q.coords - p.coords};
    case ManifoldKind::Sphere: {
      const SphereLog s = sphere_log_parts(M, p, q);
      if (s.angle > kPi - kAntipodeAngleTol) {
        throw CutLocusAmbiguity("log: points are antipodal on " + M.name());
      }
      return Tangent{p, M.radius() * s.angle * s.direction};
    }
    case ManifoldKind::FlatTorus: {
      if (cut_ambiguous(M, p, q)) throw CutLocusAmbiguity("log: point lies on the cut locus of " + M.name());
      return Tangent{p, torus_delta(M, p, q)};
    }
  }
  return Tangent{p, Vec::Zero(p.coords.size())};
}

Frame frame_at(const Manifold& M, const Point& p) {
  const int m = M.dim();
  if (M.kind() != ManifoldKind::Sphere) return Frame{p, Mat::Identity(m, m)};
  // Householder reflection taking e_m to p/R; its other columns span p's complement.
  const int n = m + 1;
  const Vec unit = p.coords / M.radius();
  Vec w = unit;
  w[m] -= 1.0;
  Mat H = Mat::Identity(n, n);
  const double wn2 = w.squaredNorm();
  if (wn2 > 1e-24) H -= (2.0 / wn2) * (w * w.transpose());
  return Frame{p, H.leftCols(m)};
}

Point antipode(const Manifold& M, const Point& p) {
  switch (M.kind()) {
    case ManifoldKind::Sphere:
      return Point{-p.coords};
    case ManifoldKind::FlatTorus: {
      Vec half(M.dim());
      for (int i = 0; i < M.dim(); ++i) half[i] = M.periods()[i] / 2.0;
      return exp(M, p, half);
    }
    case ManifoldKind::Euclidean:
      break;
  }
  throw DomainViolation("antipode: undefined on " + M.name());
}

MinimalGeodesics minimal_geodesics(const Manifold& M, const Point& p, const Point& q, int cap, double slack) {
  MinimalGeodesics out;
  out.length = distance(M, p, q);
  if (out.length <= 1e-14 || cap <= 0) return out;
  switch (M.kind()) {
    case ManifoldKind::Euclidean: {
      const Vec u = (q.coords - p.coords) / out.length;
      out.initial.push_back(u);
      out.arrival.push_back(u);
      break;
    }
    case ManifoldKind::Sphere: {
      const SphereLog s = sphere_log_parts(M, p, q);
      if (s.angle > kPi - kAntipodeAngleTol) {
        // Every unit direction at p reaches the antipode: sample the continuum.
        out.continuum = true;
        const Frame f = frame_at(M, p);
        for (const Vec& c : unit_direction_grid(M.dim(), cap)) {
          if (static_cast<int>(out.initial.size()) >= cap) break;
          const Vec u = f.vector(c);
          out.initial.push_back(u);
          Vec a = M.to_tangent(q, -u);
          out.arrival.push_back(a / a.norm());
        }
      } else {
        const Vec& u = s.direction;
        out.initial.push_back(u);
        const double t = s.angle;
        out.arrival.push_back(std::cos(t) * u - std::sin(t) * p.coords / M.radius());
      }
      break;
    }
    case ManifoldKind::FlatTorus: {
      const int m = M.dim();
      const double tol = slack >= 0.0 ? slack : 1e-9 * (1.0 + out.length);
      const Vec base = torus_delta(M, p, q);
      int combos = 1;
      for (int i = 0; i < m; ++i) combos *= 3;
      std::vector<Vec> found;
      for (int c = 0; c < combos; ++c) {
        Vec cand = base;
        int code = c;
        for (int i = 0; i < m; ++i) {
          cand[i] += (code % 3 - 1) * M.periods()[i];
          code /= 3;
        }
        if (cand.norm() <= out.length + tol) found.push_back(cand);
      }
      std::sort(found.begin(), found.end(), [](const Vec& a, const Vec& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
      });
      for (const Vec& cand : found) {
        if (static_cast<int>(out.initial.size()) >= cap) break;
        const Vec u = cand / cand.norm();
        out.initial.push_back(u);
        out.arrival.push_back(u);
      }
      break;
    }
  }
  return out;
}

Tangent parallel_transport(const Manifold& M, const Point& p, const Point& q, const Vec& v) {
  if (M.kind() != ManifoldKind::Sphere) {
    if (cut_ambiguous(M, p, q)) throw CutLocusAmbiguity("parallel_transport: ambiguous geodesic");
    return Tangent{q, v};
  }
  const SphereLog s = sphere_log_parts(M, p, q);
  if (s.angle > kPi - kAntipodeAngleTol) throw CutLocusAmbiguity("parallel_transport: antipodal points");
  if (s.direction.squaredNorm() == 0.0) return Tangent{q, v};
  const Vec& u = s.direction;
  const double a = v.dot(u);
  const double t = s.angle;
  Vec out = v + a * ((std::cos(t) - 1.0) * u - std::sin(t) * p.coords / M.radius());
  return Tangent{q, out};
}

Vec dexp(const Manifold& M, const Point& center, const Vec& w, const Vec& W) {
  if (M.kind() != ManifoldKind::Sphere) return W;
  const double R = M.radius();
  const double a = w.norm();
  if (a < 1e-14) return W;
  const Vec wh = w / a;
  const double t = a / R;
  const double radial = W.dot(wh);
  const Vec perp = W - radial * wh;
  return radial * (std::cos(t) * wh - std::sin(t) * center.coords / R) + (R * std::sin(t) / a) * perp;
}

Vec dlog(const Manifold& M, const Point& center, const Point& q, const Vec& v) {
  if (M.kind() != ManifoldKind::Sphere) return v;
  const double R = M.radius();
  const SphereLog s = sphere_log_parts(M, center, q);
  if (s.angle > kPi - kAntipodeAngleTol) throw CutLocusAmbiguity("dlog: antipodal points");
  const double a = R * s.angle;
  if (a < 1e-14) return M.to_tangent(center, v);
  const Vec& wh = s.direction;
  const double t = s.angle;
  const Vec arrival = std::cos(t) * wh - std::sin(t) * center.coords / R;
  const double radial = v.dot(arrival);
  const Vec perp = v - radial * arrival;
  return radial * wh + (a / (R * std::sin(t))) * perp;
}

Tangent jacobi_endpoint(const Manifold& M, const Point& center, const Point& q, const Vec& y, const Vec& v) {
  const Tangent w0 = log(M, center, q);
  if (w0.norm() + y.norm() >= M.injectivity_radius()) {
    throw DomainViolation("jacobi_endpoint: |log(q)| + |y| must stay below the injectivity radius");
  }
  const Vec W = dlog(M, center, q, v);
  const Vec w = w0.vec - y;
  return Tangent{exp(M, center, w), dexp(M, center, w, W)};
}

Point random_point(const Manifold& M, std::mt19937_64& rng, double box) {
  switch (M.kind()) {
    case ManifoldKind::Euclidean: {
      std::uniform_real_distribution<double> u(-box, box);
      Vec x(M.dim());
      for (int i = 0; i < M.dim(); ++i) x[i] = u(rng);
      return Point{x};
    }
    case ManifoldKind::Sphere: {
      std::normal_distribution<double> g;
      Vec x(M.coord_dim());
      do {
        for (int i = 0; i < x.size(); ++i) x[i] = g(rng);
      } while (x.norm() < 1e-8);
      return Point{x * (M.radius() / x.norm())};
    }
    case ManifoldKind::FlatTorus: {
      Vec x(M.dim());
      for (int i = 0; i < M.dim(); ++i) {
        std::uniform_real_distribution<double> u(0.0, M.periods()[i]);
        x[i] = u(rng);
      }
      return M.point(x);
    }
  }
  return Point{};
}

Vec random_unit_tangent(const Manifold& M, const Point& p, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Frame f = frame_at(M, p);
  Vec c(M.dim());
  do {
    for (int i = 0; i < c.size(); ++i) c[i] = g(rng);
  } while (c.norm() < 1e-8);
  return f.vector(c / c.norm());
}

void batch_distances(const Manifold& M, std::span<const double> rows, const Point& q, std::span<double> out) {
  const std::span<const double> x(q.coords.data(), static_cast<std::size_t>(q.coords.size()));
  const std::size_t n = rows.size() / x.size();
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      kernels::squared_distances(rows, x, out);
      for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(out[i]);
      break;
    case ManifoldKind::Sphere: {
      kernels::matvec(rows, x, out);
      const double R = M.radius();
      for (std::size_t i = 0; i < n; ++i) out[i] = R * std::acos(std::clamp(out[i] / (R * R), -1.0, 1.0));
      break;
    }
    case ManifoldKind::FlatTorus:
      kernels::wrapped_squared_distances(rows, x, M.periods(), out);
      for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(out[i]);
      break;
  }
}

}  // namespace nsmooth
