#include "nsmooth/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsmooth/errors.hpp"

namespace nsmooth::catalog {

namespace {

constexpr double kTie = 1e-12;

void require_same(const ScalarField& F, const ScalarField& G, const char* who) {
  if (!(F.manifold == G.manifold)) throw DomainViolation(std::string(who) + ": fields live on different manifolds");
}

std::optional<double> combine_hints(const ScalarField& F, const ScalarField& G, bool sum) {
  if (!F.lipschitz_hint || !G.lipschitz_hint) return std::nullopt;
  return sum ? *F.lipschitz_hint + *G.lipschitz_hint : std::max(*F.lipschitz_hint, *G.lipschitz_hint);
}

ScalarField pick(const ScalarField& F, const ScalarField& G, bool take_max) {
  require_same(F, G, take_max ? "max" : "min");
  ScalarField out{F.manifold, {}, {}, combine_hints(F, G, false),
                  std::string(take_max ? "max(" : "min(") + F.name + "," + G.name + ")"};
  auto f = F.eval;
  auto g = G.eval;
  out.eval = [f, g, take_max](const Point& x) { return take_max ? std::max(f(x), g(x)) : std::min(f(x), g(x)); };
  if (F.gradient && G.gradient) {
    auto df = F.gradient;
    auto dg = G.gradient;
    out.gradient = [f, g, df, dg, take_max](const Point& x) -> std::optional<Vec> {
      const double a = f(x);
      const double b = g(x);
      if (std::abs(a - b) <= kTie * (1.0 + std::abs(a))) return std::nullopt;
      return (a > b) == take_max ? df(x) : dg(x);
    };
  }
  return out;
}

void require_torus(const Manifold& M, const char* who) {
  if (M.kind() != ManifoldKind::FlatTorus) throw DomainViolation(std::string(who) + ": source must be a flat torus");
}

MapField circle_map(const Manifold& torus, double target_radius, std::string name,
                    std::function<double(const Vec&)> phase, std::function<std::optional<Vec>(const Vec&)> dphase,
                    double lip) {
  if (!(target_radius > 0.0)) throw DomainViolation(name + ": target radius must be positive");
  const Manifold target = Manifold::sphere(1, target_radius);
  MapField out{torus, target, {}, {}, lip * target_radius, std::move(name)};
  out.eval = [target, phase, target_radius](const Point& x) {
    const double phi = phase(x.coords);
    return target.point({target_radius * std::cos(phi), target_radius * std::sin(phi)});
  };
  out.differential = [phase, dphase, target_radius](const Point& x) -> std::optional<Mat> {
    auto d = dphase(x.coords);
    if (!d) return std::nullopt;
    const double phi = phase(x.coords);
    Mat J(2, d->size());
    J.row(0) = -target_radius * std::sin(phi) * d->transpose();
    J.row(1) = target_radius * std::cos(phi) * d->transpose();
    return J;
  };
  return out;
}

}  // namespace

ScalarField dist_to_point(const Manifold& M, const Point& p) {
  ScalarField F{M, {}, {}, 1.0, "dist-to-point"};
  F.eval = [M, p](const Point& q) { return distance(M, p, q); };
  F.gradient = [M, p](const Point& q) -> std::optional<Vec> {
    const double d = distance(M, p, q);
    if (d <= 0.0 || cut_ambiguous(M, q, p)) return std::nullopt;
    return Vec(-log(M, q, p).vec / d);
  };
  return F;
}

ScalarField height(const Manifold& M) {
  if (M.kind() != ManifoldKind::Sphere) throw DomainViolation("height: needs a sphere");
  const int last = M.coord_dim() - 1;
  ScalarField F{M, {}, {}, 1.0, "height"};
  F.eval = [last](const Point& q) { return q.coords[last]; };
  F.gradient = [M, last](const Point& q) -> std::optional<Vec> {
    Vec e = Vec::Zero(M.coord_dim());
    e[last] = 1.0;
    return M.to_tangent(q, e);
  };
  return F;
}

ScalarField abs_max(double box) {
  ScalarField F{Manifold::euclidean(1), {}, {}, 2.0 * (box + 2.0), "abs-max"};
  F.eval = [](const Point& q) {
    const double x = q.coords[0];
    return std::max(std::abs(x) - 1.0, (x - 2.0) * (x - 2.0) - 1.0);
  };
  F.gradient = [](const Point& q) -> std::optional<Vec> {
    const double x = q.coords[0];
    const double a = std::abs(x) - 1.0;
    const double b = (x - 2.0) * (x - 2.0) - 1.0;
    Vec g(1);
    if (std::abs(a - b) <= kTie) return std::nullopt;
    if (a > b) {
      if (x == 0.0) return std::nullopt;
      g[0] = x > 0.0 ? 1.0 : -1.0;
    } else {
      g[0] = 2.0 * (x - 2.0);
    }
    return g;
  };
  return F;
}

ScalarField x2sin(double box) {
  ScalarField F{Manifold::euclidean(1), {}, {}, 2.0 * box + 1.0, "x2sin"};
  F.eval = [](const Point& q) {
    const double x = q.coords[0];
    return x == 0.0 ? 0.0 : x * x * std::sin(1.0 / x);
  };
  F.gradient = [](const Point& q) -> std::optional<Vec> {
    const double x = q.coords[0];
    if (x == 0.0) return std::nullopt;
    Vec g(1);
    g[0] = 2.0 * x * std::sin(1.0 / x) - std::cos(1.0 / x);
    return g;
  };
  return F;
}

ScalarField double_bump(const Manifold& M, double a) {
  if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) throw DomainViolation("double-bump: needs Sphere(2)");
  ScalarField F{M, {}, {}, 1.0 + 2.0 * std::abs(a) * M.radius(), "double-bump"};
  F.eval = [a](const Point& q) { return q.coords[2] + a * q.coords[0] * q.coords[0]; };
  F.gradient = [M, a](const Point& q) -> std::optional<Vec> {
    Vec e = Vec::Zero(3);
    e[0] = 2.0 * a * q.coords[0];
    e[2] = 1.0;
    return M.to_tangent(q, e);
  };
  return F;
}

ScalarField affine(const Manifold& M, const Vec& a, double b) {
  if (M.kind() != ManifoldKind::Euclidean) throw DomainViolation("affine: needs Euclidean space");
  if (a.size() != M.dim()) throw DomainViolation("affine: slope has the wrong dimension");
  ScalarField F{M, {}, {}, a.norm(), "affine"};
  F.eval = [a, b](const Point& q) { return a.dot(q.coords) + b; };
  F.gradient = [a](const Point&) -> std::optional<Vec> { return a; };
  return F;
}

ScalarField scale(const ScalarField& F, double c) {
  ScalarField out{F.manifold, {}, {}, std::nullopt, "scale(" + F.name + ")"};
  if (F.lipschitz_hint) out.lipschitz_hint = std::abs(c) * *F.lipschitz_hint;
  auto f = F.eval;
  out.eval = [f, c](const Point& x) { return c * f(x); };
  if (F.gradient) {
    auto df = F.gradient;
    out.gradient = [df, c](const Point& x) -> std::optional<Vec> {
      auto g = df(x);
      if (!g) return std::nullopt;
      return Vec(c * *g);
    };
  }
  return out;
}

ScalarField add(const ScalarField& F, const ScalarField& G) {
  require_same(F, G, "add");
  ScalarField out{F.manifold, {}, {}, combine_hints(F, G, true), "add(" + F.name + "," + G.name + ")"};
  auto f = F.eval;
  auto g = G.eval;
  out.eval = [f, g](const Point& x) { return f(x) + g(x); };
  if (F.gradient && G.gradient) {
    auto df = F.gradient;
    auto dg = G.gradient;
    out.gradient = [df, dg](const Point& x) -> std::optional<Vec> {
      auto a = df(x);
      auto b = dg(x);
      if (!a || !b) return std::nullopt;
      return Vec(*a + *b);
    };
  }
  return out;
}

ScalarField max(const ScalarField& F, const ScalarField& G) { return pick(F, G, true); }
ScalarField min(const ScalarField& F, const ScalarField& G) { return pick(F, G, false); }

double triangle_wave(double t, double period) {
  const double r = t - period * std::floor(t / period);
  return std::min(r, period - r);
}

MapField angle(const Manifold& torus, double target_radius, int windings) {
  require_torus(torus, "angle");
  const double L = torus.periods()[0];
  const double rate = 2.0 * std::numbers::pi * windings / L;
  const int m = torus.dim();
  return circle_map(
      torus, target_radius, "angle", [rate](const Vec& x) { return rate * x[0]; },
      [rate, m](const Vec&) -> std::optional<Vec> {
        Vec d = Vec::Zero(m);
        d[0] = rate;
        return d;
      },
      std::abs(rate));
}

MapField pwl_wobble(const Manifold& torus, double target_radius, double a, double b) {
  require_torus(torus, "pwl-wobble");
  if (torus.dim() < 2) throw DomainViolation("pwl-wobble: needs a torus of dimension >= 2");
  const double L1 = torus.periods()[0];
  const double L2 = torus.periods()[1];
  const double rate = 2.0 * std::numbers::pi / L1;
  const int m = torus.dim();
  auto slope = [](double t, double period) -> std::optional<double> {
    const double r = t - period * std::floor(t / period);
    if (r < kTie || std::abs(r - period / 2.0) < kTie || period - r < kTie) return std::nullopt;
    return r < period / 2.0 ? 1.0 : -1.0;
  };
  return circle_map(
      torus, target_radius, "pwl-wobble",
      [=](const Vec& x) { return rate * (x[0] + a * triangle_wave(x[0], L1) + b * triangle_wave(x[1], L2)); },
      [=](const Vec& x) -> std::optional<Vec> {
        const auto s1 = slope(x[0], L1);
        const auto s2 = slope(x[1], L2);
        if (!s1 || !s2) return std::nullopt;
        Vec d = Vec::Zero(m);
        d[0] = rate * (1.0 + a * *s1);
        d[1] = rate * b * *s2;
        return d;
      },
      rate * std::hypot(1.0 + std::abs(a), b));
}

std::vector<Point> dist_singular_set(const Manifold& M, const Point& p) {
  std::vector<Point> out{p};
  switch (M.kind()) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::Sphere:
      out.push_back(antipode(M, p));
      break;
    case ManifoldKind::FlatTorus: {
      const int m = M.dim();
      for (int mask = 1; mask < (1 << m); ++mask) {
        Vec x = p.coords;
        for (int i = 0; i < m; ++i) {
          if (mask & (1 << i)) x[i] += M.periods()[i] / 2.0;
        }
        out.push_back(M.point(x));
      }
      break;
    }
  }
  return out;
}

std::vector<std::string> names() {
  return {"dist-to-point", "height", "abs-max", "x2sin", "double-bump", "affine", "angle", "pwl-wobble"};
}

}  // namespace nsmooth::catalog
