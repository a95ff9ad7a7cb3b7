#include "nsmooth/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nsmooth/errors.hpp"
#include "nsmooth/kernels.hpp"
#include "nsmooth/sampling.hpp"

namespace nsmooth {

namespace {

std::vector<double> flatten(const std::vector<Point>& pts) {
  std::vector<double> rows;
  for (const Point& p : pts) rows.insert(rows.end(), p.coords.data(), p.coords.data() + p.coords.size());
  return rows;
}

}  // namespace

VectorMap as_vector_map(const ScalarField& F) {
  VectorMap out{F.manifold, 1, {}, {}, F.lipschitz_hint, F.name};
  auto eval = F.eval;
  out.eval = [eval](const Point& x) {
    Vec v(1);
    v[0] = eval(x);
    return v;
  };
  if (F.gradient) {
    auto grad = F.gradient;
    out.jacobian = [grad](const Point& x) -> std::optional<Mat> {
      auto g = grad(x);
      if (!g) return std::nullopt;
      return Mat(g->transpose());
    };
  }
  return out;
}

std::vector<Point> coverage_grid(const Manifold& M, int grid_points, double box) {
  std::vector<Point> grid;
  const int m = M.dim();
  switch (M.kind()) {
    case ManifoldKind::Sphere: {
      const double R = M.radius();
      if (m == 1) {
        for (int k = 0; k < grid_points; ++k) {
          const double t = 2.0 * std::numbers::pi * (k + 0.5) / grid_points;
          grid.push_back(M.point({R * std::cos(t), R * std::sin(t)}));
        }
      } else if (m == 2) {
        for (const Vec& v : fibonacci_sphere(grid_points)) grid.push_back(M.point(R * v));
      } else {
        HaltonSequence h(m + 1, 3);
        while (static_cast<int>(grid.size()) < grid_points) {
          const Vec v = h.next_in_ball();
          if (v.norm() > 1e-3) grid.push_back(M.point(R * v / v.norm()));
        }
      }
      break;
    }
    case ManifoldKind::FlatTorus:
    case ManifoldKind::Euclidean: {
      const int per = static_cast<int>(std::ceil(std::pow(static_cast<double>(grid_points), 1.0 / m) - 1e-9));
      int total = 1;
      for (int i = 0; i < m; ++i) total *= per;
      for (int idx = 0; idx < total; ++idx) {
        Vec x(m);
        int code = idx;
        for (int i = 0; i < m; ++i) {
          const double frac = (code % per + 0.5) / per;
          code /= per;
          x[i] = M.kind() == ManifoldKind::FlatTorus ? frac * M.periods()[i] : -box + 2.0 * box * frac;
        }
        grid.push_back(M.point(x));
      }
      break;
    }
  }
  return grid;
}

double default_cover_radius(const Manifold& M, double box) {
  return M.compact() ? M.injectivity_radius() / 4.0 : box / 2.0;
}

Cover build_cover(const Manifold& M, double target_r, const CoverOptions& options) {
  if (!(target_r > 0.0) || target_r >= M.injectivity_radius() / 2.0) {
    throw DomainViolation("build_cover: target radius must lie in (0, inj/2)");
  }
  const std::vector<Point> grid = coverage_grid(M, options.grid_points, options.box);
  const std::vector<double> rows = flatten(grid);
  const double reach = options.fill * target_r;
  const double domain = M.compact() ? M.volume() : std::pow(2.0 * options.box, M.dim());
  const int expected = static_cast<int>(std::ceil(domain / ball_volume(M.dim(), reach))) + 1;
  const int cap = 10 * expected;

  Cover cover;
  std::vector<double> nearest(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<double> dist(grid.size());
  std::size_t next = 0;
  for (int it = 0; it < cap; ++it) {
    cover.centers.push_back(grid[next]);
    cover.radii.push_back(target_r);
    batch_distances(M, rows, grid[next], dist);
    for (std::size_t i = 0; i < grid.size(); ++i) nearest[i] = std::min(nearest[i], dist[i]);
    next = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    if (nearest[next] < reach) return cover;
  }
  throw CoverageFailure("build_cover: grid not covered after " + std::to_string(cap) + " centers");
}

double coverage_fraction(const Manifold& M, const Cover& cover, const std::vector<Point>& grid) {
  std::size_t inside = 0;
  for (const Point& q : grid) {
    for (std::size_t i = 0; i < cover.size(); ++i) {
      if (distance(M, cover.centers[i], q) < cover.radii[i]) {
        ++inside;
        break;
      }
    }
  }
  return grid.empty() ? 1.0 : static_cast<double>(inside) / static_cast<double>(grid.size());
}

PartitionOfUnity::PartitionOfUnity(Manifold M, Cover cover)
    : manifold_(std::move(M)), cover_(std::move(cover)), center_rows_(flatten(cover_.centers)) {
  if (cover_.size() == 0) throw DomainViolation("PartitionOfUnity: empty cover");
}

std::vector<PartitionOfUnity::Term> PartitionOfUnity::evaluate(const Point& q, bool with_gradient) const {
  std::vector<double> dist(cover_.size());
  batch_distances(manifold_, center_rows_, q, dist);
  std::vector<Term> terms;
  double total = 0.0;
  for (std::size_t i = 0; i < cover_.size(); ++i) {
    const double r = cover_.radii[i];
    if (dist[i] >= r) continue;
    // batch distances on the sphere go through acos; recompute accurately near the centre.
    const double d = distance(manifold_, cover_.centers[i], q);
    const double s = (d / r) * (d / r);
    const double b = bump(s);
    if (b <= 0.0) continue;
    Term t{static_cast<int>(i), b, Vec()};
    if (with_gradient) {
      // grad b = b * 2 / (r^2 (1 - s)^2) * log_q(p_i)
      const Vec toward = d > 0.0 ? log(manifold_, q, cover_.centers[i]).vec : Vec::Zero(q.coords.size());
      t.gradient = (b * 2.0 / (r * r * (1.0 - s) * (1.0 - s))) * toward;
    }
    total += b;
    terms.push_back(std::move(t));
  }
  // Coverage guarantees a positive denominator everywhere on the manifold.
  if (!(total > 0.0)) throw CoverageFailure("PartitionOfUnity: point outside every cover ball");
  if (with_gradient) {
    Vec grad_total = Vec::Zero(q.coords.size());
    for (const Term& t : terms) grad_total += t.gradient;
    for (Term& t : terms) t.gradient = (t.gradient - (t.weight / total) * grad_total) / total;
  }
  for (Term& t : terms) t.weight /= total;
  return terms;
}

double PartitionOfUnity::weight(int chart, const Point& q) const {
  for (const Term& t : evaluate(q)) {
    if (t.chart == chart) return t.weight;
  }
  return 0.0;
}

MollifierSpec make_mollifier(int m, double eps, const QuadratureSpec& quad) {
  if (!(eps > 0.0)) throw DomainViolation("make_mollifier: eps must be positive");
  MollifierSpec mol;
  mol.dim = m;
  mol.eps = eps;
  if (m <= 4) {
    mol.alpha = mollifier_alpha(m);
    mol.rule = ball_rule(m, eps, quad.radial, quad.angular);
  } else {
    // alpha is irrelevant after the discrete rescaling below.
    mol.alpha = 1.0;
    mol.rule = ball_monte_carlo(m, eps, quad.monte_carlo_points, quad.seed);
  }
  mol.weights.resize(mol.rule.size());
  double mass = 0.0;
  for (std::size_t k = 0; k < mol.rule.size(); ++k) {
    mol.weights[k] = mol.rule.weights[k] * mollifier_density(mol, mol.rule.nodes[k]);
    mass += mol.weights[k];
  }
  mol.raw_mass = mass;
  for (double& w : mol.weights) w /= mass;
  return mol;
}

double mollifier_density(const MollifierSpec& mol, const Vec& y) {
  const double t2 = y.squaredNorm() / (mol.eps * mol.eps);
  return mol.alpha * bump(t2) / std::pow(mol.eps, mol.dim);
}

double lambda_eps(const Manifold& M, const Cover& cover, double eps) {
  const double inj = M.injectivity_radius();
  double reach = 0.0;
  for (double r : cover.radii) {
    if (r + eps >= inj) throw DomainViolation("lambda_eps: r + eps must stay below the injectivity radius");
    reach = std::max(reach, r + eps);
  }
  if (M.kind() != ManifoldKind::Sphere) return 1.0;
  // |d exp_w| has radial factor 1 and tangential factor R sin(|w|/R) / |w|; the
  // tangential factor decreases on (0, pi R), so the supremum is the radial one.
  const double t = reach / M.radius();
  const double tangential = t > 0.0 ? std::sin(t) / t : 1.0;
  return std::max(1.0, tangential);
}

double lambda_eps_sampled(const Manifold& M, const Cover& cover, double eps, int n_pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best = 0.0;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const Point& c = cover.centers[i];
    const double reach = cover.radii[i] + eps;
    const Frame f = frame_at(M, c);
    HaltonSequence h(M.dim(), seed + i);
    for (int k = 0; k < n_pairs; ++k) {
      const Vec u = reach * h.next_in_ball();
      Vec v;
      if (k % 2 == 0) {
        v = reach * h.next_in_ball();
      } else {
        // Nearby pairs probe the local operator norm of d exp.
        const double step = reach * 1e-3 * unit(rng);
        Vec dir = Vec::Zero(M.dim());
        dir[k % M.dim()] = 1.0;
        v = u + step * dir;
        if (v.norm() >= reach) continue;
      }
      const double du = (u - v).norm();
      if (du <= 0.0) continue;
      const double dm = distance(M, exp(M, c, f.vector(u)), exp(M, c, f.vector(v)));
      best = std::max(best, dm / du);
    }
  }
  return best;
}

namespace {

template <class PairQuotient>
LipschitzEstimate sampled_lipschitz(const Manifold& M, int n_pairs, std::uint64_t seed, double box,
                                    PairQuotient quotient) {
  if (n_pairs < 1000) throw DomainViolation("lipschitz_estimate: need at least 1000 pairs");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double scale = M.compact() ? std::min(1.0, M.convexity_radius()) : box;
  LipschitzEstimate est{0.0, true, n_pairs};
  for (int k = 0; k < n_pairs; ++k) {
    const Point x = random_point(M, rng, box);
    Point y;
    if (k % 2 == 0) {
      y = random_point(M, rng, box);
    } else {
      // Short pairs, log-uniform lengths in [1e-4, 1e-1] * scale.
      const double len = scale * std::pow(10.0, -4.0 + 3.0 * unit(rng));
      y = exp(M, x, len * random_unit_tangent(M, x, rng));
    }
    const double d = distance(M, x, y);
    if (d <= 1e-12) continue;
    est.value = std::max(est.value, quotient(x, y) / d);
  }
  return est;
}

}  // namespace

LipschitzEstimate lipschitz_estimate(const ScalarField& F, int n_pairs, std::uint64_t seed, double box) {
  return sampled_lipschitz(F.manifold, n_pairs, seed, box,
                           [&](const Point& x, const Point& y) { return std::abs(F.eval(x) - F.eval(y)); });
}

LipschitzEstimate lipschitz_estimate(const MapField& F, int n_pairs, std::uint64_t seed, double box) {
  return sampled_lipschitz(F.source, n_pairs, seed, box, [&](const Point& x, const Point& y) {
    return distance(F.target, F.eval(x), F.eval(y));
  });
}

SmoothedMap::SmoothedMap(VectorMap base, Cover cover, double eps, const QuadratureSpec& quad)
    : base_(std::move(base)), partition_(base_.source, cover), eps_(eps) {
  const Manifold& M = base_.source;
  const double inj = M.injectivity_radius();
  if (!(eps > 0.0) || eps >= inj / 2.0) throw DomainViolation("SmoothedMap: eps must lie in (0, inj/2)");
  lambda_ = lambda_eps(M, cover, eps);
  if (eps >= inj / (2.0 * lambda_ * 1.01)) {
    throw DomainViolation("SmoothedMap: eps * Lambda(eps) must stay below inj/2 with 1% margin");
  }
  mollifier_ = make_mollifier(M.dim(), eps, quad);
  for (const Point& c : cover.centers) frames_.push_back(frame_at(M, c));
}

Vec SmoothedMap::local(int chart, const Point& q) const {
  const Manifold& M = manifold();
  const Point& c = cover().centers[chart];
  if (distance(M, c, q) >= cover().radii[chart]) throw DomainViolation("local_smooth: q outside the chart ball");
  const Vec w0 = log(M, c, q).vec;
  const Frame& f = frames_[chart];
  const int width = base_.out_dim;
  const std::size_t n = mollifier_.rule.size();
  std::vector<double> values(n * width);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec v = base_.eval(exp(M, c, w0 - f.vector(mollifier_.rule.nodes[k])));
    for (int j = 0; j < width; ++j) values[k * width + j] = v[j];
  }
  Vec out(width);
  kernels::weighted_rows(mollifier_.weights, values, width, std::span<double>(out.data(), width));
  return out;
}

Vec SmoothedMap::value(const Point& q) const {
  Vec out = Vec::Zero(base_.out_dim);
  for (const auto& t : partition_.evaluate(q)) out += t.weight * local(t.chart, q);
  return out;
}

Vec SmoothedMap::derivative_at(const Point& x, const Vec& J) const {
  if (base_.jacobian) {
    if (auto D = base_.jacobian(x)) return (*D) * J;
  }
  const Manifold& M = manifold();
  const double h = 1e-6 * (1.0 + x.coords.norm());
  return (base_.eval(exp(M, x, h * J)) - base_.eval(exp(M, x, -h * J))) / (2.0 * h);
}

Mat SmoothedMap::local_jacobian(int chart, const Point& q, const Frame& fq) const {
  const Manifold& M = manifold();
  const Point& c = cover().centers[chart];
  const Vec w0 = log(M, c, q).vec;
  const Frame& f = frames_[chart];
  const int m = M.dim();
  const int width = base_.out_dim;
  std::vector<Vec> W(m);
  for (int j = 0; j < m; ++j) W[j] = dlog(M, c, q, fq.basis.col(j));

  const std::size_t n = mollifier_.rule.size();
  std::vector<double> rows(n * width * m);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec w = w0 - f.vector(mollifier_.rule.nodes[k]);
    const Point x = exp(M, c, w);
    for (int j = 0; j < m; ++j) {
      const Vec J = dexp(M, c, w, W[j]);
      const Vec d = derivative_at(x, J);
      for (int i = 0; i < width; ++i) rows[k * width * m + i * m + j] = d[i];
    }
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxCoords, kMaxCoords> out(width, m);
  kernels::weighted_rows(mollifier_.weights, rows, static_cast<std::size_t>(width * m),
                         std::span<double>(out.data(), static_cast<std::size_t>(width * m)));
  return out;
}

Mat SmoothedMap::jacobian(const Point& q) const {
  const Frame fq = frame_at(manifold(), q);
  Mat out = Mat::Zero(base_.out_dim, manifold().dim());
  for (const auto& t : partition_.evaluate(q, true)) {
    const Vec local_value = local(t.chart, q);
    out += local_value * fq.components(t.gradient).transpose();
    out += t.weight * local_jacobian(t.chart, q, fq);
  }
  return out;
}

Mat SmoothedMap::jacobian_fd(const Point& q, double h) const {
  const Manifold& M = manifold();
  const Frame fq = frame_at(M, q);
  Mat out(base_.out_dim, M.dim());
  for (int j = 0; j < M.dim(); ++j) {
    const Vec e = fq.basis.col(j);
    out.col(j) = (value(exp(M, q, h * e)) - value(exp(M, q, -h * e))) / (2.0 * h);
  }
  return out;
}

Vec SmoothedMap::gradient(const Point& q) const {
  const Frame fq = frame_at(manifold(), q);
  const Mat J = jacobian(q);
  return fq.vector(J.row(0).transpose());
}

Vec local_smooth(const VectorMap& F, const Point& center, double eps, const Point& q, const QuadratureSpec& quad) {
  const Manifold& M = F.source;
  const double inj = M.injectivity_radius();
  const double d = distance(M, center, q);
  if (!(eps > 0.0) || eps >= inj / 2.0 || d + eps >= inj) {
    throw DomainViolation("local_smooth: need eps < inj/2 and d(center, q) + eps < inj");
  }
  const MollifierSpec mol = make_mollifier(M.dim(), eps, quad);
  const Vec w0 = log(M, center, q).vec;
  const Frame f = frame_at(M, center);
  Vec out = Vec::Zero(F.out_dim);
  for (std::size_t k = 0; k < mol.rule.size(); ++k) {
    out += mol.weights[k] * F.eval(exp(M, center, w0 - f.vector(mol.rule.nodes[k])));
  }
  return out;
}

}  // namespace nsmooth
