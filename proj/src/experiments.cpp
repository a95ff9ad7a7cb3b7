#include "nsmooth/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nsmooth/catalog.hpp"
#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

constexpr double kSamePoint = 1e-12;

Cover make_cover(const Manifold& M, const SmoothingSetup& setup) {
  const double r = setup.cover_radius > 0.0 ? setup.cover_radius : default_cover_radius(M, setup.box);
  CoverOptions opts;
  opts.box = setup.box;
  return build_cover(M, r, opts);
}

int nearest(const Manifold& M, const std::vector<Point>& pts, const Point& q, double& dist) {
  int best = -1;
  dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = distance(M, pts[i], q);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double distance_to_set(const Manifold& M, const std::vector<Point>& set, const Point& q) {
  double d = std::numeric_limits<double>::infinity();
  nearest(M, set, q, d);
  return d;
}

}  // namespace

ScanReport equivalence_scan(const Manifold& M, const Point& p, const Grid& grid, const ClarkeParams& params) {
  const ScalarField F = catalog::dist_to_point(M, p);
  const double r0 = params.r0 > 0.0 ? params.r0 : default_r0(M);
  ScanReport rep;
  rep.field = F.name;
  rep.grid = grid.name;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point& q = grid.points[i];
    ScanPoint sp{q, {}, std::nullopt, false, true, 0};
    try {
      sp.clarke = is_singular_scalar(F, q, params);
    } catch (const InsufficientSamples&) {
      sp.clarke.singular = true;
      sp.indeterminate = true;
    }
    const double d = distance(M, p, q);
    if (d < kSamePoint) {
      sp.agree = sp.clarke.singular;
    } else {
      sp.gs = gs_critical(M, p, q, params);
      const MinimalGeodesics tight = minimal_geodesics(M, p, q, params.geodesic_cap);
      sp.geodesics = static_cast<int>(tight.initial.size());
      if (d < 2.0 * r0) sp.indeterminate = true;
      if (M.kind() == ManifoldKind::FlatTorus) {
        const MinimalGeodesics loose = minimal_geodesics(M, p, q, params.geodesic_cap, 2.0 * r0);
        if (loose.initial.size() != tight.initial.size()) sp.indeterminate = true;
      }
      if (M.kind() == ManifoldKind::Sphere && !tight.continuum && M.injectivity_radius() - d < 2.0 * r0) {
        sp.indeterminate = true;
      }
      sp.agree = sp.clarke.singular == sp.gs->singular;
    }
    if (sp.indeterminate) {
      ++rep.indeterminate;
    } else if (!sp.agree) {
      rep.disagreements.push_back(static_cast<int>(i));
    }
    rep.clarke_singular += sp.clarke.singular ? 1 : 0;
    rep.gs_singular += (sp.gs ? sp.gs->singular : true) ? 1 : 0;
    rep.points.push_back(std::move(sp));
  }

  const std::vector<Point> truth = catalog::dist_singular_set(M, p);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    double d = 0.0;
    const int j = nearest(M, grid.points, truth[t], d);
    if (j < 0 || d > grid.spacing || !rep.points[j].clarke.singular) rep.missed.push_back(static_cast<int>(t));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!rep.points[i].clarke.singular) continue;
    if (distance_to_set(M, truth, grid.points[i]) > grid.spacing) rep.spurious.push_back(static_cast<int>(i));
  }
  rep.recovered = rep.missed.empty() && rep.spurious.empty();
  return rep;
}

SingularScan singular_scan(const ScalarField& F, const Grid& grid, const ClarkeParams& params) {
  SingularScan out;
  out.verdicts.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SingularityVerdict v;
    try {
      v = is_singular_scalar(F, grid.points[i], params);
    } catch (const InsufficientSamples&) {
      v.singular = true;
      out.failed.push_back(static_cast<int>(i));
    }
    if (v.singular) out.singular.push_back(static_cast<int>(i));
    out.verdicts.push_back(std::move(v));
  }
  out.clusters = components(grid.neighbors, out.singular);
  return out;
}

NonvanishingReport nonvanishing_scan(const ScalarField& F, const std::vector<Point>& region,
                                     const NonvanishingOptions& options) {
  const Manifold& M = F.manifold;
  NonvanishingReport rep;
  rep.tol = options.tol;
  rep.slack = options.slack;
  const MapField as_field = as_map(F);
  for (const Point& q : region) rep.delta.push_back(is_singular_map(as_field, q, options.params).margin);

  const Cover cover = make_cover(M, options.setup);
  const VectorMap base = as_vector_map(F);
  for (double eps : options.ladder) {
    NonvanishingRung rung;
    rung.eps = eps;
    try {
      const SmoothedMap S(base, cover, eps, options.setup.quadrature);
      rung.min_grad = std::numeric_limits<double>::infinity();
      rung.worst_third_margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < region.size(); ++i) {
        const double g = S.jacobian(region[i]).norm();
        if (g < rung.min_grad) {
          rung.min_grad = g;
          rung.argmin = static_cast<int>(i);
        }
        rung.worst_third_margin = std::min(rung.worst_third_margin, g - rep.delta[i] / 3.0);
      }
      rung.positive = rung.min_grad > options.tol;
      rung.third_margin_ok = rung.worst_third_margin >= -options.slack;
    } catch (const DomainViolation&) {
      rung.min_grad = 0.0;
      rung.worst_third_margin = 0.0;
    }
    rep.rungs.push_back(rung);
  }

  std::vector<NonvanishingRung> sorted = rep.rungs;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eps < b.eps; });
  for (const NonvanishingRung& r : sorted) {
    if (!r.positive) break;
    rep.threshold_eps = r.eps;
  }
  return rep;
}

std::vector<ErrorRow> error_table(const VectorMap& F, double lipschitz, const std::vector<Point>& grid,
                                  const std::vector<double>& ladder, const SmoothingSetup& setup, double rel_slack) {
  const Cover cover = make_cover(F.source, setup);
  std::vector<Vec> exact;
  exact.reserve(grid.size());
  for (const Point& q : grid) exact.push_back(F.eval(q));
  std::vector<ErrorRow> rows;
  for (double eps : ladder) {
    const SmoothedMap S(F, cover, eps, setup.quadrature);
    ErrorRow row;
    row.eps = eps;
    row.lambda = S.lambda();
    row.lipschitz = lipschitz;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      row.max_error = std::max(row.max_error, (S.value(grid[i]) - exact[i]).norm());
    }
    row.bound = smoothing_error_bound(eps, row.lambda, lipschitz);
    row.ok = row.max_error <= row.bound * (1.0 + rel_slack);
    rows.push_back(row);
  }
  return rows;
}

ReebReport evaluate_reeb(const ScalarField& F, const Grid& grid, const ReebOptions& options) {
  const Manifold& M = F.manifold;
  std::vector<double> values;
  values.reserve(grid.size());
  for (const Point& q : grid.points) values.push_back(F.eval(q));
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double fmin = *lo_it;
  const double fmax = *hi_it;
  if (!(fmin < options.b1 && options.b1 < options.c && options.c < options.b2 && options.b2 < fmax)) {
    throw DomainViolation("reeb_check: need min F < b1 < c < b2 < max F on the grid");
  }

  ReebReport rep;
  rep.steps.assign(4, false);
  auto fail = [&rep](int step, const std::string& why) {
    if (rep.failed_step == 0) {
      rep.failed_step = step;
      rep.failure = why;
    }
  };

  // (1) singular clusters
  rep.scan = singular_scan(F, grid, options.params);
  rep.clusters = static_cast<int>(rep.scan.clusters.size());
  rep.steps[0] = rep.clusters == 2;
  if (!rep.steps[0]) fail(1, "expected 2 singular clusters, found " + std::to_string(rep.clusters));

  // (2) level set connectivity
  rep.lipschitz = lipschitz_estimate(F, options.lipschitz_pairs, options.params.seed, options.setup.box).value;
  rep.level_tol = 2.0 * rep.lipschitz * grid.spacing;
  rep.graph_radius = 2.5 * grid.spacing;
  std::vector<Point> level;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(values[i] - options.c) < rep.level_tol) level.push_back(grid.points[i]);
  }
  rep.level_samples = static_cast<int>(level.size());
  if (!level.empty()) {
    const auto adj = radius_graph(M, level, rep.graph_radius);
    std::vector<int> all(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) all[i] = static_cast<int>(i);
    rep.level_components = static_cast<int>(components(adj, all).size());
    rep.min_degree = static_cast<int>(level.size());
    for (const auto& nb : adj) rep.min_degree = std::min(rep.min_degree, static_cast<int>(nb.size()));
  }
  rep.steps[1] = rep.level_samples > 0 && rep.level_components == 1 && (M.dim() != 2 || rep.min_degree >= 2);
  if (!rep.steps[1]) {
    fail(2, "level set at c has " + std::to_string(rep.level_components) + " components over " +
                std::to_string(rep.level_samples) + " samples, min degree " + std::to_string(rep.min_degree));
  }

  // (3) nonvanishing smoothed gradient on the band
  const SmoothedMap S(as_vector_map(F), make_cover(M, options.setup), options.eps, options.setup.quadrature);
  rep.band_tol = options.params.tol_sing * std::max(1.0, rep.lipschitz);
  rep.band_min_grad = std::numeric_limits<double>::infinity();
  for (const Point& q : grid.points) {
    const double v = S.scalar(q);
    if (v < options.b1 || v > options.b2) continue;
    ++rep.band_samples;
    rep.band_min_grad = std::min(rep.band_min_grad, S.jacobian(q).norm());
  }
  if (rep.band_samples == 0) rep.band_min_grad = 0.0;
  rep.steps[2] = rep.band_samples > 0 && rep.band_min_grad > rep.band_tol;
  if (!rep.steps[2]) fail(3, "smoothed gradient on the band drops to " + std::to_string(rep.band_min_grad));

  // (4) shrinking levels localize at the singular clusters
  std::vector<Point> singular_points;
  for (int i : rep.scan.singular) singular_points.push_back(grid.points[i]);
  rep.localize_radius = M.injectivity_radius() / 4.0;
  auto level_at = [&](double kappa) {
    ReebLevel L{kappa, 0, 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(values[i] - kappa) >= rep.level_tol) continue;
      ++L.samples;
      L.max_cluster_distance = std::max(L.max_cluster_distance, distance_to_set(M, singular_points, grid.points[i]));
    }
    return L;
  };
  bool localized = !singular_points.empty();
  for (const bool low : {true, false}) {
    std::vector<ReebLevel>& levels = low ? rep.low_levels : rep.high_levels;
    for (double t : options.shrink) levels.push_back(level_at(low ? fmin + t * (fmax - fmin) : fmax - t * (fmax - fmin)));
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (levels[k].samples == 0) localized = false;
      if (k > 0 && levels[k].max_cluster_distance > levels[k - 1].max_cluster_distance + 1e-12) localized = false;
    }
    if (levels.empty() || !(levels.back().max_cluster_distance < rep.localize_radius)) localized = false;
  }
  rep.steps[3] = localized;
  if (!rep.steps[3]) fail(4, "shrinking levels do not concentrate at the singular clusters");

  rep.passed = rep.failed_step == 0;
  return rep;
}

ReebReport reeb_check(const ScalarField& F, const Grid& grid, const ReebOptions& options) {
  ReebReport rep = evaluate_reeb(F, grid, options);
  if (!rep.passed) throw HypothesisFailure(rep.failed_step, "reeb step " + std::to_string(rep.failed_step) + ": " + rep.failure);
  return rep;
}

}  // namespace nsmooth
