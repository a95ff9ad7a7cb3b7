#include "nsmooth/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nsmooth/fibration.hpp"
#include "nsmooth/hull.hpp"
#include "nsmooth/kernels.hpp"
#include "nsmooth/quadrature.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth::cli {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json eigen_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json point_json(const Point& p) { return vec_json(p.coords); }

Json verdict_json(const SingularityVerdict& v) {
  Json j;
  j["singular"] = v.singular;
  j["margin"] = v.margin;
  j["threshold"] = v.threshold;
  j["samples_used"] = v.samples_used;
  j["radii_used"] = v.radii_used;
  return j;
}

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : "nan"; }

/// The field as a map into Euclidean space: itself for scalars, embed o F for maps.
VectorMap vector_map(const RunConfig& cfg) {
  if (cfg.scalar) return as_vector_map(*cfg.scalar);
  return embedded_map(*cfg.map, embedding(cfg.map->target));
}

MapField map_field(const RunConfig& cfg) { return cfg.map ? *cfg.map : as_map(*cfg.scalar); }

SingularityVerdict verdict_at(const RunConfig& cfg, const Point& q) {
  return cfg.scalar ? is_singular_scalar(*cfg.scalar, q, cfg.clarke) : is_singular_map(*cfg.map, q, cfg.clarke);
}

struct CsvColumns {
  std::vector<Point> points;
  double eps = 0.0;
  std::vector<std::optional<SingularityVerdict>> verdicts;
  std::vector<std::string> labels;
};

Cover run_cover(const RunConfig& cfg) {
  const Manifold& M = *cfg.manifold;
  const double r = cfg.smoothing.cover_radius > 0.0 ? cfg.smoothing.cover_radius : default_cover_radius(M, cfg.smoothing.box);
  CoverOptions opts;
  opts.box = cfg.smoothing.box;
  return build_cover(M, r, opts);
}

/// One row per point: coordinates, F, the smoothing at `eps`, |dF~_eps|, margin, verdict.
std::string make_csv(const RunConfig& cfg, CsvColumns cols) {
  const Manifold& M = *cfg.manifold;
  const VectorMap F = vector_map(cfg);
  std::optional<SmoothedMap> S;
  try {
    S.emplace(F, run_cover(cfg), cols.eps, cfg.smoothing.quadrature);
  } catch (const DomainViolation&) {
  }
  std::ostringstream out;
  out << "index";
  for (int i = 0; i < M.coord_dim(); ++i) out << ",x" << i;
  if (F.out_dim == 1) {
    out << ",F,F_smooth";
  } else {
    for (int i = 0; i < F.out_dim; ++i) out << ",F_" << i;
    for (int i = 0; i < F.out_dim; ++i) out << ",F_smooth_" << i;
  }
  out << ",grad_norm,margin,verdict\n";
  for (std::size_t k = 0; k < cols.points.size(); ++k) {
    const Point& q = cols.points[k];
    out << k;
    for (int i = 0; i < M.coord_dim(); ++i) out << "," << csv_number(q.coords[i]);
    const Vec f = F.eval(q);
    for (int i = 0; i < F.out_dim; ++i) out << "," << csv_number(f[i]);
    bool smoothed = false;
    if (S) {
      try {
        const Vec s = S->value(q);
        const double g = S->jacobian(q).norm();
        for (int i = 0; i < F.out_dim; ++i) out << "," << csv_number(s[i]);
        out << "," << csv_number(g);
        smoothed = true;
      } catch (const Error&) {
      }
    }
    if (!smoothed) {
      for (int i = 0; i <= F.out_dim; ++i) out << ",nan";
    }
    std::optional<SingularityVerdict> v = k < cols.verdicts.size() ? cols.verdicts[k] : std::nullopt;
    std::string label = k < cols.labels.size() ? cols.labels[k] : "";
    if (!v && label.empty()) {
      try {
        v = verdict_at(cfg, q);
      } catch (const Error&) {
        label = "failed";
      }
    }
    out << "," << (v ? csv_number(v->margin) : "nan");
    if (label.empty()) label = v->singular ? "singular" : "nonsingular";
    out << "," << label << "\n";
  }
  return out.str();
}

Json settings_json(const RunConfig& cfg) {
  const Manifold& M = *cfg.manifold;
  Json s;
  s["seed"] = cfg.seed;
  s["manifold"] = M.name();
  s["injectivity_radius"] = M.injectivity_radius();
  s["convexity_radius"] = M.convexity_radius();
  Json c;
  c["samples_per_radius"] = cfg.clarke.samples_per_radius;
  c["rungs"] = cfg.clarke.rungs;
  c["r0"] = cfg.clarke.r0 > 0.0 ? cfg.clarke.r0 : default_r0(M);
  c["tol_sing"] = cfg.clarke.tol_sing;
  c["kink_ratio"] = cfg.clarke.kink_ratio;
  c["direction_count"] = cfg.clarke.direction_count;
  s["clarke"] = c;
  Json q;
  q["radial"] = cfg.smoothing.quadrature.radial;
  q["angular"] = cfg.smoothing.quadrature.angular;
  q["monte_carlo_points"] = cfg.smoothing.quadrature.monte_carlo_points;
  q["cover_radius"] =
      cfg.smoothing.cover_radius > 0.0 ? cfg.smoothing.cover_radius : default_cover_radius(M, cfg.smoothing.box);
  q["box"] = cfg.smoothing.box;
  s["smoothing"] = q;
  Json g;
  g["name"] = cfg.grid->name;
  g["size"] = cfg.grid->size();
  g["spacing"] = cfg.grid->spacing;
  s["grid"] = g;
  s["epsilon_ladder"] = cfg.ladder;
  return s;
}

double smallest(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

void require_scalar(const RunConfig& cfg, const std::string& who) {
  if (!cfg.scalar) throw ConfigError("field", who + " needs a scalar field");
}

// Smoothing preconditions checked up front so bad rungs surface as config errors.
void check_eps(const RunConfig& cfg, double eps, const std::string& path) {
  try {
    SmoothedMap(vector_map(cfg), run_cover(cfg), eps, cfg.smoothing.quadrature);
  } catch (const DomainViolation& e) {
    throw ConfigError(path, e.what());
  }
}

RunResult do_probe(const RunConfig& cfg) {
  if (cfg.probe_points.empty()) throw ConfigError("probe.points", "is required for probe");
  const Manifold& M = *cfg.manifold;
  RunResult res;
  Json points = Json::array();
  CsvColumns cols;
  cols.eps = smallest(cfg.ladder);
  for (const Point& q : cfg.probe_points) {
    Json j;
    j["point"] = point_json(q);
    SingularityVerdict v;
    if (cfg.scalar) {
      const GradientEstimate g = generalized_gradient(*cfg.scalar, q, cfg.clarke);
      Json h;
      h["samples"] = g.hull.size();
      h["drawn"] = g.drawn;
      h["discarded"] = g.discarded;
      h["lower"] = eigen_json(g.hull.lower());
      h["upper"] = eigen_json(g.hull.upper());
      h["diameter"] = g.hull.diameter();
      h["radii"] = g.radii;
      j["generalized_gradient"] = h;
      v = is_singular_scalar(*cfg.scalar, q, cfg.clarke);
      if (cfg.base_point) {
        if (distance(M, *cfg.base_point, q) > 0.0) {
          j["grove_shiohama"] = verdict_json(gs_critical(M, *cfg.base_point, q, cfg.clarke));
        } else {
          j["grove_shiohama"] = "base point: singular by definition";
        }
      }
    } else {
      v = is_singular_map(*cfg.map, q, cfg.clarke);
    }
    j["clarke"] = verdict_json(v);
    points.push_back(j);
    cols.points.push_back(q);
    cols.verdicts.push_back(v);
  }
  res.report["points"] = points;
  res.report["csv_eps"] = cols.eps;
  res.csv = make_csv(cfg, cols);
  return res;
}

RunResult do_scan(const RunConfig& cfg) {
  if (!cfg.base_point) throw ConfigError("field.name", "scan needs the dist-to-point field");
  const Manifold& M = *cfg.manifold;
  const ScanReport rep = equivalence_scan(M, *cfg.base_point, *cfg.grid, cfg.clarke);
  RunResult res;
  Json r;
  r["field"] = rep.field;
  r["base_point"] = point_json(*cfg.base_point);
  r["grid"] = rep.grid;
  r["grid_size"] = rep.points.size();
  r["clarke_singular"] = rep.clarke_singular;
  r["gs_singular"] = rep.gs_singular;
  r["indeterminate"] = rep.indeterminate;
  r["disagreements"] = rep.disagreements;
  r["missed_singular"] = rep.missed;
  r["spurious_singular"] = rep.spurious;
  r["recovered"] = rep.recovered;
  Json singular = Json::array();
  for (const Point& p : catalog::dist_singular_set(M, *cfg.base_point)) singular.push_back(point_json(p));
  r["analytic_singular_set"] = singular;
  Json pts = Json::array();
  CsvColumns cols;
  cols.eps = smallest(cfg.ladder);
  for (const ScanPoint& sp : rep.points) {
    Json j;
    j["clarke_singular"] = sp.clarke.singular;
    j["clarke_margin"] = sp.clarke.margin;
    j["gs_singular"] = sp.gs ? sp.gs->singular : true;
    j["gs_margin"] = sp.gs ? sp.gs->margin : 0.0;
    j["geodesics"] = sp.geodesics;
    j["indeterminate"] = sp.indeterminate;
    pts.push_back(j);
    cols.points.push_back(sp.q);
    cols.verdicts.push_back(sp.clarke);
    cols.labels.push_back(sp.indeterminate ? "indeterminate" : "");
  }
  r["points"] = pts;
  r["csv_eps"] = cols.eps;
  res.report = r;
  res.csv = make_csv(cfg, cols);
  res.exit_code = rep.disagreements.empty() && rep.recovered ? kOk : kHypothesisFailure;
  return res;
}

RunResult do_smooth(const RunConfig& cfg) {
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) check_eps(cfg, cfg.ladder[i], "epsilon_ladder[" + std::to_string(i) + "]");
  const VectorMap F = vector_map(cfg);
  const LipschitzEstimate lip = cfg.scalar ? lipschitz_estimate(*cfg.scalar, cfg.smooth.lipschitz_pairs, cfg.seed, cfg.smoothing.box)
                                           : lipschitz_estimate(*cfg.map, cfg.smooth.lipschitz_pairs, cfg.seed, cfg.smoothing.box);
  const std::vector<ErrorRow> rows = error_table(F, lip.value, cfg.grid->points, cfg.ladder, cfg.smoothing);
  RunResult res;
  Json r;
  r["lipschitz_estimate"] = lip.value;
  r["lipschitz_lower_bound"] = lip.lower_bound;
  r["lipschitz_pairs"] = lip.pairs;
  r["relative_slack"] = 1e-3;
  Json table = Json::array();
  bool ok = true;
  for (const ErrorRow& row : rows) {
    Json j;
    j["eps"] = row.eps;
    j["lambda"] = row.lambda;
    j["max_error"] = row.max_error;
    j["bound"] = row.bound;
    j["ok"] = row.ok;
    table.push_back(j);
    ok = ok && row.ok;
  }
  r["error_table"] = table;
  if (cfg.smooth.region) {
    require_scalar(cfg, "smooth.region");
    std::vector<Point> region;
    for (const Point& q : cfg.grid->points) {
      const double x = q.coords[cfg.smooth.region->coordinate];
      if (x >= cfg.smooth.region->min && x <= cfg.smooth.region->max) region.push_back(q);
    }
    NonvanishingOptions opts;
    opts.ladder = cfg.ladder;
    opts.setup = cfg.smoothing;
    opts.params = cfg.clarke;
    opts.slack = cfg.smooth.slack;
    const NonvanishingReport nv = nonvanishing_scan(*cfg.scalar, region, opts);
    Json n;
    n["region_size"] = region.size();
    n["threshold_eps"] = nv.threshold_eps;
    n["tol"] = nv.tol;
    n["slack"] = nv.slack;
    Json rungs = Json::array();
    for (const NonvanishingRung& rung : nv.rungs) {
      Json j;
      j["eps"] = rung.eps;
      j["min_grad"] = rung.min_grad;
      j["positive"] = rung.positive;
      j["worst_third_margin"] = rung.worst_third_margin;
      j["third_margin_ok"] = rung.third_margin_ok;
      rungs.push_back(j);
    }
    n["rungs"] = rungs;
    r["nonvanishing"] = n;
  }
  CsvColumns cols;
  cols.points = cfg.grid->points;
  cols.eps = smallest(cfg.ladder);
  r["csv_eps"] = cols.eps;
  res.report = r;
  res.csv = make_csv(cfg, cols);
  res.exit_code = ok ? kOk : kHypothesisFailure;
  return res;
}

Json fibration_json(const FibrationReport& f) {
  Json j;
  j["eps"] = f.eps;
  j["eta"] = f.eta;
  j["min_sigma"] = f.min_sigma;
  j["max_dist"] = f.max_dist;
  j["transversal"] = f.transversal;
  j["grid_size"] = f.grid_size;
  j["max_tube_distance"] = f.max_tube_distance;
  j["tube_radius"] = f.tube_radius;
  j["sigma_tol"] = f.sigma_tol;
  return j;
}

RunResult do_fibrate(const RunConfig& cfg) {
  const MapField F = map_field(cfg);
  const EmbeddingSpec E = embedding(F.target);
  EtaSearchOptions opts;
  opts.ladder = cfg.ladder;
  opts.sigma_tol = cfg.fibrate.sigma_tol;
  opts.cover_radius = cfg.smoothing.cover_radius;
  opts.quadrature = cfg.smoothing.quadrature;
  opts.full_ladder = cfg.fibrate.full_ladder;
  const EtaSearchResult s = eta_search(F, E, cfg.fibrate.eta, cfg.grid->points, opts);
  RunResult res;
  Json r;
  r["target"] = F.target.name();
  r["ambient_dim"] = E.ambient_dim();
  r["tube_radius"] = E.tube_radius();
  r["eta"] = cfg.fibrate.eta;
  r["accepted"] = s.accepted;
  r["eps_accepted"] = s.accepted ? Json(s.eps_accepted) : Json(nullptr);
  r["report"] = s.report ? fibration_json(*s.report) : Json(nullptr);
  Json rungs = Json::array();
  for (const EtaRung& rung : s.rungs) {
    Json j;
    j["eps"] = rung.eps;
    j["status"] = rung.status;
    if (rung.report) j["report"] = fibration_json(*rung.report);
    if (!rung.detail.empty()) j["detail"] = rung.detail;
    rungs.push_back(j);
  }
  r["rungs"] = rungs;
  r["surjectivity"] = "by construction: compact source, connected target, submersion certificate";
  r["properness"] = "by construction: compact source";
  CsvColumns cols;
  cols.points = cfg.grid->points;
  cols.eps = s.report ? s.report->eps : smallest(cfg.ladder);
  r["csv_eps"] = cols.eps;
  res.report = r;
  res.csv = make_csv(cfg, cols);
  res.exit_code = s.accepted ? kOk : kHypothesisFailure;
  return res;
}

Json levels_json(const std::vector<ReebLevel>& levels) {
  Json a = Json::array();
  for (const ReebLevel& l : levels) {
    Json j;
    j["kappa"] = l.kappa;
    j["samples"] = l.samples;
    j["max_cluster_distance"] = l.max_cluster_distance;
    a.push_back(j);
  }
  return a;
}

RunResult do_reeb(const RunConfig& cfg) {
  require_scalar(cfg, "reeb");
  if (!cfg.raw.contains("reeb")) throw ConfigError("reeb", "is required for the reeb subcommand");
  check_eps(cfg, cfg.reeb.eps, "reeb.eps");
  ReebOptions opts;
  opts.c = cfg.reeb.c;
  opts.b1 = cfg.reeb.b1;
  opts.b2 = cfg.reeb.b2;
  opts.eps = cfg.reeb.eps;
  opts.setup = cfg.smoothing;
  opts.params = cfg.clarke;
  opts.lipschitz_pairs = cfg.reeb.lipschitz_pairs;
  opts.shrink = cfg.reeb.shrink;
  ReebReport rep;
  try {
    rep = evaluate_reeb(*cfg.scalar, *cfg.grid, opts);
  } catch (const DomainViolation& e) {
    throw ConfigError("reeb", e.what());
  }
  RunResult res;
  Json r;
  r["passed"] = rep.passed;
  r["failed_step"] = rep.failed_step;
  if (!rep.passed) r["failure"] = rep.failure;
  r["steps"] = rep.steps;
  r["clusters"] = rep.clusters;
  Json cl = Json::array();
  for (const auto& c : rep.scan.clusters) cl.push_back(c);
  r["cluster_members"] = cl;
  r["lipschitz_estimate"] = rep.lipschitz;
  r["level_tol"] = rep.level_tol;
  r["graph_radius"] = rep.graph_radius;
  r["level_samples"] = rep.level_samples;
  r["level_components"] = rep.level_components;
  r["level_min_degree"] = rep.min_degree;
  r["connectivity_note"] = "sampling connectivity is a necessary condition only";
  r["band"] = {opts.b1, opts.b2};
  r["band_samples"] = rep.band_samples;
  r["band_min_grad"] = rep.band_min_grad;
  r["band_tol"] = rep.band_tol;
  r["low_levels"] = levels_json(rep.low_levels);
  r["high_levels"] = levels_json(rep.high_levels);
  r["localize_radius"] = rep.localize_radius;
  CsvColumns cols;
  cols.points = cfg.grid->points;
  cols.eps = opts.eps;
  for (std::size_t i = 0; i < rep.scan.verdicts.size(); ++i) cols.verdicts.push_back(rep.scan.verdicts[i]);
  for (int i : rep.scan.failed) {
    cols.labels.resize(cols.points.size());
    cols.labels[i] = "failed";
  }
  r["csv_eps"] = cols.eps;
  res.report = r;
  res.csv = make_csv(cfg, cols);
  res.exit_code = rep.passed ? kOk : kHypothesisFailure;
  return res;
}

// ---- selftest ----

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

double ball_monomial(const std::vector<int>& alpha, double eps) {
  int total = 0;
  double num = 1.0;
  for (int a : alpha) {
    if (a % 2) return 0.0;
    total += a;
    num *= std::tgamma((a + 1) / 2.0);
  }
  const int m = static_cast<int>(alpha.size());
  return 2.0 * num / std::tgamma((total + m) / 2.0) * std::pow(eps, total + m) / (total + m);
}

std::vector<Check> selftest_checks(const RunConfig& cfg) {
  const Manifold& M = *cfg.manifold;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Check> out;
  auto add = [&](std::string name, double value, double tol, std::string note = {}) {
    out.push_back({std::move(name), value, tol, value <= tol, std::move(note)});
  };
  const double inj = M.injectivity_radius();
  const double reach = std::isfinite(inj) ? 0.9 * inj : 5.0;

  double exp_log = 0.0, dist = 0.0, gram = 0.0, jac = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Point p = random_point(M, rng, cfg.smoothing.box);
    const Vec v = reach * unit(rng) * random_unit_tangent(M, p, rng);
    const Point q = exp(M, p, v);
    exp_log = std::max(exp_log, (log(M, p, q).vec - v).norm() / (1.0 + v.norm()));
    dist = std::max(dist, std::abs(distance(M, p, q) - v.norm()));
    if (k < 100) {
      const Frame f = frame_at(M, p);
      Mat moved(M.coord_dim(), M.dim());
      for (int j = 0; j < M.dim(); ++j) moved.col(j) = parallel_transport(M, p, q, f.basis.col(j)).vec;
      gram = std::max(gram, (moved.transpose() * moved - Mat::Identity(M.dim(), M.dim())).cwiseAbs().maxCoeff());
      const double budget = (std::isfinite(inj) ? inj : 10.0) * 0.45;
      const Point qq = exp(M, p, budget * unit(rng) * random_unit_tangent(M, p, rng));
      const Vec y = budget * unit(rng) * random_unit_tangent(M, p, rng);
      const Vec w = random_unit_tangent(M, qq, rng);
      const Vec J = jacobi_endpoint(M, p, qq, y, w).vec;
      auto phi = [&](double s) { return exp(M, p, log(M, p, exp(M, qq, s * w)).vec - y); };
      const Point x0 = phi(0.0);
      const double h = 1e-5;
      const Vec fd = (log(M, x0, phi(h)).vec - log(M, x0, phi(-h)).vec) / (2.0 * h);
      jac = std::max(jac, (J - fd).norm() / std::max(1.0, fd.norm()));
    }
  }
  add("exp/log inversion", exp_log, 1e-9);
  add("distance(p, exp v) = |v|", dist, 1e-10);
  add("parallel transport Gram matrix", gram, 1e-10);
  add("Jacobi endpoint vs finite differences", jac, 1e-6);

  double quad = 0.0;
  for (int m = 1; m <= 4; ++m) {
    for (int order = 2; order <= 6; ++order) {
      const QuadratureRule rule = ball_quadrature(m, 0.3, order);
      std::vector<int> alpha(m, 0);
      std::function<void(int, int)> walk = [&](int i, int left) {
        if (i == m) {
          double s = 0.0;
          for (std::size_t k = 0; k < rule.size(); ++k) {
            double t = rule.weights[k];
            for (int d = 0; d < m; ++d) t *= std::pow(rule.nodes[k][d], alpha[d]);
            s += t;
          }
          const double exact = ball_monomial(alpha, 0.3);
          const double scale = ball_volume(m, 0.3) * std::pow(0.3, order);
          quad = std::max(quad, std::abs(s - exact) / std::max(std::abs(exact), scale));
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
  add("ball quadrature monomial exactness", quad, 1e-10);

  double mass = 0.0, raw = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (double eps : {0.2, 0.1, 0.05}) {
      const MollifierSpec mol = make_mollifier(m, eps, cfg.smoothing.quadrature);
      double s = 0.0;
      for (double w : mol.weights) s += w;
      mass = std::max(mass, std::abs(s - 1.0));
      raw = std::max(raw, std::abs(mol.raw_mass - 1.0));
    }
  }
  add("discrete mollifier weights sum to one", mass, 1e-12);
  add("quadrature mass of the mollifier", raw, 1e-2);

  const Cover cover = run_cover(cfg);
  const PartitionOfUnity pou(M, cover);
  double pou_err = 0.0;
  for (const Point& q : coverage_grid(M, 2000, cfg.smoothing.box)) {
    double s = 0.0;
    for (const auto& t : pou.evaluate(q)) s += t.weight;
    pou_err = std::max(pou_err, std::abs(s - 1.0));
  }
  add("partition of unity sums to one", pou_err, 1e-12);

  const double eps0 = 0.5 * std::min(smallest(cfg.ladder), std::isfinite(inj) ? inj / 4.0 : 1.0);
  const double lam = lambda_eps(M, cover, eps0);
  const double lam_s = lambda_eps_sampled(M, cover, eps0, 200, cfg.seed);
  add("sampled Lambda(eps) within closed form", std::max(0.0, lam_s - lam), 1e-6);

  {
    const int n = 1003, d = 3;
    std::vector<double> rows(n * d), x(d), w(n), f(n), per{1.0, 2.0, 0.5}, a(n), b(n), wa(d), wb(d);
    for (double& v : rows) v = gauss(rng);
    for (double& v : x) v = gauss(rng);
    for (double& v : w) v = unit(rng);
    for (double& v : f) v = gauss(rng);
    double diff = 0.0;
    if (kernels::isa_available(kernels::Isa::Avx2)) {
      auto track = [&](double u, double v) { diff = std::max(diff, u == v ? 0.0 : std::abs(u - v) + 1e-300); };
      track(kernels::scalar::dot(w.data(), f.data(), n), kernels::avx2::dot(w.data(), f.data(), n));
      kernels::scalar::matvec(rows.data(), x.data(), n, d, a.data());
      kernels::avx2::matvec(rows.data(), x.data(), n, d, b.data());
      for (int i = 0; i < n; ++i) track(a[i], b[i]);
      kernels::scalar::squared_distances(rows.data(), x.data(), n, d, a.data());
      kernels::avx2::squared_distances(rows.data(), x.data(), n, d, b.data());
      for (int i = 0; i < n; ++i) track(a[i], b[i]);
      kernels::scalar::wrapped_squared_distances(rows.data(), x.data(), per.data(), n, d, a.data());
      kernels::avx2::wrapped_squared_distances(rows.data(), x.data(), per.data(), n, d, b.data());
      for (int i = 0; i < n; ++i) track(a[i], b[i]);
      kernels::scalar::weighted_rows(w.data(), rows.data(), n, d, wa.data());
      kernels::avx2::weighted_rows(w.data(), rows.data(), n, d, wb.data());
      for (int i = 0; i < d; ++i) track(wa[i], wb[i]);
      add("scalar and AVX2 kernels bit-identical", diff, 0.0);
    } else {
      add("scalar and AVX2 kernels bit-identical", 0.0, 0.0, "skipped: AVX2 unavailable");
    }
  }

  double wolfe = -1.0, mono = 0.0, adj = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 3;
    HullSample H(d);
    for (int i = 0; i < 6; ++i) H.add(Eigen::VectorXd::NullaryExpr(d, [&] { return gauss(rng) + 0.5; }));
    const MinNormResult r = min_norm_point(H);
    // Absolute form: the relative gap is meaningless once the iterate is at rounding level.
    wolfe = std::max(wolfe, wolfe_gap(H, r.point) * r.norm / H.max_norm());
    HullSample bigger = H;
    bigger.add(Eigen::VectorXd::NullaryExpr(d, [&] { return gauss(rng); }));
    mono = std::max(mono, min_norm_point(bigger).norm - r.norm);
    Mat A(2, 3);
    for (int i = 0; i < 6; ++i) A(i / 3, i % 3) = gauss(rng);
    const LinearMapRep rep{frame_at(Manifold::euclidean(3), Manifold::euclidean(3).point({0.0, 0.0, 0.0})),
                           frame_at(Manifold::euclidean(2), Manifold::euclidean(2).point({0.0, 0.0})), A};
    adj = std::max(adj, (adjoint(adjoint(rep)).matrix - A).cwiseAbs().maxCoeff() + std::abs(rank(adjoint(rep)) - rank(rep)));
  }
  add("min-norm Wolfe certificate", std::max(0.0, wolfe), 1e-10);
  add("min-norm monotone under added points", std::max(0.0, mono), 1e-12);
  add("adjoint involution and rank", adj, 0.0);

  {
    const Manifold N = cfg.map ? cfg.map->target : Manifold::sphere(1, 1.0);
    const EmbeddingSpec E = embedding(N);
    double idem = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Vec y0 = E.embed(random_point(N, rng, 1.0));
      Vec dy(E.ambient_dim());
      for (int i = 0; i < E.ambient_dim(); ++i) dy[i] = gauss(rng);
      const double tube = std::isfinite(E.tube_radius()) ? E.tube_radius() : 1.0;
      const Vec y = y0 + 0.4 * tube * unit(rng) * dy / dy.norm();
      const Point x = E.project(y);
      idem = std::max(idem, (E.project(E.embed(x)).coords - x.coords).norm());
    }
    add("tube projection idempotent", idem, 1e-10);
  }

  {
    const Manifold R2 = Manifold::euclidean(2);
    Vec a(2);
    a << 0.7, -1.3;
    const ScalarField F = catalog::affine(R2, a, 0.25);
    const SmoothedMap S(as_vector_map(F), build_cover(R2, 0.5), 0.1, cfg.smoothing.quadrature);
    double err = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Point q = random_point(R2, rng, 0.9);
      err = std::max(err, std::abs(S.scalar(q) - F.eval(q)));
    }
    add("smoothing reproduces affine functions", err, 1e-9);
  }
  return out;
}

RunResult do_selftest(const RunConfig& cfg) {
  const std::vector<Check> checks = selftest_checks(cfg);
  RunResult res;
  Json a = Json::array();
  bool ok = true;
  for (const Check& c : checks) {
    Json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    if (!c.note.empty()) j["note"] = c.note;
    a.push_back(j);
    ok = ok && c.pass;
  }
  res.report["checks"] = a;
  res.report["kernel_isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  res.report["passed"] = ok;
  CsvColumns cols;
  cols.points = cfg.grid->points;
  cols.eps = smallest(cfg.ladder);
  res.report["csv_eps"] = cols.eps;
  res.csv = make_csv(cfg, cols);
  res.exit_code = ok ? kOk : kHypothesisFailure;
  return res;
}

}  // namespace

bool known_subcommand(const std::string& name) {
  for (const char* s : {"probe", "scan", "smooth", "fibrate", "reeb", "selftest"}) {
    if (name == s) return true;
  }
  return false;
}

RunResult execute(const std::string& subcommand, const RunConfig& cfg) {
  RunResult body;
  if (subcommand == "probe") {
    body = do_probe(cfg);
  } else if (subcommand == "scan") {
    body = do_scan(cfg);
  } else if (subcommand == "smooth") {
    body = do_smooth(cfg);
  } else if (subcommand == "fibrate") {
    body = do_fibrate(cfg);
  } else if (subcommand == "reeb") {
    body = do_reeb(cfg);
  } else if (subcommand == "selftest") {
    body = do_selftest(cfg);
  } else {
    throw ConfigError("", "unknown subcommand '" + subcommand + "'");
  }
  RunResult res;
  res.report["schema_version"] = kSchemaVersion;
  res.report["tool"] = "nsmooth";
  res.report["subcommand"] = subcommand;
  res.report["status"] = body.exit_code == kOk ? "ok" : "hypothesis-failure";
  res.report["exit_code"] = body.exit_code;
  res.report["seed"] = cfg.seed;
  res.report["config"] = cfg.raw;
  res.report["settings"] = settings_json(cfg);
  res.report["result"] = body.report;
  res.csv = body.csv;
  res.exit_code = body.exit_code;
  return res;
}

int run(const RunOptions& options, std::ostream& log) {
  try {
    if (!known_subcommand(options.subcommand)) throw ConfigError("", "unknown subcommand '" + options.subcommand + "'");
    const RunConfig cfg = load_config(options.config_path, options.seed);
    const RunResult res = execute(options.subcommand, cfg);
    std::filesystem::create_directories(options.out_dir);
    const std::filesystem::path dir(options.out_dir);
    std::ofstream(dir / "report.json", std::ios::binary) << dump(res.report);
    std::ofstream(dir / "grid.csv", std::ios::binary) << res.csv;
    log << options.subcommand << ": " << (res.exit_code == kOk ? "ok" : "hypothesis failure") << " (report: "
        << (dir / "report.json").string() << ")\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const HypothesisFailure& e) {
    log << "hypothesis failure at step " << e.step() << ": " << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace nsmooth::cli
