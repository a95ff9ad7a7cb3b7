#pragma once

// Scenario runners: Clarke / Grove-Shiohama equivalence scans, singular-set scans,
// the nonvanishing-gradient check for smoothings, smoothing error tables and the
// Reeb-theorem checks.

#include <optional>
#include <string>
#include <vector>

#include "nsmooth/clarke.hpp"
#include "nsmooth/grids.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth {

struct ScanPoint {
  Point q;
  SingularityVerdict clarke;
  /// Absent at the base point itself, where d_p is singular by definition.
  std::optional<SingularityVerdict> gs;
  /// The sampling ball around q reaches p or crosses a change in the geodesic count.
  bool indeterminate = false;
  bool agree = true;
  int geodesics = 0;
};

struct ScanReport {
  std::string field;
  std::string grid;
  std::vector<ScanPoint> points;
  /// Grid indices with differing verdicts outside the indeterminate band.
  std::vector<int> disagreements;
  int clarke_singular = 0;
  int gs_singular = 0;
  int indeterminate = 0;
  /// Analytic singular points whose nearest grid point was not flagged singular.
  std::vector<int> missed;
  /// Grid indices flagged singular farther than the grid spacing from the analytic set.
  std::vector<int> spurious;
  bool recovered = false;
};

ScanReport equivalence_scan(const Manifold& M, const Point& p, const Grid& grid, const ClarkeParams& params = {});

struct SingularScan {
  std::vector<SingularityVerdict> verdicts;
  std::vector<int> singular;
  /// Grid-neighbour components of the singular points.
  std::vector<std::vector<int>> clusters;
  /// Grid points where sampling failed (too many kinks); counted as singular.
  std::vector<int> failed;
};

SingularScan singular_scan(const ScalarField& F, const Grid& grid, const ClarkeParams& params = {});

struct SmoothingSetup {
  /// 0 selects default_cover_radius.
  double cover_radius = 0.0;
  QuadratureSpec quadrature;
  double box = 1.0;
};

struct NonvanishingRung {
  double eps = 0.0;
  double min_grad = 0.0;
  int argmin = -1;
  bool positive = false;
  /// min over grid of |grad F~_eps(q)| - delta(q)/3.
  double worst_third_margin = 0.0;
  bool third_margin_ok = false;
};

struct NonvanishingReport {
  std::vector<NonvanishingRung> rungs;
  /// delta estimates per grid point (half the singularity margin).
  std::vector<double> delta;
  /// Largest ladder eps below which every rung stays positive; 0 when none does.
  double threshold_eps = 0.0;
  double tol = 0.0;
  double slack = 0.0;
};

struct NonvanishingOptions {
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
  double tol = 1e-6;
  /// Allowed shortfall in |grad F~_eps| >= delta / 3.
  double slack = 0.05;
  SmoothingSetup setup;
  ClarkeParams params;
};

NonvanishingReport nonvanishing_scan(const ScalarField& F, const std::vector<Point>& region,
                                     const NonvanishingOptions& options = {});

struct ErrorRow {
  double eps = 0.0;
  double lambda = 0.0;
  double lipschitz = 0.0;
  double max_error = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// max over grid of |F~_eps - F| against eps * Lambda(eps) * lipschitz * (1 + rel_slack).
std::vector<ErrorRow> error_table(const VectorMap& F, double lipschitz, const std::vector<Point>& grid,
                                  const std::vector<double>& ladder, const SmoothingSetup& setup = {},
                                  double rel_slack = 1e-3);

struct ReebOptions {
  double c = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double eps = 0.05;
  SmoothingSetup setup;
  ClarkeParams params;
  int lipschitz_pairs = 4000;
  /// Fractions of the sampled range used for the shrinking levels near min and max.
  std::vector<double> shrink{0.2, 0.1, 0.05, 0.02};
};

struct ReebLevel {
  double kappa = 0.0;
  int samples = 0;
  double max_cluster_distance = 0.0;
};

struct ReebReport {
  bool passed = false;
  /// 1-based index of the first failed step, 0 when all pass.
  int failed_step = 0;
  std::string failure;
  std::vector<bool> steps;
  int clusters = 0;
  double lipschitz = 0.0;
  double level_tol = 0.0;
  double graph_radius = 0.0;
  int level_samples = 0;
  int level_components = 0;
  int min_degree = 0;
  int band_samples = 0;
  double band_min_grad = 0.0;
  double band_tol = 0.0;
  std::vector<ReebLevel> low_levels;
  std::vector<ReebLevel> high_levels;
  double localize_radius = 0.0;
  SingularScan scan;
};

/// All four checks, recording the first failure instead of throwing.
ReebReport evaluate_reeb(const ScalarField& F, const Grid& grid, const ReebOptions& options);
/// Throws HypothesisFailure naming the first failed step.
ReebReport reeb_check(const ScalarField& F, const Grid& grid, const ReebOptions& options);

}  // namespace nsmooth
