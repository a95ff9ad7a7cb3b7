#pragma once

// Approximate fibrations f_eps = pi_N o F~_eps: closed-form embeddings of the target,
// nearest-point projections from their tubes, and the submersion / distance certificates.

#include <optional>
#include <string>
#include <vector>

#include "nsmooth/clarke.hpp"
#include "nsmooth/smoothing.hpp"

namespace nsmooth {

/// Isometric embedding of a built-in target N into R^ambient_dim with tube radius mu_0.
class EmbeddingSpec {
 public:
  explicit EmbeddingSpec(Manifold target);

  const Manifold& target() const { return target_; }
  int ambient_dim() const { return ambient_dim_; }
  /// +infinity for Euclidean targets.
  double tube_radius() const { return tube_radius_; }

  Vec embed(const Point& x) const;
  /// Nearest-point projection pi_N. Throws TubeEscape where it is undefined.
  Point project(const Vec& y) const;
  /// Ambient differential of pi_N at y followed by the embedding (ambient_dim square).
  Mat dproject(const Vec& y) const;
  /// Differential of embed at x (ambient_dim x target.coord_dim).
  Mat dembed(const Point& x) const;
  /// Orthonormal columns spanning the embedded tangent space at x, the images of frame_at(x).
  Mat tangent_frame(const Point& x) const;
  /// Euclidean distance from y to the embedded image.
  double distance_to_image(const Vec& y) const;

 private:
  Manifold target_;
  int ambient_dim_;
  double tube_radius_;
};

/// The built-in embedding of N. Throws UnsupportedTarget for targets it cannot embed.
EmbeddingSpec embedding(const Manifold& N);

/// embed o F as a map into R^ambient_dim, with Jacobian dembed * dF.
VectorMap embedded_map(const MapField& F, const EmbeddingSpec& E);

/// f_eps = project o F~_eps for a smoothing of an embedded map.
class Fibration {
 public:
  Fibration(SmoothedMap smoothed, EmbeddingSpec E);

  const SmoothedMap& smoothed() const { return smoothed_; }
  const EmbeddingSpec& embedding() const { return embedding_; }

  /// Throws TubeEscape when F~_eps(q) is not inside the tube.
  Point value(const Point& q) const;
  /// n x m differential in frame_at(q) and frame_at(f_eps(q)), by the chain rule.
  Mat differential(const Point& q) const;
  /// Central differences of value() along frame_at(q), projected on the target frame.
  Mat differential_fd(const Point& q, double h = 1e-5) const;

 private:
  SmoothedMap smoothed_;
  EmbeddingSpec embedding_;
};

/// Builds f_eps after checking that the smoothing stays inside the tube on `grid`;
/// throws TubeEscape carrying the first offending point.
Fibration compose_fibration(SmoothedMap smoothed, EmbeddingSpec E, const std::vector<Point>& grid);

struct SubmersionResult {
  double min_sigma = 0.0;
  bool transversal = false;
  /// Grid index attaining min_sigma.
  int argmin = -1;
};

/// Smallest n-th singular value of df_eps over the grid; transversal when it exceeds tol.
SubmersionResult submersion_check(const Fibration& f, const std::vector<Point>& grid, double tol);

struct FibrationReport {
  double eps = 0.0;
  double eta = 0.0;
  double min_sigma = 0.0;
  double max_dist = 0.0;
  bool transversal = false;
  int grid_size = 0;
  /// Largest distance from F~_eps to the embedded target over the grid.
  double max_tube_distance = 0.0;
  double tube_radius = 0.0;
  double sigma_tol = 0.0;
};

struct EtaRung {
  double eps = 0.0;
  /// "accepted", "rejected", "tube-escape" or "domain".
  std::string status;
  std::optional<FibrationReport> report;
  std::string detail;
};

struct EtaSearchOptions {
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025, 0.0125};
  double sigma_tol = 1e-3;
  /// Cover radius; 0 selects default_cover_radius.
  double cover_radius = 0.0;
  QuadratureSpec quadrature;
  /// Evaluate every rung instead of stopping at the first accepted one.
  bool full_ladder = false;
};

struct EtaSearchResult {
  bool accepted = false;
  double eps_accepted = 0.0;
  /// The accepted report, or the one with the smallest max_dist on exhaustion.
  std::optional<FibrationReport> report;
  std::vector<EtaRung> rungs;
};

FibrationReport fibration_report(const MapField& F, const Fibration& f, const std::vector<Point>& grid, double eta,
                                 double sigma_tol);

EtaSearchResult eta_search(const MapField& F, const EmbeddingSpec& E, double eta, const std::vector<Point>& grid,
                           const EtaSearchOptions& options = {});

}  // namespace nsmooth
