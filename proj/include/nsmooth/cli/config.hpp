#pragma once

// Run configuration: parsing and validation with field paths in every error.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsmooth/catalog.hpp"
#include "nsmooth/clarke.hpp"
#include "nsmooth/errors.hpp"
#include "nsmooth/experiments.hpp"
#include "nsmooth/grids.hpp"
#include "nsmooth/cli/json_out.hpp"

namespace nsmooth::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct FibrateSpec {
  double eta = 0.2;
  double sigma_tol = 1e-3;
  bool full_ladder = false;
};

struct ReebSpec {
  double c = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double eps = 0.05;
  int lipschitz_pairs = 4000;
  std::vector<double> shrink{0.2, 0.1, 0.05, 0.02};
};

struct RegionSpec {
  int coordinate = 0;
  double min = 0.0;
  double max = 0.0;
};

struct SmoothSpec {
  int lipschitz_pairs = 4000;
  /// Grid points with coordinate in [min, max] form the nonvanishing-gradient region.
  std::optional<RegionSpec> region;
  double slack = 0.05;
};

struct RunConfig {
  Json raw;
  std::optional<Manifold> manifold;
  std::optional<ScalarField> scalar;
  std::optional<MapField> map;
  /// Base point when the field is dist-to-point.
  std::optional<Point> base_point;
  std::optional<std::vector<Point>> known_singular_set;
  std::optional<Grid> grid;
  std::vector<Point> probe_points;
  std::uint64_t seed = 1;
  ClarkeParams clarke;
  SmoothingSetup smoothing;
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025, 0.0125};
  FibrateSpec fibrate;
  ReebSpec reeb;
  SmoothSpec smooth;
};

/// Validates a parsed document. Throws ConfigError with the offending field path.
RunConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads and parses a configuration file.
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace nsmooth::cli
