#pragma once

// Deterministic scan grids with neighbour structure.

#include <string>
#include <vector>

#include "nsmooth/manifold.hpp"

namespace nsmooth {

struct Grid {
  std::string name;
  std::vector<Point> points;
  /// Grid-neighbour adjacency (symmetric).
  std::vector<std::vector<int>> neighbors;
  /// Largest distance between a point and its nearest neighbour along a grid axis.
  double spacing = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Latitude-longitude grid on Sphere(2, R): `rings` circles of latitude at colatitudes
/// k*pi/(rings+1) with `sectors` points each, plus both poles.
Grid latlong_grid(const Manifold& M, int rings, int sectors);

/// n_1 x n_2 x ... product grid. Torus: angles i * L / n. Euclidean: cell centres of
/// [-box, box]^m. Sphere(1): n_1 equally spaced angles.
Grid product_grid(const Manifold& M, const std::vector<int>& counts, double box = 1.0);

/// Fibonacci lattice on Sphere(2, R) with neighbours inside 1.6 * spacing.
Grid fibonacci_grid(const Manifold& M, int n);

/// Adjacency lists joining points closer than `radius`.
std::vector<std::vector<int>> radius_graph(const Manifold& M, const std::vector<Point>& points, double radius);

/// Connected components of the subgraph induced by `members`, each a sorted list of
/// point indices.
std::vector<std::vector<int>> components(const std::vector<std::vector<int>>& adjacency,
                                         const std::vector<int>& members);

}  // namespace nsmooth
