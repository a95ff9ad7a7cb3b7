#include "nsmooth/grids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsmooth/errors.hpp"
#include "nsmooth/sampling.hpp"

namespace nsmooth {

namespace {

void link(std::vector<std::vector<int>>& adj, int a, int b) {
  if (a == b) return;
  if (std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end()) adj[a].push_back(b);
  if (std::find(adj[b].begin(), adj[b].end(), a) == adj[b].end()) adj[b].push_back(a);
}

}  // namespace

Grid latlong_grid(const Manifold& M, int rings, int sectors) {
  if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) throw UnsupportedDim("latlong_grid: needs Sphere(2)");
  if (rings < 1 || sectors < 3) throw DomainViolation("latlong_grid: need rings >= 1 and sectors >= 3");
  const double R = M.radius();
  const double pi = std::numbers::pi;
  Grid g;
  g.name = "latlong-" + std::to_string(rings) + "x" + std::to_string(sectors) + "+poles";
  g.points.push_back(M.point({0.0, 0.0, R}));
  for (int k = 1; k <= rings; ++k) {
    const double theta = k * pi / (rings + 1);
    for (int j = 0; j < sectors; ++j) {
      const double phi = 2.0 * pi * j / sectors;
      g.points.push_back(M.point({R * std::sin(theta) * std::cos(phi), R * std::sin(theta) * std::sin(phi),
                                  R * std::cos(theta)}));
    }
  }
  g.points.push_back(M.point({0.0, 0.0, -R}));
  const int south = static_cast<int>(g.points.size()) - 1;
  auto at = [&](int k, int j) { return 1 + (k - 1) * sectors + ((j % sectors) + sectors) % sectors; };
  g.neighbors.assign(g.points.size(), {});
  for (int k = 1; k <= rings; ++k) {
    for (int j = 0; j < sectors; ++j) {
      link(g.neighbors, at(k, j), at(k, j + 1));
      if (k < rings) link(g.neighbors, at(k, j), at(k + 1, j));
    }
  }
  for (int j = 0; j < sectors; ++j) {
    link(g.neighbors, 0, at(1, j));
    link(g.neighbors, south, at(rings, j));
  }
  g.spacing = R * std::max(pi / (rings + 1), 2.0 * pi / sectors);
  return g;
}

Grid product_grid(const Manifold& M, const std::vector<int>& counts, double box) {
  const int m = M.dim();
  if (static_cast<int>(counts.size()) != m) throw DomainViolation("product_grid: one count per dimension");
  for (int c : counts) {
    if (c < 2) throw DomainViolation("product_grid: counts must be >= 2");
  }
  Grid g;
  g.name = "product";
  for (int c : counts) g.name += "-" + std::to_string(c);
  const bool periodic = M.kind() != ManifoldKind::Euclidean;
  if (M.kind() == ManifoldKind::Sphere) {
    if (m != 1) throw UnsupportedDim("product_grid: spheres other than S^1 use latlong/fibonacci grids");
    const double R = M.radius();
    for (int i = 0; i < counts[0]; ++i) {
      const double t = 2.0 * std::numbers::pi * i / counts[0];
      g.points.push_back(M.point({R * std::cos(t), R * std::sin(t)}));
    }
    g.spacing = 2.0 * std::numbers::pi * R / counts[0];
  } else {
    int total = 1;
    for (int c : counts) total *= c;
    for (int idx = 0; idx < total; ++idx) {
      Vec x(m);
      int code = idx;
      for (int i = 0; i < m; ++i) {
        const int k = code % counts[i];
        code /= counts[i];
        x[i] = periodic ? M.periods()[i] * k / counts[i] : -box + 2.0 * box * (k + 0.5) / counts[i];
      }
      g.points.push_back(M.point(x));
    }
    g.spacing = 0.0;
    for (int i = 0; i < m; ++i) {
      g.spacing = std::max(g.spacing, periodic ? M.periods()[i] / counts[i] : 2.0 * box / counts[i]);
    }
  }
  g.neighbors.assign(g.points.size(), {});
  const int total = static_cast<int>(g.points.size());
  for (int idx = 0; idx < total; ++idx) {
    int stride = 1;
    int code = idx;
    for (int i = 0; i < m; ++i) {
      const int k = code % counts[i];
      code /= counts[i];
      if (k + 1 < counts[i]) {
        link(g.neighbors, idx, idx + stride);
      } else if (periodic) {
        link(g.neighbors, idx, idx - k * stride);
      }
      stride *= counts[i];
    }
  }
  return g;
}

Grid fibonacci_grid(const Manifold& M, int n) {
  if (M.kind() != ManifoldKind::Sphere || M.dim() != 2) throw UnsupportedDim("fibonacci_grid: needs Sphere(2)");
  Grid g;
  g.name = "fibonacci-" + std::to_string(n);
  for (const Vec& v : fibonacci_sphere(n)) g.points.push_back(M.point(M.radius() * v));
  g.spacing = M.radius() * std::sqrt(4.0 * std::numbers::pi / n);
  g.neighbors = radius_graph(M, g.points, 1.6 * g.spacing);
  return g;
}

std::vector<std::vector<int>> radius_graph(const Manifold& M, const std::vector<Point>& points, double radius) {
  std::vector<std::vector<int>> adj(points.size());
  std::vector<double> rows;
  for (const Point& p : points) rows.insert(rows.end(), p.coords.data(), p.coords.data() + p.coords.size());
  std::vector<double> dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    batch_distances(M, rows, points[i], dist);
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (dist[j] < radius) {
        adj[i].push_back(static_cast<int>(j));
        adj[j].push_back(static_cast<int>(i));
      }
    }
  }
  return adj;
}

std::vector<std::vector<int>> components(const std::vector<std::vector<int>>& adjacency,
                                         const std::vector<int>& members) {
  std::vector<int> slot(adjacency.size(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) slot[members[k]] = static_cast<int>(k);
  std::vector<bool> seen(members.size(), false);
  std::vector<std::vector<int>> out;
  for (std::size_t start = 0; start < members.size(); ++start) {
    if (seen[start]) continue;
    std::vector<int> comp;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = true;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      comp.push_back(members[k]);
      for (int nb : adjacency[members[k]]) {
        const int s = slot[nb];
        if (s >= 0 && !seen[s]) {
          seen[s] = true;
          stack.push_back(s);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace nsmooth
