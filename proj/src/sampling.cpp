#include "nsmooth/sampling.hpp"

#include <cmath>
#include <numbers>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), index_(1 + (seed % 1000003) * 4099) {
  if (dim < 1 || dim > kMaxCoords) throw DomainViolation("HaltonSequence: dimension must be in [1, 8]");
}

Vec HaltonSequence::next_in_cube() {
  Vec v(dim_);
  for (int k = 0; k < dim_; ++k) v[k] = radical_inverse(index_, kPrimes[k]);
  ++index_;
  return v;
}

Vec HaltonSequence::next_in_ball() {
  for (;;) {
    Vec v = 2.0 * next_in_cube() - Vec::Ones(dim_);
    if (v.squaredNorm() < 1.0) return v;
  }
}

std::vector<Vec> fibonacci_sphere(int n) {
  std::vector<Vec> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec v(3);
    v << r * std::cos(golden * k), r * std::sin(golden * k), z;
    pts.push_back(v);
  }
  return pts;
}

std::vector<Vec> unit_direction_grid(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    Vec a(1), b(1);
    a[0] = 1.0;
    b[0] = -1.0;
    return {a, b};
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      dirs.push_back(v);
    }
    return dirs;
  }
  HaltonSequence h(n, 7);
  if (n == 3) {
    for (const Vec& v : fibonacci_sphere(count)) dirs.push_back(v);
    return dirs;
  }
  while (static_cast<int>(dirs.size()) < count) {
    Vec v = h.next_in_ball();
    if (v.norm() > 1e-3) dirs.push_back(v / v.norm());
  }
  return dirs;
}

}  // namespace nsmooth
