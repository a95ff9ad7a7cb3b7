#include "nsmooth/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace nsmooth::kernels::scalar {

// Four interleaved accumulators, combined as (a0 + a1) + (a2 + a3). The AVX2
// path keeps one accumulator per lane and reduces in the same order.
double dot(const double* w, const double* f, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] += w[i + l] * f[i + l];
  }
  for (std::size_t l = 0; i < n; ++i, ++l) acc[l] += w[i] * f[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void weighted_rows(const double* w, const double* rows, std::size_t n, std::size_t width, double* out) {
  for (std::size_t j = 0; j < width; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * width;
    for (std::size_t j = 0; j < width; ++j) out[j] += w[i] * row[j];
  }
}

void matvec(const double* rows, const double* x, std::size_t n, std::size_t d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += row[k] * x[k];
    out[i] = s;
  }
}

void squared_distances(const double* rows, const double* x, std::size_t n, std::size_t d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = row[k] - x[k];
      s += t * t;
    }
    out[i] = s;
  }
}

void wrapped_squared_distances(const double* rows, const double* x, const double* periods,
                               std::size_t n, std::size_t d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double t = std::fabs(row[k] - x[k]);
      t = t - periods[k] * std::floor(t / periods[k]);
      t = std::min(t, periods[k] - t);
      s += t * t;
    }
    out[i] = s;
  }
}

}  // namespace nsmooth::kernels::scalar
