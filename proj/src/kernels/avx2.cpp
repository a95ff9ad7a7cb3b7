#include "nsmooth/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define NSMOOTH_HAVE_X86 1
#else
#define NSMOOTH_HAVE_X86 0
#endif

namespace nsmooth::kernels::avx2 {

#if NSMOOTH_HAVE_X86

#define NSMOOTH_AVX2 __attribute__((target("avx2")))

NSMOOTH_AVX2 double dot(const double* w, const double* f, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t l = 0; i < n; ++i, ++l) lane[l] += w[i] * f[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

NSMOOTH_AVX2 void weighted_rows(const double* w, const double* rows, std::size_t n, std::size_t width,
                                double* out) {
  std::size_t j = 0;
  for (; j + 4 <= width; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(w[i]), _mm256_loadu_pd(rows + i * width + j)));
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < width; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * rows[i * width + j];
    out[j] = s;
  }
}

namespace {

// Loads column k of four consecutive rows.
NSMOOTH_AVX2 inline __m256d column4(const double* rows, std::size_t d, std::size_t k) {
  return _mm256_set_pd(rows[3 * d + k], rows[2 * d + k], rows[d + k], rows[k]);
}

}  // namespace

NSMOOTH_AVX2 void matvec(const double* rows, const double* x, std::size_t n, std::size_t d, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* block = rows + i * d;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      s = _mm256_add_pd(s, _mm256_mul_pd(column4(block, d, k), _mm256_set1_pd(x[k])));
    }
    _mm256_storeu_pd(out + i, s);
  }
  scalar::matvec(rows + i * d, x, n - i, d, out + i);
}

NSMOOTH_AVX2 void squared_distances(const double* rows, const double* x, std::size_t n, std::size_t d,
                                    double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* block = rows + i * d;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      const __m256d t = _mm256_sub_pd(column4(block, d, k), _mm256_set1_pd(x[k]));
      s = _mm256_add_pd(s, _mm256_mul_pd(t, t));
    }
    _mm256_storeu_pd(out + i, s);
  }
  scalar::squared_distances(rows + i * d, x, n - i, d, out + i);
}

NSMOOTH_AVX2 void wrapped_squared_distances(const double* rows, const double* x, const double* periods,
                                            std::size_t n, std::size_t d, double* out) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* block = rows + i * d;
    __m256d s = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      const __m256d period = _mm256_set1_pd(periods[k]);
      __m256d t = _mm256_andnot_pd(sign_mask, _mm256_sub_pd(column4(block, d, k), _mm256_set1_pd(x[k])));
      t = _mm256_sub_pd(t, _mm256_mul_pd(period, _mm256_floor_pd(_mm256_div_pd(t, period))));
      t = _mm256_min_pd(t, _mm256_sub_pd(period, t));
      s = _mm256_add_pd(s, _mm256_mul_pd(t, t));
    }
    _mm256_storeu_pd(out + i, s);
  }
  scalar::wrapped_squared_distances(rows + i * d, x, periods, n - i, d, out + i);
}

#else  // no x86: the dispatcher never selects these

double dot(const double* w, const double* f, std::size_t n) { return scalar::dot(w, f, n); }
void weighted_rows(const double* w, const double* rows, std::size_t n, std::size_t width, double* out) {
  scalar::weighted_rows(w, rows, n, width, out);
}
void matvec(const double* rows, const double* x, std::size_t n, std::size_t d, double* out) {
  scalar::matvec(rows, x, n, d, out);
}
void squared_distances(const double* rows, const double* x, std::size_t n, std::size_t d, double* out) {
  scalar::squared_distances(rows, x, n, d, out);
}
void wrapped_squared_distances(const double* rows, const double* x, const double* periods,
                               std::size_t n, std::size_t d, double* out) {
  scalar::wrapped_squared_distances(rows, x, periods, n, d, out);
}

#endif

}  // namespace nsmooth::kernels::avx2
