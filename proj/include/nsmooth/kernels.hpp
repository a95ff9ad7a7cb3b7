#pragma once

// Data-parallel inner loops shared by the geometry, hull and smoothing code.
//
// Every kernel has a portable scalar reference and an AVX2 variant. The two
// produce bit-identical results: reductions use four interleaved partial sums
// in both paths and neither path contracts into FMA. The active variant is
// chosen once at first use from the CPU features; NSMOOTH_SIMD=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace nsmooth::kernels {

enum class Isa { Scalar, Avx2 };

/// Sum of w[i] * f[i]. Spans must have equal length.
double dot(std::span<const double> w, std::span<const double> f);

/// out[j] = sum_i w[i] * rows[i * width + j] for j < width.
void weighted_rows(std::span<const double> w, std::span<const double> rows, std::size_t width,
                   std::span<double> out);

/// out[i] = <rows[i, :], x> for a row-major n x x.size() matrix.
void matvec(std::span<const double> rows, std::span<const double> x, std::span<double> out);

/// out[i] = ||rows[i, :] - x||^2.
void squared_distances(std::span<const double> rows, std::span<const double> x,
                       std::span<double> out);

/// out[i] = squared flat-torus distance between rows[i, :] and x, each coordinate wrapped
/// with its period.
void wrapped_squared_distances(std::span<const double> rows, std::span<const double> x,
                               std::span<const double> periods, std::span<double> out);

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

// Explicit variants, exposed for equivalence tests and benchmarks.
namespace scalar {
double dot(const double* w, const double* f, std::size_t n);
void weighted_rows(const double* w, const double* rows, std::size_t n, std::size_t width, double* out);
void matvec(const double* rows, const double* x, std::size_t n, std::size_t d, double* out);
void squared_distances(const double* rows, const double* x, std::size_t n, std::size_t d, double* out);
void wrapped_squared_distances(const double* rows, const double* x, const double* periods,
                               std::size_t n, std::size_t d, double* out);
}  // namespace scalar

namespace avx2 {
double dot(const double* w, const double* f, std::size_t n);
void weighted_rows(const double* w, const double* rows, std::size_t n, std::size_t width, double* out);
void matvec(const double* rows, const double* x, std::size_t n, std::size_t d, double* out);
void squared_distances(const double* rows, const double* x, std::size_t n, std::size_t d, double* out);
void wrapped_squared_distances(const double* rows, const double* x, const double* periods,
                               std::size_t n, std::size_t d, double* out);
}  // namespace avx2

/// Overrides the dispatch choice (tests only). Falls back to Scalar when the ISA is missing.
void force_isa(Isa isa);

}  // namespace nsmooth::kernels
