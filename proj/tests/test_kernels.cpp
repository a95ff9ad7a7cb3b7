#include <random>
#include <vector>

#include "doctest.h"
#include "nsmooth/kernels.hpp"

using namespace nsmooth;

namespace {

struct Data {
  std::vector<double> rows, x, w, periods;
  std::size_t n, d;
};

Data make(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Data D{std::vector<double>(n * d), std::vector<double>(d), std::vector<double>(n), std::vector<double>(d), n, d};
  for (double& v : D.rows) v = g(rng);
  for (double& v : D.x) v = g(rng);
  for (double& v : D.w) v = g(rng);
  for (double& v : D.periods) v = u(rng);
  return D;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
    for (std::size_t d : {1u, 2u, 3u, 4u, 5u, 8u}) {
      const Data D = make(n, d, 1000 * n + d);
      CHECK(kernels::scalar::dot(D.w.data(), D.rows.data(), n) == kernels::avx2::dot(D.w.data(), D.rows.data(), n));

      std::vector<double> a(n), b(n), wa(d), wb(d);
      kernels::scalar::matvec(D.rows.data(), D.x.data(), n, d, a.data());
      kernels::avx2::matvec(D.rows.data(), D.x.data(), n, d, b.data());
      CHECK(a == b);
      kernels::scalar::squared_distances(D.rows.data(), D.x.data(), n, d, a.data());
      kernels::avx2::squared_distances(D.rows.data(), D.x.data(), n, d, b.data());
      CHECK(a == b);
      kernels::scalar::wrapped_squared_distances(D.rows.data(), D.x.data(), D.periods.data(), n, d, a.data());
      kernels::avx2::wrapped_squared_distances(D.rows.data(), D.x.data(), D.periods.data(), n, d, b.data());
      CHECK(a == b);
      kernels::scalar::weighted_rows(D.w.data(), D.rows.data(), n, d, wa.data());
      kernels::avx2::weighted_rows(D.w.data(), D.rows.data(), n, d, wb.data());
      CHECK(wa == wb);
    }
  }
}

TEST_CASE("scalar kernels match naive loops") {
  const Data D = make(37, 3, 5);
  std::vector<double> out(D.n);
  kernels::scalar::squared_distances(D.rows.data(), D.x.data(), D.n, D.d, out.data());
  for (std::size_t i = 0; i < D.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < D.d; ++j) s += (D.rows[i * D.d + j] - D.x[j]) * (D.rows[i * D.d + j] - D.x[j]);
    CHECK(out[i] == doctest::Approx(s).epsilon(1e-14));
  }
  kernels::scalar::wrapped_squared_distances(D.rows.data(), D.x.data(), D.periods.data(), D.n, D.d, out.data());
  for (std::size_t i = 0; i < D.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < D.d; ++j) {
      double t = std::fmod(std::abs(D.rows[i * D.d + j] - D.x[j]), D.periods[j]);
      t = std::min(t, D.periods[j] - t);
      s += t * t;
    }
    CHECK(out[i] == doctest::Approx(s).epsilon(1e-12));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < D.n; ++i) dot += D.w[i] * D.rows[i];
  CHECK(kernels::scalar::dot(D.w.data(), D.rows.data(), D.n) == doctest::Approx(dot).epsilon(1e-14));
}

TEST_CASE("dispatch follows force_isa") {
  const Data D = make(33, 4, 9);
  std::vector<double> forced(D.n), ref(D.n);
  kernels::force_isa(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  kernels::matvec(D.rows, D.x, forced);
  kernels::scalar::matvec(D.rows.data(), D.x.data(), D.n, D.d, ref.data());
  CHECK(forced == ref);

  kernels::force_isa(kernels::Isa::Avx2);
  const kernels::Isa expected = kernels::isa_available(kernels::Isa::Avx2) ? kernels::Isa::Avx2 : kernels::Isa::Scalar;
  CHECK(kernels::active_isa() == expected);
  kernels::matvec(D.rows, D.x, forced);
  CHECK(forced == ref);
  CHECK(kernels::isa_name(kernels::Isa::Scalar) == "scalar");
}
