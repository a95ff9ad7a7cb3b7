#include "nsmooth/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace nsmooth::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("NSMOOTH_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& selected() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

Isa active_isa() { return static_cast<Isa>(selected().load(std::memory_order_relaxed)); }

bool isa_available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

void force_isa(Isa isa) {
  selected().store(static_cast<int>(isa_available(isa) ? isa : Isa::Scalar), std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> w, std::span<const double> f) {
  assert(w.size() == f.size());
  return active_isa() == Isa::Avx2 ? avx2::dot(w.data(), f.data(), w.size())
                                   : scalar::dot(w.data(), f.data(), w.size());
}

void weighted_rows(std::span<const double> w, std::span<const double> rows, std::size_t width,
                   std::span<double> out) {
  assert(rows.size() == w.size() * width && out.size() >= width);
  if (active_isa() == Isa::Avx2) {
    avx2::weighted_rows(w.data(), rows.data(), w.size(), width, out.data());
  } else {
    scalar::weighted_rows(w.data(), rows.data(), w.size(), width, out.data());
  }
}

void matvec(std::span<const double> rows, std::span<const double> x, std::span<double> out) {
  const std::size_t d = x.size();
  const std::size_t n = d == 0 ? 0 : rows.size() / d;
  assert(out.size() >= n);
  if (active_isa() == Isa::Avx2) {
    avx2::matvec(rows.data(), x.data(), n, d, out.data());
  } else {
    scalar::matvec(rows.data(), x.data(), n, d, out.data());
  }
}

void squared_distances(std::span<const double> rows, std::span<const double> x, std::span<double> out) {
  const std::size_t d = x.size();
  const std::size_t n = d == 0 ? 0 : rows.size() / d;
  assert(out.size() >= n);
  if (active_isa() == Isa::Avx2) {
    avx2::squared_distances(rows.data(), x.data(), n, d, out.data());
  } else {
    scalar::squared_distances(rows.data(), x.data(), n, d, out.data());
  }
}

void wrapped_squared_distances(std::span<const double> rows, std::span<const double> x,
                               std::span<const double> periods, std::span<double> out) {
  const std::size_t d = x.size();
  const std::size_t n = d == 0 ? 0 : rows.size() / d;
  assert(periods.size() == d && out.size() >= n);
  if (active_isa() == Isa::Avx2) {
    avx2::wrapped_squared_distances(rows.data(), x.data(), periods.data(), n, d, out.data());
  } else {
    scalar::wrapped_squared_distances(rows.data(), x.data(), periods.data(), n, d, out.data());
  }
}

}  // namespace nsmooth::kernels
