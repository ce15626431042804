#include "cadml/error.hpp"
#include "cadml/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace cadml::simd {

namespace {

Backend detect() noexcept {
  if (const char* env = std::getenv("CADML_SIMD"); env != nullptr && std::string(env) == "scalar")
    return Backend::scalar;
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

} // namespace

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend backend) noexcept {
  if (backend == Backend::scalar)
    return true;
#if defined(CADML_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend))
    throw Error(ErrorCode::Usage, "SIMD backend '" + std::string(to_string(backend)) +
                                      "' is not supported on this CPU");
  current().store(backend, std::memory_order_relaxed);
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
#ifdef CADML_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::avx2)
    return avx2::squared_distance(a.data(), b.data(), a.size());
#endif
  return scalar::squared_distance(a.data(), b.data(), a.size());
}

double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> weights) noexcept {
#ifdef CADML_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::avx2)
    return avx2::weighted_squared_distance(a.data(), b.data(), weights.data(), a.size());
#endif
  return scalar::weighted_squared_distance(a.data(), b.data(), weights.data(), a.size());
}

void squared_distances(std::span<const double> query, std::span<const double> rows,
                       std::size_t dim, std::span<double> out) noexcept {
  const std::size_t count = dim == 0 ? out.size() : rows.size() / dim;
  if (dim == 0) {
    for (double& v : out)
      v = 0.0;
    return;
  }
#ifdef CADML_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::avx2) {
    avx2::squared_distances(query.data(), rows.data(), dim, count, out.data());
    return;
  }
#endif
  scalar::squared_distances(query.data(), rows.data(), dim, count, out.data());
}

} // namespace cadml::simd
