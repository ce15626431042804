#pragma once

// Distance kernels used by k-NN, the RBF kernel and the Gaussian likelihood.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is picked once at startup from CPUID; the
// environment variable CADML_SIMD=scalar forces the reference path. The two
// paths agree to rounding (different summation order), which the equivalence
// tests pin at 1e-12 relative.

#include <cstddef>
#include <span>
#include <string_view>

namespace cadml::simd {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend) noexcept;

/// True when the CPU (and build) can run the given backend.
bool backend_available(Backend backend) noexcept;

/// Backend currently used by the dispatched entry points below.
Backend active_backend() noexcept;

/// Overrides the dispatched backend. Throws cadml::Error if unavailable.
void set_backend(Backend backend);

/// RAII override, restores the previous backend on destruction.
class ScopedBackend {
public:
  explicit ScopedBackend(Backend backend) : previous_(active_backend()) { set_backend(backend); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
  Backend previous_;
};

// Dispatched kernels. Length checks are the caller's job; these assume
// a.size() == b.size() (and == weights.size()).

/// sum_i (a_i - b_i)^2
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// sum_i w_i (a_i - b_i)^2
double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> weights) noexcept;

/// out[r] = squared_distance(query, rows[r*dim .. r*dim+dim)) for every row.
void squared_distances(std::span<const double> query, std::span<const double> rows,
                       std::size_t dim, std::span<double> out) noexcept;

// Explicit implementations, exposed for equivalence tests and benchmarks.
namespace scalar {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) noexcept;
void squared_distances(const double* query, const double* rows, std::size_t dim,
                       std::size_t count, double* out) noexcept;
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CADML_HAVE_AVX2_KERNELS 1
namespace avx2 {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) noexcept;
void squared_distances(const double* query, const double* rows, std::size_t dim,
                       std::size_t count, double* out) noexcept;
} // namespace avx2
#endif

} // namespace cadml::simd
