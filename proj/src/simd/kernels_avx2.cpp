// Compiled with -mavx2 -mfma; only reached through the dispatcher after a
// CPUID check.

#include "cadml/simd/kernels.hpp"

#include <immintrin.h>

namespace cadml::simd::avx2 {

namespace {

inline double horizontal_sum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

} // namespace

double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, acc);
  }
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += w[i] * d * d;
  }
  return sum;
}

// Four rows per step: lane r holds row (base + r), so each row is summed
// sequentially over its coordinates and no horizontal reduction is needed.
// Good for the narrow feature vectors this library sees (dim ~ 7..13).
void squared_distances(const double* query, const double* rows, std::size_t dim,
                       std::size_t count, double* out) noexcept {
  std::size_t r = 0;
  const auto stride = static_cast<long long>(dim);
  const __m256i offsets = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  for (; r + 4 <= count; r += 4) {
    const double* base = rows + r * dim;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < dim; ++j) {
      const __m256d v = _mm256_i64gather_pd(base + j, offsets, 8);
      const __m256d d = _mm256_sub_pd(v, _mm256_broadcast_sd(query + j));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    _mm256_storeu_pd(out + r, acc);
  }
  for (; r < count; ++r)
    out[r] = squared_distance(query, rows + r * dim, dim);
}

} // namespace cadml::simd::avx2
