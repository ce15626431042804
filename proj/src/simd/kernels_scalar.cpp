#include "cadml/simd/kernels.hpp"

namespace cadml::simd::scalar {

double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += w[i] * d * d;
  }
  return sum;
}

void squared_distances(const double* query, const double* rows, std::size_t dim,
                       std::size_t count, double* out) noexcept {
  for (std::size_t r = 0; r < count; ++r)
    out[r] = squared_distance(query, rows + r * dim, dim);
}

} // namespace cadml::simd::scalar
