#include "cadml/simd/kernels.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace cadml;
using cadml::testing::close_rel;
using cadml::testing::random_vector;

TEST_CASE("scalar reference kernels") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 6, 3};
  const std::vector<double> w{2, 0.5, 7};
  CHECK(simd::scalar::squared_distance(a.data(), b.data(), 3) == 25.0);
  CHECK(simd::scalar::weighted_squared_distance(a.data(), b.data(), w.data(), 3) == 26.0);
  CHECK(simd::scalar::squared_distance(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("backend selection") {
  CHECK(simd::backend_available(simd::Backend::scalar));
  {
    simd::ScopedBackend scoped(simd::Backend::scalar);
    CHECK(simd::active_backend() == simd::Backend::scalar);
  }
  if (!simd::backend_available(simd::Backend::avx2))
    CHECK_THROWS(simd::set_backend(simd::Backend::avx2));
}

#ifdef CADML_HAVE_AVX2_KERNELS
TEST_CASE("avx2 kernels match the scalar reference") {
  if (!simd::backend_available(simd::Backend::avx2)) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n <= 41; ++n) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const auto w = random_vector(rng, n, 0.0, 3.0);
    CHECK(close_rel(simd::avx2::squared_distance(a.data(), b.data(), n),
                    simd::scalar::squared_distance(a.data(), b.data(), n), 1e-12));
    CHECK(close_rel(simd::avx2::weighted_squared_distance(a.data(), b.data(), w.data(), n),
                    simd::scalar::weighted_squared_distance(a.data(), b.data(), w.data(), n),
                    1e-12));
  }
  for (std::size_t dim = 1; dim <= 14; ++dim)
    for (std::size_t count = 0; count <= 11; ++count) {
      const auto q = random_vector(rng, dim);
      const auto rows = random_vector(rng, dim * count);
      std::vector<double> fast(count), slow(count);
      simd::avx2::squared_distances(q.data(), rows.data(), dim, count, fast.data());
      simd::scalar::squared_distances(q.data(), rows.data(), dim, count, slow.data());
      for (std::size_t r = 0; r < count; ++r)
        CHECK(close_rel(fast[r], slow[r], 1e-12));
    }
}

TEST_CASE("dispatched kernels follow the active backend") {
  if (!simd::backend_available(simd::Backend::avx2))
    return;
  std::mt19937_64 rng(11);
  const auto q = random_vector(rng, 7);
  const auto rows = random_vector(rng, 7 * 9);
  std::vector<double> via_avx(9), via_scalar(9);
  {
    simd::ScopedBackend scoped(simd::Backend::avx2);
    simd::squared_distances(q, rows, 7, via_avx);
  }
  {
    simd::ScopedBackend scoped(simd::Backend::scalar);
    simd::squared_distances(q, rows, 7, via_scalar);
  }
  for (std::size_t r = 0; r < 9; ++r) {
    CHECK(via_scalar[r] ==
          simd::scalar::squared_distance(q.data(), rows.data() + r * 7, 7));
    CHECK(close_rel(via_avx[r], via_scalar[r], 1e-12));
  }
}
#endif
