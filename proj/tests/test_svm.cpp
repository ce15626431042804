#include "cadml/classifiers/svm.hpp"
#include "cadml/error.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cadml;

namespace {

/// Projected gradient ascent on the dual, projecting onto
/// {0 <= a <= C, sum a_i y_i = 0} by bisection on the multiplier.
std::vector<double> qp_oracle(const Dataset& ds, double C, double sigma) {
  const std::size_t n = ds.num_rows();
  std::vector<double> y(n), q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = ds.label(i) == 1 ? 1.0 : -1.0;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < ds.num_features(); ++f)
        d2 += (ds.row(i)[f] - ds.row(j)[f]) * (ds.row(i)[f] - ds.row(j)[f]);
      q[i * n + j] = y[i] * y[j] * std::exp(-sigma * d2);
    }
  for (std::size_t i = 0; i < n; ++i)
    trace += q[i * n + i];

  const auto project = [&](std::vector<double> v) {
    const auto at = [&](double lambda) {
      std::vector<double> a(n);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::clamp(v[i] - lambda * y[i], 0.0, C);
        s += a[i] * y[i];
      }
      return std::pair{a, s};
    };
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (at(mid).second > 0.0 ? lo : hi) = mid;
    }
    return at(0.5 * (lo + hi)).first;
  };

  std::vector<double> a(n, 0.0);
  const double step = 1.0 / trace;
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> g(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        g[i] -= q[i * n + j] * a[j];
    for (std::size_t i = 0; i < n; ++i)
      g[i] = a[i] + step * g[i];
    a = project(g);
  }
  return a;
}

Dataset xor_like() {
  return Dataset::from_rows({{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.2}}, {0, 0, 1, 1});
}

} // namespace

TEST_CASE("rbf kernel") {
  const std::vector<double> x{1.0, 2.0}, y{1.0, 3.0}, z{10.0, -3.0};
  CHECK(rbf_kernel(x, x, 0.5) == 1.0);
  CHECK(rbf_kernel(x, y, 0.1268408) == doctest::Approx(0.880873).epsilon(1e-6));
  CHECK(rbf_kernel(x, z, 0.5) < rbf_kernel(x, y, 0.5));
  CHECK(rbf_kernel(x, z, 50.0) == 0.0);
  CHECK_THROWS_AS(rbf_kernel(x, std::vector<double>{1.0}, 0.5), Error);
  CHECK_THROWS_AS(rbf_kernel(x, y, 0.0), Error);
}

TEST_CASE("two symmetric points") {
  const auto ds = Dataset::from_rows({{-1.0}, {1.0}}, {0, 1});
  const auto report = svm_train(ds, SvmParams{1000.0, 0.1268408});
  const auto& m = report.model;
  CHECK(m.converged());
  CHECK(m.num_support_vectors() == 2);
  CHECK(report.alpha[0] == doctest::Approx(report.alpha[1]));
  const std::vector<double> zero{0.0}, plus{1.0}, minus{-1.0};
  CHECK(std::abs(svm_decision(m, zero)) < 1e-12);
  CHECK(svm_decision(m, plus) > 0.0);
  CHECK(svm_predict(m, plus) == 1);
  CHECK(svm_predict(m, minus) == 0);
  CHECK(svm_decision(m, plus) == doctest::Approx(1.0).epsilon(1e-3));

  // An exactly zero decision value goes to class 0.
  const SvmModel tie(ds.schema(), SvmParams{}, {-1.0, 1.0}, {-1.0, 1.0}, 0.0, 0.0, true, 0);
  CHECK(svm_decision(tie, zero) == 0.0);
  CHECK(svm_predict(tie, zero) == 0);
  CHECK_THROWS_AS(svm_decision(m, std::vector<double>{0.0, 1.0}), Error);
}

TEST_CASE("separable toy set") {
  const auto ds = Dataset::from_rows(
      {{0.0, 0.0}, {0.5, 0.3}, {0.2, 0.9}, {4.0, 4.0}, {4.5, 3.7}, {3.8, 4.4}}, {0, 0, 0, 1, 1, 1});
  const auto m = svm_fit(ds, SvmParams{100.0, 0.5});
  for (std::size_t r = 0; r < ds.num_rows(); ++r)
    CHECK(svm_predict(m, ds.row(r)) == ds.label(r));
  CHECK_THROWS_AS(svm_fit(Dataset::from_rows({{0.0}, {1.0}}, {1, 1}), SvmParams{}), Error);
}

TEST_CASE("xor-like instance matches a QP oracle") {
  const auto ds = xor_like();
  for (double C : {0.5, 10.0}) {
    CAPTURE(C);
    const double sigma = 1.3;
    const auto oracle = qp_oracle(ds, C, sigma);
    const auto report = svm_train(ds, SvmParams{C, sigma}, SvmSolverOptions{1e-6});
    CHECK(report.model.dual_objective() ==
          doctest::Approx(svm_dual_objective(ds, sigma, oracle)).epsilon(1e-4));
    CHECK(svm_dual_objective(ds, sigma, report.alpha) ==
          doctest::Approx(report.model.dual_objective()).epsilon(1e-10));
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(report.alpha[i] == doctest::Approx(oracle[i]).epsilon(1e-3));
    // The two oracles agree with each other.
    CHECK(testing::svm_dual_oracle(ds, C, sigma).objective ==
          doctest::Approx(svm_dual_objective(ds, sigma, oracle)).epsilon(1e-6));

    // Free support vectors sit on the margin.
    for (std::size_t i = 0; i < 4; ++i)
      if (report.alpha[i] > 1e-9 && report.alpha[i] < C - 1e-9)
        CHECK(std::abs(report.y[i] * svm_decision(report.model, ds.row(i)) - 1.0) <= 1e-6);
  }
}

TEST_CASE("solver postconditions on random data") {
  std::mt19937_64 rng(2018);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ds = testing::gaussian_blobs(rng, 40, 4, 1.0);
    const double C = 0.25 * (trial + 1);
    const SvmSolverOptions options{1e-3, 1'000'000, true};
    const auto report = svm_train(ds, SvmParams{C, 0.2}, options);
    REQUIRE(report.model.converged());

    double balance = 0.0;
    for (std::size_t i = 0; i < report.alpha.size(); ++i) {
      CHECK(report.alpha[i] >= 0.0);
      CHECK(report.alpha[i] <= C);
      balance += report.alpha[i] * report.y[i];
    }
    CHECK(std::abs(balance) <= 1e-8);
    CHECK(report.max_kkt_violation <= options.tol);

    REQUIRE_FALSE(report.objective_trace.empty());
    for (std::size_t i = 1; i < report.objective_trace.size(); ++i)
      REQUIRE(report.objective_trace[i] >=
              report.objective_trace[i - 1] - 1e-12 * std::abs(report.objective_trace[i - 1]));
    CHECK(report.objective_trace.back() ==
          doctest::Approx(svm_dual_objective(ds, 0.2, report.alpha)).epsilon(1e-9));

    std::size_t nonzero = 0;
    for (double a : report.alpha)
      nonzero += a > 0.0;
    CHECK(report.model.num_support_vectors() == nonzero);
  }
}

TEST_CASE("translation invariance") {
  std::mt19937_64 rng(3);
  const auto ds = testing::gaussian_blobs(rng, 30, 3, 1.2);
  const std::vector<double> shift{5.0, -2.0, 100.0};
  std::vector<double> moved(ds.values().begin(), ds.values().end());
  for (std::size_t i = 0; i < moved.size(); ++i)
    moved[i] += shift[i % 3];
  const Dataset shifted(ds.schema(), moved, {ds.labels().begin(), ds.labels().end()});
  const auto a = svm_fit(ds, SvmParams{1.0, 0.3});
  const auto b = svm_fit(shifted, SvmParams{1.0, 0.3});
  for (int q = 0; q < 50; ++q) {
    auto x = testing::random_vector(rng, 3, -3.0, 4.0);
    const double fa = svm_decision(a, x);
    for (std::size_t f = 0; f < 3; ++f)
      x[f] += shift[f];
    CHECK(svm_decision(b, x) == doctest::Approx(fa).epsilon(1e-6));
  }
}

TEST_CASE("iteration cap is reported") {
  std::mt19937_64 rng(9);
  const auto ds = testing::gaussian_blobs(rng, 50, 3, 0.3);
  const auto m = svm_fit(ds, SvmParams{10.0, 0.5}, SvmSolverOptions{1e-3, 2});
  CHECK_FALSE(m.converged());
  CHECK(m.iterations() == 2);
}
