#include "cadml/classifiers/svm.hpp"

#include "cadml/error.hpp"
#include "cadml/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cadml {

double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, "vectors of length " + std::to_string(x.size()) +
                                               " and " + std::to_string(y.size()));
  if (!(sigma > 0.0))
    throw Error(ErrorCode::InvalidHyperParams, "sigma must be > 0");
  return std::exp(-sigma * simd::squared_distance(x, y));
}

SvmModel::SvmModel(std::vector<FeatureSchema> schema, SvmParams params,
                   std::vector<double> support_vectors, std::vector<double> coefficients,
                   double bias, double dual_objective, bool converged, std::size_t iterations)
    : schema_(std::move(schema)), params_(params), support_vectors_(std::move(support_vectors)),
      coefficients_(std::move(coefficients)), bias_(bias), dual_objective_(dual_objective),
      converged_(converged), iterations_(iterations) {
  if (support_vectors_.size() != coefficients_.size() * schema_.size())
    throw Error(ErrorCode::InvalidModel, "support vector matrix does not match coefficient count");
}

namespace {

// Lazily computed rows of the Gram matrix. Rows are kept for problems up to
// kMaxCachedRows points; beyond that every request recomputes.
class KernelRows {
public:
  static constexpr std::size_t kMaxCachedRows = 10'000;

  KernelRows(const Dataset& ds, double sigma)
      : ds_(ds), sigma_(sigma), cache_(ds.num_rows() <= kMaxCachedRows ? ds.num_rows() : 0),
        scratch_(ds.num_rows()) {}

  std::span<const double> row(std::size_t i) {
    if (!cache_.empty()) {
      auto& cached = cache_[i];
      if (cached.empty()) {
        cached.resize(ds_.num_rows());
        compute(i, cached);
      }
      return cached;
    }
    compute(i, scratch_);
    return scratch_;
  }

private:
  void compute(std::size_t i, std::vector<double>& out) const {
    simd::squared_distances(ds_.row(i), ds_.values(), ds_.num_features(), out);
    for (double& v : out)
      v = std::exp(-sigma_ * v);
  }

  const Dataset& ds_;
  double sigma_;
  std::vector<std::vector<double>> cache_;
  std::vector<double> scratch_;
};

double objective_from_gradient(std::span<const double> alpha, std::span<const double> y,
                               std::span<const double> f_cache) {
  // With F_i = sum_j alpha_j y_j K_ij - y_i, the quadratic term is
  // sum_i alpha_i y_i (F_i + y_i).
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    quadratic += alpha[i] * y[i] * (f_cache[i] + y[i]);
  }
  return linear - 0.5 * quadratic;
}

} // namespace

SvmTrainingReport svm_train(const Dataset& ds, const SvmParams& params,
                            const SvmSolverOptions& options) {
  validate(params);
  const auto [negatives, positives] = ds.class_counts();
  if (negatives == 0 || positives == 0)
    throw Error(ErrorCode::SingleClassData, "SVM needs both classes");

  const std::size_t n = ds.num_rows();
  const double C = params.C;
  const double tol = options.tol;

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = ds.label(i) == 1 ? 1.0 : -1.0;
  std::vector<double> alpha(n, 0.0);
  // F_i = sum_j alpha_j y_j K_ij - y_i; the bias cancels in every pair update.
  std::vector<double> f_cache(n);
  for (std::size_t i = 0; i < n; ++i)
    f_cache[i] = -y[i];

  KernelRows kernel(ds, params.sigma);
  std::vector<double> diagonal(n, 1.0); // K(x, x) = 1 for the RBF kernel

  const auto in_up = [&](std::size_t i) {
    return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0);
  };
  const auto in_low = [&](std::size_t i) {
    return (y[i] > 0 && alpha[i] > 0) || (y[i] < 0 && alpha[i] < C);
  };

  SvmTrainingReport report;
  bool converged = false;
  std::size_t iteration = 0;
  double b_up = 0.0;
  double b_low = 0.0;
  for (;;) {
    std::size_t i_up = n;
    std::size_t i_low = n;
    b_up = std::numeric_limits<double>::infinity();
    b_low = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (in_up(i) && f_cache[i] < b_up) {
        b_up = f_cache[i];
        i_up = i;
      }
      if (in_low(i) && f_cache[i] > b_low) {
        b_low = f_cache[i];
        i_low = i;
      }
    }
    if (i_up == n || i_low == n || b_low - b_up <= 2.0 * tol) {
      converged = true;
      break;
    }
    if (iteration == options.max_iterations)
      break;
    ++iteration;

    const std::size_t i1 = i_up;
    const std::size_t i2 = i_low;
    const auto row1 = kernel.row(i1);
    const double k12 = row1[i2];
    double eta = diagonal[i1] + diagonal[i2] - 2.0 * k12;
    if (eta <= 0.0)
      eta = 1e-12;

    const double a1 = alpha[i1];
    const double a2 = alpha[i2];
    const double y1 = y[i1];
    const double y2 = y[i2];
    double lo = 0.0;
    double hi = 0.0;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(C, C + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - C);
      hi = std::min(C, a1 + a2);
    }
    // Rounding residues (alpha ~ 1e-17) would keep a row in a working set
    // it cannot move in, stalling the solver on one pair.
    const auto snap = [C](double a) {
      const double eps = 1e-12 * C;
      if (a <= eps)
        return 0.0;
      if (a >= C - eps)
        return C;
      return a;
    };
    const double a2_new = snap(std::clamp(a2 + y2 * (f_cache[i1] - f_cache[i2]) / eta, lo, hi));
    const double a1_new = snap(a1 + y1 * y2 * (a2 - a2_new));

    const double d1 = (a1_new - a1) * y1;
    const double d2 = (a2_new - a2) * y2;
    alpha[i1] = a1_new;
    alpha[i2] = a2_new;
    const auto r1 = kernel.row(i1);
    for (std::size_t k = 0; k < n; ++k)
      f_cache[k] += d1 * r1[k];
    const auto r2 = kernel.row(i2);
    for (std::size_t k = 0; k < n; ++k)
      f_cache[k] += d2 * r2[k];

    if (options.record_trace)
      report.objective_trace.push_back(objective_from_gradient(alpha, y, f_cache));
  }

  // f(x) = sum alpha y K - b with b midway between the extreme violators.
  double b = 0.0;
  if (std::isfinite(b_up) && std::isfinite(b_low))
    b = 0.5 * (b_up + b_low);
  else if (std::isfinite(b_up))
    b = b_up;
  else if (std::isfinite(b_low))
    b = b_low;

  std::vector<double> support;
  std::vector<double> coefficients;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] <= 0.0)
      continue;
    const auto r = ds.row(i);
    support.insert(support.end(), r.begin(), r.end());
    coefficients.push_back(alpha[i] * y[i]);
  }

  double violation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double margin = y[i] * (f_cache[i] + y[i] - b);
    if (alpha[i] < C)
      violation = std::max(violation, 1.0 - margin);
    if (alpha[i] > 0.0)
      violation = std::max(violation, margin - 1.0);
  }

  const double objective = objective_from_gradient(alpha, y, f_cache);
  report.model = SvmModel(ds.schema(), params, std::move(support), std::move(coefficients), -b,
                          objective, converged, iteration);
  report.alpha = std::move(alpha);
  report.y = std::move(y);
  report.max_kkt_violation = violation;
  return report;
}

SvmModel svm_fit(const Dataset& ds, const SvmParams& params, const SvmSolverOptions& options) {
  return svm_train(ds, params, options).model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.num_features())
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(model.num_features()) +
                                               " features, got " + std::to_string(x.size()));
  const std::size_t count = model.num_support_vectors();
  std::vector<double> squared(count);
  simd::squared_distances(x, model.support_vectors(), model.num_features(), squared);
  double f = 0.0;
  for (std::size_t i = 0; i < count; ++i)
    f += model.coefficients()[i] * std::exp(-model.params().sigma * squared[i]);
  return f + model.bias();
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  return svm_decision(model, x) > 0.0 ? 1 : 0;
}

double svm_dual_objective(const Dataset& ds, double sigma, std::span<const double> alpha) {
  if (alpha.size() != ds.num_rows())
    throw Error(ErrorCode::LengthMismatch, "one alpha per row required");
  double linear = 0.0;
  double quadratic = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    linear += alpha[i];
    const double yi = ds.label(i) == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const double yj = ds.label(j) == 1 ? 1.0 : -1.0;
      quadratic += alpha[i] * alpha[j] * yi * yj * rbf_kernel(ds.row(i), ds.row(j), sigma);
    }
  }
  return linear - 0.5 * quadratic;
}

} // namespace cadml
