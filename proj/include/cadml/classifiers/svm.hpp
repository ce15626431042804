#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/dataset.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cadml {

/// exp(-sigma * |x - y|^2). Throws LengthMismatch, InvalidHyperParams (sigma <= 0).
double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma);

struct SvmSolverOptions {
  /// KKT tolerance on y_i f(x_i).
  double tol = 1e-3;
  std::size_t max_iterations = 1'000'000;
  /// Record the dual objective after every pair update.
  bool record_trace = false;
};

/// Support vectors with their signed dual coefficients alpha_i * y_i.
class SvmModel {
public:
  SvmModel() = default;
  SvmModel(std::vector<FeatureSchema> schema, SvmParams params, std::vector<double> support_vectors,
           std::vector<double> coefficients, double bias, double dual_objective, bool converged,
           std::size_t iterations);

  const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }
  std::size_t num_features() const noexcept { return schema_.size(); }
  const SvmParams& params() const noexcept { return params_; }
  std::size_t num_support_vectors() const noexcept { return coefficients_.size(); }
  std::span<const double> support_vectors() const noexcept { return support_vectors_; }
  std::span<const double> support_vector(std::size_t i) const noexcept {
    return {support_vectors_.data() + i * schema_.size(), schema_.size()};
  }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  double bias() const noexcept { return bias_; }
  double dual_objective() const noexcept { return dual_objective_; }
  /// False when the solver hit its iteration cap before meeting the tolerance.
  bool converged() const noexcept { return converged_; }
  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::vector<FeatureSchema> schema_;
  SvmParams params_;
  std::vector<double> support_vectors_;
  std::vector<double> coefficients_;
  double bias_ = 0.0;
  double dual_objective_ = 0.0;
  bool converged_ = true;
  std::size_t iterations_ = 0;
};

/// Everything the solver knows at return, for diagnostics and tests.
struct SvmTrainingReport {
  SvmModel model;
  /// Dual variable of every training row, in row order.
  std::vector<double> alpha;
  /// Labels in {-1, +1}, in row order.
  std::vector<double> y;
  /// Largest KKT violation of y_i f(x_i) over all rows.
  double max_kkt_violation = 0.0;
  /// Dual objective after each update (only with record_trace).
  std::vector<double> objective_trace;
};

/// Soft-margin dual solved by SMO, picking the maximal violating pair each
/// step. Labels map 0 -> -1, 1 -> +1. Throws SingleClassData; non-convergence
/// is reported through model.converged().
SvmTrainingReport svm_train(const Dataset& ds, const SvmParams& params,
                            const SvmSolverOptions& options = {});

SvmModel svm_fit(const Dataset& ds, const SvmParams& params, const SvmSolverOptions& options = {});

/// f(x) = sum_i alpha_i y_i K(x_i, x) + b. Throws LengthMismatch.
double svm_decision(const SvmModel& model, std::span<const double> x);

/// 1 when f(x) > 0, otherwise 0.
Label svm_predict(const SvmModel& model, std::span<const double> x);

/// sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij, computed directly.
double svm_dual_objective(const Dataset& ds, double sigma, std::span<const double> alpha);

} // namespace cadml
