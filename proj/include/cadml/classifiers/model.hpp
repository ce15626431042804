#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/classifiers/knn.hpp"
#include "cadml/classifiers/naive_bayes.hpp"
#include "cadml/classifiers/svm.hpp"
#include "cadml/dataset.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace cadml {

using ClassifierState = std::variant<NbModel, SvmModel, KnnModel>;

/// A fitted classifier together with the input scaling it was trained under.
/// predict() takes feature vectors in the original (unscaled) units.
struct TrainedModel {
  HyperParams params;
  /// Schema of the raw inputs.
  std::vector<FeatureSchema> schema;
  std::optional<ScalingStats> scaling;
  ClassifierState state;

  Algorithm algorithm() const noexcept { return algorithm_of(params); }
  std::size_t num_features() const noexcept { return schema.size(); }
};

/// Whether standardization applies to this algorithm when scaling is enabled.
/// Only the distance-based learners (SVM, k-NN) are scaled.
bool uses_scaling(Algorithm algorithm) noexcept;

/// Fits the classifier described by `params`; `scaling` turns on z-scoring of
/// continuous features for SVM and k-NN (stats fit on `train` only).
TrainedModel fit_model(const Dataset& train, const HyperParams& params, bool scaling,
                       const SvmSolverOptions& svm_options = {});

/// Throws LengthMismatch.
Label predict(const TrainedModel& model, std::span<const double> x);

/// Posterior for naive Bayes models; std::nullopt for the others.
std::optional<PosteriorVector> predict_posterior(const TrainedModel& model,
                                                 std::span<const double> x);

std::vector<Label> predict_all(const TrainedModel& model, const Dataset& ds);

} // namespace cadml
