#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/dataset.hpp"

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace cadml {

/// Per-class probability P(class | x); components sum to 1.
struct PosteriorVector {
  std::array<double, 2> probability{0.5, 0.5};

  double operator[](Label c) const noexcept { return probability[static_cast<std::size_t>(c)]; }
};

/// Gaussian likelihood of a continuous feature.
struct GaussianLikelihood {
  double mean = 0.0;
  double variance = 1.0;
};

/// Gaussian kernel density estimate of a continuous feature.
struct KernelDensityLikelihood {
  std::vector<double> samples;
  double bandwidth = 1.0;
};

/// Frequency table of a finite-domain feature.
struct FrequencyLikelihood {
  std::vector<double> values;
  std::vector<double> probabilities;
};

using FeatureLikelihood =
    std::variant<GaussianLikelihood, KernelDensityLikelihood, FrequencyLikelihood>;

/// Probabilities below this are clamped; a value never seen with a class
/// would otherwise veto that class outright.
inline constexpr double kMinCategoricalProbability = 1e-3;

/// Fitted naive Bayes model: class priors and one likelihood per (class, feature).
class NbModel {
public:
  NbModel() = default;
  NbModel(std::vector<FeatureSchema> schema, NbParams params, std::array<double, 2> priors,
          std::array<std::vector<FeatureLikelihood>, 2> likelihoods);

  const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }
  const NbParams& params() const noexcept { return params_; }
  const std::array<double, 2>& priors() const noexcept { return priors_; }
  const std::vector<FeatureLikelihood>& likelihoods(Label c) const noexcept {
    return likelihoods_[static_cast<std::size_t>(c)];
  }

  /// log P(c) + sum_f log p(x_f | c), for both classes.
  std::array<double, 2> log_joint(std::span<const double> x) const;

private:
  std::vector<FeatureSchema> schema_;
  NbParams params_;
  std::array<double, 2> priors_{0.5, 0.5};
  std::array<std::vector<FeatureLikelihood>, 2> likelihoods_;

  // Gaussian features are scored together through the SIMD kernel.
  std::vector<std::size_t> gaussian_features_;
  std::array<std::vector<double>, 2> gaussian_means_;
  std::array<std::vector<double>, 2> gaussian_weights_;
  std::array<double, 2> gaussian_log_norm_{0.0, 0.0};
};

/// Throws SingleClassData, TooFewRows (< 2 rows in a class), InvalidHyperParams.
NbModel nb_fit(const Dataset& ds, const NbParams& params);

/// Throws LengthMismatch.
PosteriorVector nb_posterior(const NbModel& model, std::span<const double> x);

/// argmax of the posterior; an exact tie goes to class 0.
Label nb_predict(const NbModel& model, std::span<const double> x);

/// Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5), with the usual
/// fallbacks when that scale is zero.
double silverman_bandwidth(std::span<const double> samples);

} // namespace cadml
