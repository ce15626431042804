#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace cadml {

enum class Algorithm { naive_bayes, svm, knn };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "nb"/"naive_bayes", "svm", "knn". Throws Usage.
Algorithm algorithm_from_string(std::string_view text);

struct NbParams {
  bool use_kernel_density = false;
  /// Additive smoothing for finite-domain features.
  double laplace = 0.0;
  /// Multiplier on the rule-of-thumb KDE bandwidth.
  double bandwidth_adjust = 1.0;

  friend bool operator==(const NbParams&, const NbParams&) = default;
};

struct KnnParams {
  int k = 5;

  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

/// RBF kernel exp(-sigma * |x - y|^2) soft-margin SVM.
struct SvmParams {
  double C = 1.0;
  double sigma = 0.1268408;

  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

using HyperParams = std::variant<NbParams, SvmParams, KnnParams>;

Algorithm algorithm_of(const HyperParams& params) noexcept;

/// Throws InvalidHyperParams: k must be odd and positive; C, sigma, bandwidth_adjust > 0;
/// laplace >= 0.
void validate(const HyperParams& params);

/// Short human-readable form, e.g. "C=0.25 sigma=0.1268408".
std::string describe(const HyperParams& params);

} // namespace cadml
