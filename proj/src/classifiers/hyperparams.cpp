#include "cadml/classifiers/hyperparams.hpp"

#include "cadml/error.hpp"

#include <cmath>
#include <sstream>

namespace cadml {

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
  case Algorithm::naive_bayes:
    return "nb";
  case Algorithm::svm:
    return "svm";
  case Algorithm::knn:
    return "knn";
  }
  return "nb";
}

Algorithm algorithm_from_string(std::string_view text) {
  if (text == "nb" || text == "naive_bayes")
    return Algorithm::naive_bayes;
  if (text == "svm")
    return Algorithm::svm;
  if (text == "knn")
    return Algorithm::knn;
  throw Error(ErrorCode::Usage, "unknown algorithm '" + std::string(text) + "'");
}

Algorithm algorithm_of(const HyperParams& params) noexcept {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NbParams>)
          return Algorithm::naive_bayes;
        else if constexpr (std::is_same_v<T, SvmParams>)
          return Algorithm::svm;
        else
          return Algorithm::knn;
      },
      params);
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok)
    throw Error(ErrorCode::InvalidHyperParams, message);
}

} // namespace

void validate(const HyperParams& params) {
  if (const auto* nb = std::get_if<NbParams>(&params)) {
    require(std::isfinite(nb->laplace) && nb->laplace >= 0.0, "laplace must be >= 0");
    require(std::isfinite(nb->bandwidth_adjust) && nb->bandwidth_adjust > 0.0,
            "bandwidth_adjust must be > 0");
  } else if (const auto* svm = std::get_if<SvmParams>(&params)) {
    require(std::isfinite(svm->C) && svm->C > 0.0, "C must be > 0");
    require(std::isfinite(svm->sigma) && svm->sigma > 0.0, "sigma must be > 0");
  } else if (const auto* knn = std::get_if<KnnParams>(&params)) {
    require(knn->k > 0 && knn->k % 2 == 1, "k must be a positive odd integer, got " +
                                               std::to_string(knn->k));
  }
}

std::string describe(const HyperParams& params) {
  std::ostringstream out;
  out.precision(10);
  if (const auto* nb = std::get_if<NbParams>(&params))
    out << "kernel=" << (nb->use_kernel_density ? "true" : "false") << " laplace=" << nb->laplace
        << " adjust=" << nb->bandwidth_adjust;
  else if (const auto* svm = std::get_if<SvmParams>(&params))
    out << "C=" << svm->C << " sigma=" << svm->sigma;
  else if (const auto* knn = std::get_if<KnnParams>(&params))
    out << "k=" << knn->k;
  return out.str();
}

} // namespace cadml
