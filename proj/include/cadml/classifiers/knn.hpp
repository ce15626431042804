#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/dataset.hpp"

#include <span>
#include <vector>

namespace cadml {

/// sqrt(sum_i (x_i - p_i)^2). Throws LengthMismatch.
double euclidean_distance(std::span<const double> x, std::span<const double> p);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Stored training exemplars plus k.
class KnnModel {
public:
  KnnModel() = default;
  /// Throws InvalidHyperParams when k is even, non-positive or exceeds the exemplar count.
  KnnModel(std::vector<FeatureSchema> schema, std::vector<double> exemplars,
           std::vector<Label> labels, int k);

  const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }
  std::size_t num_features() const noexcept { return schema_.size(); }
  std::size_t num_exemplars() const noexcept { return labels_.size(); }
  int k() const noexcept { return k_; }
  std::span<const double> exemplars() const noexcept { return exemplars_; }
  std::span<const Label> labels() const noexcept { return labels_; }

private:
  std::vector<FeatureSchema> schema_;
  std::vector<double> exemplars_;
  std::vector<Label> labels_;
  int k_ = 1;
};

/// Throws SingleClassData, InvalidHyperParams.
KnnModel knn_fit(const Dataset& ds, const KnnParams& params);

/// The k nearest exemplars, closest first; equal distances keep exemplar order.
std::vector<Neighbor> knn_neighbors(const KnnModel& model, std::span<const double> x);

/// Majority class of the k nearest exemplars. A tied vote goes to the class
/// with the smaller summed distance, then to class 0. Throws LengthMismatch.
Label knn_predict(const KnnModel& model, std::span<const double> x);

} // namespace cadml
