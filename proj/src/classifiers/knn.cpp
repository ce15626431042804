#include "cadml/classifiers/knn.hpp"

#include "cadml/error.hpp"
#include "cadml/simd/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cadml {

double euclidean_distance(std::span<const double> x, std::span<const double> p) {
  if (x.size() != p.size())
    throw Error(ErrorCode::LengthMismatch, "vectors of length " + std::to_string(x.size()) +
                                               " and " + std::to_string(p.size()));
  return std::sqrt(simd::squared_distance(x, p));
}

KnnModel::KnnModel(std::vector<FeatureSchema> schema, std::vector<double> exemplars,
                   std::vector<Label> labels, int k)
    : schema_(std::move(schema)), exemplars_(std::move(exemplars)), labels_(std::move(labels)),
      k_(k) {
  validate(KnnParams{k});
  if (exemplars_.size() != labels_.size() * schema_.size())
    throw Error(ErrorCode::InvalidModel, "exemplar matrix does not match label count");
  if (static_cast<std::size_t>(k) > labels_.size())
    throw Error(ErrorCode::InvalidHyperParams, "k=" + std::to_string(k) + " exceeds the " +
                                                   std::to_string(labels_.size()) + " exemplars");
}

KnnModel knn_fit(const Dataset& ds, const KnnParams& params) {
  validate(params);
  const auto [negatives, positives] = ds.class_counts();
  if (negatives == 0 || positives == 0)
    throw Error(ErrorCode::SingleClassData, "k-NN needs both classes");
  return KnnModel(ds.schema(), {ds.values().begin(), ds.values().end()},
                  {ds.labels().begin(), ds.labels().end()}, params.k);
}

std::vector<Neighbor> knn_neighbors(const KnnModel& model, std::span<const double> x) {
  if (x.size() != model.num_features())
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(model.num_features()) +
                                               " features, got " + std::to_string(x.size()));
  const std::size_t n = model.num_exemplars();
  std::vector<double> squared(n);
  simd::squared_distances(x, model.exemplars(), model.num_features(), squared);

  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i)
    all[i] = {i, std::sqrt(squared[i])};
  const auto k = static_cast<std::size_t>(model.k());
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return all;
}

Label knn_predict(const KnnModel& model, std::span<const double> x) {
  std::array<std::size_t, 2> votes{0, 0};
  std::array<double, 2> summed{0.0, 0.0};
  for (const auto& nb : knn_neighbors(model, x)) {
    const auto c = static_cast<std::size_t>(model.labels()[nb.index]);
    ++votes[c];
    summed[c] += nb.distance;
  }
  if (votes[0] != votes[1])
    return votes[1] > votes[0] ? 1 : 0;
  return summed[1] < summed[0] ? 1 : 0;
}

} // namespace cadml
