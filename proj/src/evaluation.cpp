#include "cadml/evaluation.hpp"

#include "cadml/classifiers/model.hpp"
#include "cadml/error.hpp"

#include <limits>

namespace cadml {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0)
    return 0;
  // Largest multiple of bound representable; draws at or above it are rejected.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = rng();
  while (draw >= limit)
    draw = rng();
  return draw % bound;
}

void shuffle_indices(std::vector<std::size_t>& indices, std::mt19937_64& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(indices[i - 1], indices[j]);
  }
}

std::vector<std::size_t> FoldAssignment::held_out(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r)
    if (fold_of_row[r] == fold)
      rows.push_back(r);
  return rows;
}

std::vector<std::size_t> FoldAssignment::training(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of_row.size(); ++r)
    if (fold_of_row[r] != fold)
      rows.push_back(r);
  return rows;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_of_row)
    ++sizes[f];
  return sizes;
}

std::uint64_t FoldAssignment::fingerprint() const noexcept {
  std::uint64_t hash = 14695981039346656037ULL;
  const auto mix = [&hash](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (v >> (8 * byte)) & 0xFFU;
      hash *= 1099511628211ULL;
    }
  };
  mix(k);
  for (auto f : fold_of_row)
    mix(f);
  return hash;
}

FoldAssignment stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2)
    throw Error(ErrorCode::Usage, "fold count must be at least 2");
  if (k > n)
    throw Error(ErrorCode::Usage, "fold count " + std::to_string(k) + " exceeds " +
                                      std::to_string(n) + " rows");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t r = 0; r < n; ++r)
    by_class[static_cast<std::size_t>(labels[r])].push_back(r);
  if (k < n)
    for (std::size_t c = 0; c < 2; ++c)
      if (by_class[c].size() < k)
        throw Error(ErrorCode::TooFewPerClass,
                    "class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                        " rows, fewer than k=" + std::to_string(k));

  std::mt19937_64 rng(seed);
  FoldAssignment out{std::vector<std::size_t>(n, 0), k, seed};
  std::size_t deal = 0;
  for (auto& rows : by_class) {
    shuffle_indices(rows, rng);
    for (std::size_t r : rows)
      out.fold_of_row[r] = deal++ % k;
  }
  return out;
}

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions for " +
                                               std::to_string(actual.size()) + " labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 1)
      ++(predicted[i] == 1 ? cm.tp : cm.fn);
    else
      ++(predicted[i] == 1 ? cm.fp : cm.tn);
  }
  return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0)
    return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0)
    throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no entries");
  return {ratio(cm.tp + cm.tn, cm.total()), ratio(cm.tp, cm.tp + cm.fn),
          ratio(cm.tn, cm.tn + cm.fp), ratio(cm.tp, cm.tp + cm.fp), cm};
}

CVResult cross_validate(const Dataset& ds, const FoldAssignment& folds, const FitPredict& learner) {
  if (folds.fold_of_row.size() != ds.num_rows())
    throw Error(ErrorCode::LengthMismatch, "fold assignment does not cover the dataset");
  CVResult result;
  result.predictions.assign(ds.num_rows(), 0);
  result.fold_fingerprint = folds.fingerprint();
  ConfusionMatrix pooled;
  double accuracy_sum = 0.0;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto test_rows = folds.held_out(f);
    const auto train_rows = folds.training(f);
    const Dataset train = ds.subset_rows(train_rows);
    const Dataset test = ds.subset_rows(test_rows);
    const auto predicted = learner(train, test);
    if (predicted.size() != test_rows.size())
      throw Error(ErrorCode::LengthMismatch, "learner returned the wrong number of predictions");
    for (std::size_t i = 0; i < test_rows.size(); ++i)
      result.predictions[test_rows[i]] = predicted[i];
    const auto cm = confusion(predicted, test.labels());
    pooled += cm;
    result.per_fold.push_back(metrics(cm));
    accuracy_sum += *result.per_fold.back().accuracy;
  }
  result.pooled = metrics(pooled);
  result.mean_accuracy = accuracy_sum / static_cast<double>(folds.k);
  return result;
}

CVResult cross_validate(const Dataset& ds, const HyperParams& params, const FoldAssignment& folds,
                        bool scaling) {
  validate(params);
  return cross_validate(ds, folds, [&](const Dataset& train, const Dataset& test) {
    return predict_all(fit_model(train, params, scaling), test);
  });
}

CVResult cross_validate(const Dataset& ds, const HyperParams& params, std::size_t k,
                        std::uint64_t seed, bool scaling) {
  return cross_validate(ds, params, stratified_folds(ds.labels(), k, seed), scaling);
}

} // namespace cadml
