#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace cadml {

/// Unbiased integer in [0, bound) from a 64-bit Mersenne Twister by rejection.
/// Used instead of std::uniform_int_distribution, whose output is
/// implementation-defined, so fold partitions are identical across toolchains.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Fisher-Yates shuffle driven by uniform_below.
void shuffle_indices(std::vector<std::size_t>& indices, std::mt19937_64& rng);

struct FoldAssignment {
  std::vector<std::size_t> fold_of_row;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> held_out(std::size_t fold) const;
  std::vector<std::size_t> training(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
  /// FNV-1a hash of (k, fold_of_row); equal assignments hash equally.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

/// Shuffles the rows of each class with std::mt19937_64(seed) (class 0 first,
/// then class 1, one generator stream) and deals them round-robin into k
/// folds, continuing the deal across classes.
///
/// Throws TooFewPerClass when a class has fewer than k rows, unless k equals
/// the row count (leave-one-out). Throws Usage for k < 2 or k > rows.
FoldAssignment stratified_folds(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

/// Positive class is 1.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other) noexcept {
    tp += other.tp;
    fp += other.fp;
    tn += other.tn;
    fn += other.fn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch.
ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

/// The four rates; std::nullopt marks a zero denominator (reported as "n/a").
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> precision;
  ConfusionMatrix matrix;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// accuracy = (TP+TN)/total, recall = TP/(TP+FN), specificity = TN/(TN+FP),
/// precision = TP/(TP+FP). Throws EmptyMatrix.
MetricsReport metrics(const ConfusionMatrix& cm);

struct CVResult {
  std::vector<MetricsReport> per_fold;
  /// Over the union of held-out predictions; its matrix is the sum of the fold matrices.
  MetricsReport pooled;
  /// Unweighted mean of the per-fold accuracies.
  double mean_accuracy = 0.0;
  /// Held-out prediction for every row.
  std::vector<Label> predictions;
  std::uint64_t fold_fingerprint = 0;

  friend bool operator==(const CVResult&, const CVResult&) = default;
};

/// Trains on the first dataset and returns one label per row of the second.
using FitPredict = std::function<std::vector<Label>(const Dataset& train, const Dataset& test)>;

/// Generic k-fold driver. `learner` only ever sees the training rows of a fold.
CVResult cross_validate(const Dataset& ds, const FoldAssignment& folds, const FitPredict& learner);

/// Cross-validates one hyperparameter setting; scaling stats are refit on
/// each training split.
CVResult cross_validate(const Dataset& ds, const HyperParams& params, const FoldAssignment& folds,
                        bool scaling);
CVResult cross_validate(const Dataset& ds, const HyperParams& params, std::size_t k,
                        std::uint64_t seed, bool scaling);

} // namespace cadml
