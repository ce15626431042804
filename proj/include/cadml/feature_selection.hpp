#pragma once

#include "cadml/classifiers/hyperparams.hpp"
#include "cadml/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cadml {

struct FeatureScore {
  std::string feature;
  /// Bits for information gain, |r| for correlation.
  double score = 0.0;

  friend bool operator==(const FeatureScore&, const FeatureScore&) = default;
};

/// Sorted by descending score; equal scores keep schema order.
struct RankedList {
  std::vector<FeatureScore> entries;

  std::vector<std::string> top(std::size_t n) const;
  std::vector<std::string> above(double threshold) const;
  /// 0-based rank of the feature; throws UnknownFeature.
  std::size_t position(std::string_view feature) const;
};

enum class Evaluator { info_gain, correlation };

std::string_view to_string(Evaluator evaluator) noexcept;
Evaluator evaluator_from_string(std::string_view text);

/// Shannon entropy in bits. Throws EmptyInput.
double entropy(std::span<const Label> labels);

/// Supervised cut points from recursive minimum-entropy splitting with the
/// MDL acceptance test. Empty when no split is accepted.
std::vector<double> discretize_mdl(std::span<const double> feature, std::span<const Label> labels);

/// H(labels) - sum_b |b|/N H(labels | b). Continuous features are binned by
/// discretize_mdl; other kinds use their codes as bins. Throws EmptyInput,
/// LengthMismatch.
double info_gain(std::span<const double> feature, std::span<const Label> labels, FeatureKind kind);

/// |Pearson r| between the feature and the 0/1 labels; 0 for a constant column.
/// Throws EmptyInput (fewer than 2 rows), LengthMismatch.
double correlation_score(std::span<const double> feature, std::span<const Label> labels);

/// Requires at least 2 rows and both classes (SingleClassData otherwise).
RankedList rank_features(const Dataset& ds, Evaluator evaluator);

struct SubsetSearchResult {
  /// Selected feature names, in schema order.
  std::vector<std::string> selected;
  /// Mean cross-validated accuracy of the wrapped classifier on `selected`.
  double objective = 0.0;
  /// Number of subsets evaluated.
  std::size_t expansions = 0;
};

inline constexpr std::size_t kUnlimitedStale = std::numeric_limits<std::size_t>::max();

/// Best-first search over feature subsets from the empty set, children formed
/// by adding or removing one feature. Each subset is scored by mean k-fold
/// accuracy of `wrapped` on one shared fold assignment (the empty subset
/// scores the majority-class predictor). Stops after `stale_limit`
/// consecutive node expansions without improvement or when the open list
/// runs dry. At most 64 features.
SubsetSearchResult best_first_subset(const Dataset& ds, const HyperParams& wrapped,
                                     std::size_t folds, std::uint64_t seed,
                                     std::size_t stale_limit = 5, bool scaling = true);

/// Keeps a feature if it is in the top `top_n` of either ranking or in the
/// wrapper subset. Returned in schema order.
std::vector<std::string> aggregate_selection(const Dataset& ds, const RankedList& info_gain,
                                             const RankedList& correlation,
                                             const SubsetSearchResult& subset,
                                             std::size_t top_n = 7);

} // namespace cadml
