#pragma once

#include "cadml/classifiers/model.hpp"
#include "cadml/evaluation.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cadml {

struct Grid {
  Algorithm algorithm = Algorithm::naive_bayes;
  /// Candidates in declaration order; order decides ties.
  std::vector<HyperParams> candidates;
};

/// Throws InvalidHyperParams when the grid is empty, mixes algorithms or
/// contains an invalid candidate.
void validate(const Grid& grid);

/// The tested grids: NB kernel in {true, false} (laplace 0, adjust 1);
/// SVM C in {0.25, 0.5, 1.0} with sigma 0.1268408; k-NN k in {5, 7, 9}.
Grid default_grid(Algorithm algorithm);
/// One grid per algorithm, in the order NB, SVM, k-NN.
std::vector<Grid> default_grids();

struct CandidateResult {
  HyperParams params;
  double mean_accuracy = 0.0;
  /// Empty when the candidate failed; see `error`.
  std::optional<CVResult> cv;
  std::optional<std::string> error;
};

struct TuneResult {
  Algorithm algorithm = Algorithm::naive_bayes;
  std::vector<CandidateResult> candidates;
  std::size_t best_index = 0;
  HyperParams best;
  /// Best candidate refit on every row.
  TrainedModel final_model;
  std::uint64_t fold_fingerprint = 0;

  const CandidateResult& best_candidate() const { return candidates[best_index]; }
};

/// Cross-validates every candidate on one shared fold assignment, picks the
/// highest mean accuracy (earliest on ties) and refits it on all rows.
/// Throws AllCandidatesFailed if no candidate trains.
TuneResult grid_search(const Dataset& ds, const Grid& grid, const FoldAssignment& folds,
                       bool scaling = true);
TuneResult grid_search(const Dataset& ds, const Grid& grid, std::size_t k, std::uint64_t seed,
                       bool scaling = true);

enum class Metric { accuracy, recall, specificity, precision };
inline constexpr std::array<Metric, 4> kAllMetrics{Metric::accuracy, Metric::recall,
                                                   Metric::specificity, Metric::precision};
std::string_view to_string(Metric metric) noexcept;
std::optional<double> metric_value(const MetricsReport& report, Metric metric) noexcept;

struct ComparisonRow {
  TuneResult tuning;
  /// Pooled held-out metrics of the selected candidate.
  MetricsReport metrics;
  /// is_best[m]: this row attains the maximum of metric m (ties flag every holder).
  std::array<bool, 4> is_best{false, false, false, false};
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::uint64_t fold_fingerprint = 0;
};

/// Tunes every grid on the same folds and lines up the winners' metrics.
ComparisonReport compare_models(const Dataset& ds, std::size_t k, std::uint64_t seed,
                                bool scaling = true,
                                const std::vector<Grid>& grids = default_grids());

} // namespace cadml
