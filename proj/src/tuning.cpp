#include "cadml/tuning.hpp"

#include "cadml/error.hpp"

namespace cadml {

void validate(const Grid& grid) {
  if (grid.candidates.empty())
    throw Error(ErrorCode::InvalidHyperParams, "grid has no candidates");
  for (const auto& c : grid.candidates) {
    if (algorithm_of(c) != grid.algorithm)
      throw Error(ErrorCode::InvalidHyperParams, "grid mixes algorithms");
    validate(c);
  }
}

Grid default_grid(Algorithm algorithm) {
  Grid grid{algorithm, {}};
  switch (algorithm) {
  case Algorithm::naive_bayes:
    grid.candidates = {NbParams{true, 0.0, 1.0}, NbParams{false, 0.0, 1.0}};
    break;
  case Algorithm::svm:
    for (double c : {0.25, 0.5, 1.0})
      grid.candidates.emplace_back(SvmParams{c, 0.1268408});
    break;
  case Algorithm::knn:
    for (int k : {5, 7, 9})
      grid.candidates.emplace_back(KnnParams{k});
    break;
  }
  return grid;
}

std::vector<Grid> default_grids() {
  return {default_grid(Algorithm::naive_bayes), default_grid(Algorithm::svm),
          default_grid(Algorithm::knn)};
}

TuneResult grid_search(const Dataset& ds, const Grid& grid, const FoldAssignment& folds,
                       bool scaling) {
  validate(grid);
  TuneResult result;
  result.algorithm = grid.algorithm;
  result.fold_fingerprint = folds.fingerprint();
  std::optional<std::size_t> best;
  for (const auto& params : grid.candidates) {
    CandidateResult candidate{params, 0.0, std::nullopt, std::nullopt};
    try {
      candidate.cv = cross_validate(ds, params, folds, scaling);
      candidate.mean_accuracy = candidate.cv->mean_accuracy;
      if (!best || candidate.mean_accuracy > result.candidates[*best].mean_accuracy)
        best = result.candidates.size();
    } catch (const Error& e) {
      candidate.error = e.what();
    }
    result.candidates.push_back(std::move(candidate));
  }
  if (!best)
    throw Error(ErrorCode::AllCandidatesFailed,
                "every " + std::string(to_string(grid.algorithm)) + " candidate failed: " +
                    result.candidates.front().error.value_or(""));
  result.best_index = *best;
  result.best = result.candidates[*best].params;
  result.final_model = fit_model(ds, result.best, scaling);
  return result;
}

TuneResult grid_search(const Dataset& ds, const Grid& grid, std::size_t k, std::uint64_t seed,
                       bool scaling) {
  return grid_search(ds, grid, stratified_folds(ds.labels(), k, seed), scaling);
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
  case Metric::accuracy:
    return "accuracy";
  case Metric::recall:
    return "recall";
  case Metric::specificity:
    return "specificity";
  case Metric::precision:
    return "precision";
  }
  return "accuracy";
}

std::optional<double> metric_value(const MetricsReport& report, Metric metric) noexcept {
  switch (metric) {
  case Metric::accuracy:
    return report.accuracy;
  case Metric::recall:
    return report.recall;
  case Metric::specificity:
    return report.specificity;
  case Metric::precision:
    return report.precision;
  }
  return std::nullopt;
}

ComparisonReport compare_models(const Dataset& ds, std::size_t k, std::uint64_t seed, bool scaling,
                                const std::vector<Grid>& grids) {
  const auto folds = stratified_folds(ds.labels(), k, seed);
  ComparisonReport report;
  report.fold_fingerprint = folds.fingerprint();
  for (const auto& grid : grids) {
    ComparisonRow row;
    row.tuning = grid_search(ds, grid, folds, scaling);
    row.metrics = row.tuning.best_candidate().cv->pooled;
    report.rows.push_back(std::move(row));
  }
  for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
    std::optional<double> top;
    for (const auto& row : report.rows)
      if (const auto v = metric_value(row.metrics, kAllMetrics[m]); v && (!top || *v > *top))
        top = v;
    for (auto& row : report.rows) {
      const auto v = metric_value(row.metrics, kAllMetrics[m]);
      row.is_best[m] = v && top && *v == *top;
    }
  }
  return report;
}

} // namespace cadml
