#pragma once

// JSON/CSV forms of datasets, models and reports. Key order is fixed
// (ordered_json) and doubles are written in shortest round-trip form, so equal
// values always serialize to equal bytes.

#include "cadml/classifiers/model.hpp"
#include "cadml/dataset.hpp"
#include "cadml/evaluation.hpp"
#include "cadml/feature_selection.hpp"
#include "cadml/tuning.hpp"

#include <json.hpp>

#include <string>

namespace cadml {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

Json to_json(const FeatureSchema& feature);
FeatureSchema feature_schema_from_json(const Json& j);

/// {"provenance", "schema": [...], "rows": [{"features": [...], "label": 0|1}]}
Json to_json(const Dataset& ds);
Dataset dataset_from_json(const Json& j);

Json to_json(const HyperParams& params);
HyperParams hyperparams_from_json(const Json& j, Algorithm algorithm);

/// {"algorithm": "svm", "candidates": [{"C": 0.25, "sigma": 0.1268408}, ...]}
Grid grid_from_json(const Json& j);

/// Versioned model document; throws InvalidModel on malformed input.
Json to_json(const TrainedModel& model);
TrainedModel model_from_json(const Json& j);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Undefined metrics become null.
Json to_json(const ConfusionMatrix& cm);
Json to_json(const MetricsReport& report);
Json to_json(const CVResult& cv);
/// One row per fold plus a "pooled" row.
std::string to_csv(const CVResult& cv);

Json to_json(const RankedList& list);
Json to_json(const SubsetSearchResult& result);
/// Candidates, best and the best candidate's cross-validation.
Json to_json(const TuneResult& result);
Json to_json(const ComparisonReport& report);

/// "0.8400" or "n/a".
std::string format_metric(const std::optional<double>& value);

} // namespace cadml
