#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cadml {

enum class FeatureKind { continuous, ordinal, categorical, binary };

std::string_view to_string(FeatureKind kind) noexcept;
FeatureKind feature_kind_from_string(std::string_view text);

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  /// Finite value domain for categorical/ordinal/binary features.
  std::optional<std::vector<double>> allowed_values;

  bool has_finite_domain() const noexcept { return allowed_values.has_value(); }
  bool allows(double value) const noexcept;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// The 13 Cleveland input features, in file order.
const std::vector<FeatureSchema>& cleveland_schema();

/// The seven features kept after feature selection, in reporting order.
const std::vector<std::string>& cleveland_selected_features();

/// The six features that feature selection discards.
const std::vector<std::string>& cleveland_removed_features();

/// Binary class label; 1 is the positive (disease) class.
using Label = int;

/// Immutable table of numeric feature vectors with binary labels.
///
/// Rows are stored contiguously (row-major) so distance kernels can stream them.
class Dataset {
public:
  Dataset() = default;
  /// Validates arity, label range and finite-domain membership.
  Dataset(std::vector<FeatureSchema> schema, std::vector<double> values, std::vector<Label> labels,
          std::string provenance = {});

  /// Convenience for tests: one vector per row, all features continuous unless schema given.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           const std::vector<Label>& labels,
                           std::vector<FeatureSchema> schema = {});

  const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }
  std::size_t num_features() const noexcept { return schema_.size(); }
  std::size_t num_rows() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * schema_.size(), schema_.size()};
  }
  Label label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double> column(std::size_t feature) const;

  const std::string& provenance() const noexcept { return provenance_; }

  /// Index of the feature with this name; throws UnknownFeature.
  std::size_t feature_index(std::string_view name) const;
  std::vector<std::string> feature_names() const;

  /// Counts of label 0 and label 1.
  std::pair<std::size_t, std::size_t> class_counts() const noexcept;

  /// Rows at the given indices, in that order.
  Dataset subset_rows(std::span<const std::size_t> indices) const;
  /// Columns at the given indices, in that order.
  Dataset subset_features(std::span<const std::size_t> features) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

private:
  std::vector<FeatureSchema> schema_;
  std::vector<double> values_;
  std::vector<Label> labels_;
  std::string provenance_;
};

// ---------------------------------------------------------------------------
// Loading

/// One parsed line; std::nullopt marks a "?" cell. The last cell is the target.
struct RawRow {
  std::size_t line = 0;
  std::vector<std::optional<double>> cells;

  bool complete() const noexcept;
};

struct RawTable {
  std::vector<FeatureSchema> schema;
  std::vector<RawRow> rows;
  std::string provenance;
};

/// Parses headerless UCI-style CSV: |schema|+1 fields per non-empty line,
/// "?" for missing. Throws WrongFieldCount / NonNumericCell / EmptyInput.
RawTable parse_csv(std::istream& in, const std::vector<FeatureSchema>& schema,
                   std::string provenance = {});
RawTable parse_csv(std::string_view text, const std::vector<FeatureSchema>& schema,
                   std::string provenance = {});

/// Parses CSV whose first line names the columns (target last). Columns named
/// after a Cleveland feature (canonical name or UCI alias, case-insensitive)
/// take that feature's kind; the rest are continuous.
RawTable parse_csv_with_header(std::istream& in, std::string provenance = {});

/// Maps the raw 0..4 diagnosis to {0, 1}. Throws OutOfRangeTarget.
Label binarize_target(double raw_target);

/// Removes every row with a missing cell and binarizes the target.
/// Throws EmptyDataset when nothing survives.
Dataset drop_incomplete(const RawTable& raw);

struct LoadSummary {
  std::size_t parsed = 0;
  std::size_t dropped = 0;
  std::size_t kept = 0;
};

struct LoadedDataset {
  Dataset dataset;
  LoadSummary summary;
};

/// Reads a data file; detects a header line (first cell not numeric and not "?").
LoadedDataset load_dataset(const std::string& path);
LoadedDataset load_dataset(std::istream& in, std::string provenance);

// ---------------------------------------------------------------------------
// Transforms

/// Restricts the dataset to `keep`, in that order. Throws UnknownFeature.
Dataset select_columns(const Dataset& ds, std::span<const std::string> keep);

/// Per-feature location/scale. Only continuous features are transformed.
struct ScalingStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

/// Sample mean and sample standard deviation (divisor n-1) of every feature.
ScalingStats fit_scaling(const Dataset& ds);

/// z-scores continuous features; zero-stddev features pass through. When
/// `stats` is empty they are computed from `ds` and returned.
std::pair<Dataset, ScalingStats> standardize(const Dataset& ds,
                                             const std::optional<ScalingStats>& stats = {});

/// Applies the same transform to a single feature vector in place.
void apply_scaling(const ScalingStats& stats, const std::vector<FeatureSchema>& schema,
                   std::span<double> features);

/// Inverse of apply_scaling.
void invert_scaling(const ScalingStats& stats, const std::vector<FeatureSchema>& schema,
                    std::span<double> features);

} // namespace cadml
