#include "cadml/dataset.hpp"

#include "cadml/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cadml {

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
  case FeatureKind::continuous:
    return "continuous";
  case FeatureKind::ordinal:
    return "ordinal";
  case FeatureKind::categorical:
    return "categorical";
  case FeatureKind::binary:
    return "binary";
  }
  return "continuous";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  for (auto kind : {FeatureKind::continuous, FeatureKind::ordinal, FeatureKind::categorical,
                    FeatureKind::binary})
    if (to_string(kind) == text)
      return kind;
  throw Error(ErrorCode::InvalidModel, "unknown feature kind '" + std::string(text) + "'");
}

bool FeatureSchema::allows(double value) const noexcept {
  if (!allowed_values)
    return std::isfinite(value);
  return std::find(allowed_values->begin(), allowed_values->end(), value) != allowed_values->end();
}

const std::vector<FeatureSchema>& cleveland_schema() {
  using K = FeatureKind;
  static const std::vector<FeatureSchema> schema{
      {"Age", K::continuous, std::nullopt},
      {"Sex", K::binary, std::vector<double>{0, 1}},
      {"Cp", K::categorical, std::vector<double>{1, 2, 3, 4}},
      {"Restbp", K::continuous, std::nullopt},
      {"Chol", K::continuous, std::nullopt},
      {"fbs", K::binary, std::vector<double>{0, 1}},
      {"RestECG", K::categorical, std::vector<double>{0, 1, 2}},
      {"MaxHeart", K::continuous, std::nullopt},
      {"ExAng", K::binary, std::vector<double>{0, 1}},
      {"OldPeak", K::continuous, std::nullopt},
      {"Slope", K::categorical, std::vector<double>{1, 2, 3}},
      {"MajorVessels", K::ordinal, std::vector<double>{0, 1, 2, 3}},
      {"Thal", K::categorical, std::vector<double>{3, 6, 7}},
  };
  return schema;
}

const std::vector<std::string>& cleveland_selected_features() {
  static const std::vector<std::string> names{"Cp",    "MaxHeart",     "ExAng", "OldPeak",
                                              "Slope", "MajorVessels", "Thal"};
  return names;
}

const std::vector<std::string>& cleveland_removed_features() {
  static const std::vector<std::string> names{"Age", "Sex", "Chol", "fbs", "Restbp", "RestECG"};
  return names;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<FeatureSchema> schema, std::vector<double> values,
                 std::vector<Label> labels, std::string provenance)
    : schema_(std::move(schema)), values_(std::move(values)), labels_(std::move(labels)),
      provenance_(std::move(provenance)) {
  if (values_.size() != labels_.size() * schema_.size())
    throw Error(ErrorCode::LengthMismatch,
                "value count " + std::to_string(values_.size()) + " does not match " +
                    std::to_string(labels_.size()) + " rows x " + std::to_string(schema_.size()) +
                    " features");
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    if (labels_[r] != 0 && labels_[r] != 1)
      throw Error(ErrorCode::OutOfRangeTarget,
                  "row " + std::to_string(r) + " has label " + std::to_string(labels_[r]));
    for (std::size_t f = 0; f < schema_.size(); ++f)
      if (!schema_[f].allows(values_[r * schema_.size() + f]))
        throw Error(ErrorCode::InvalidValue, "row " + std::to_string(r) + ", feature " +
                                                 schema_[f].name + ": value outside its domain");
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows,
                           const std::vector<Label>& labels, std::vector<FeatureSchema> schema) {
  if (rows.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, "rows and labels differ in length");
  const std::size_t width = rows.empty() ? schema.size() : rows.front().size();
  if (schema.empty())
    for (std::size_t f = 0; f < width; ++f)
      schema.push_back({"f" + std::to_string(f), FeatureKind::continuous, std::nullopt});
  std::vector<double> values;
  values.reserve(rows.size() * width);
  for (const auto& row : rows) {
    if (row.size() != schema.size())
      throw Error(ErrorCode::LengthMismatch, "ragged row");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Dataset(std::move(schema), std::move(values), labels, "in-memory");
}

std::vector<double> Dataset::column(std::size_t feature) const {
  std::vector<double> out(num_rows());
  for (std::size_t r = 0; r < out.size(); ++r)
    out[r] = values_[r * schema_.size() + feature];
  return out;
}

std::size_t Dataset::feature_index(std::string_view name) const {
  for (std::size_t f = 0; f < schema_.size(); ++f)
    if (schema_[f].name == name)
      return f;
  throw Error(ErrorCode::UnknownFeature, std::string(name));
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (const auto& s : schema_)
    names.push_back(s.name);
  return names;
}

std::pair<std::size_t, std::size_t> Dataset::class_counts() const noexcept {
  const auto positives = static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
  return {labels_.size() - positives, positives};
}

Dataset Dataset::subset_rows(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema_ = schema_;
  out.provenance_ = provenance_;
  out.values_.reserve(indices.size() * schema_.size());
  out.labels_.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.values_.insert(out.values_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

Dataset Dataset::subset_features(std::span<const std::size_t> features) const {
  Dataset out;
  out.provenance_ = provenance_;
  out.labels_ = labels_;
  for (std::size_t f : features) {
    if (f >= schema_.size())
      throw Error(ErrorCode::UnknownFeature, "feature index " + std::to_string(f));
    out.schema_.push_back(schema_[f]);
  }
  out.values_.reserve(num_rows() * features.size());
  for (std::size_t r = 0; r < num_rows(); ++r)
    for (std::size_t f : features)
      out.values_.push_back(values_[r * schema_.size() + f]);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view cell) noexcept {
  if (!cell.empty() && cell.front() == '+')
    cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
    return std::nullopt;
  return value;
}

bool is_missing(std::string_view cell) noexcept { return cell == "?"; }

RawRow parse_line(std::string_view line, std::size_t line_number, std::size_t expected_fields) {
  const auto fields = split_fields(line);
  if (fields.size() != expected_fields)
    throw Error(ErrorCode::WrongFieldCount, "line " + std::to_string(line_number) + ": expected " +
                                                std::to_string(expected_fields) + " fields, got " +
                                                std::to_string(fields.size()));
  RawRow row{line_number, {}};
  row.cells.reserve(fields.size());
  for (std::size_t c = 0; c < fields.size(); ++c) {
    if (is_missing(fields[c])) {
      row.cells.emplace_back(std::nullopt);
      continue;
    }
    const auto value = parse_number(fields[c]);
    if (!value)
      throw Error(ErrorCode::NonNumericCell, "line " + std::to_string(line_number) + ", column " +
                                                 std::to_string(c + 1) + ": '" +
                                                 std::string(fields[c]) + "'");
    row.cells.emplace_back(*value);
  }
  return row;
}

void parse_body(std::istream& in, RawTable& table, std::size_t first_line) {
  std::string line;
  std::size_t line_number = first_line;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty())
      continue;
    table.rows.push_back(parse_line(line, line_number, table.schema.size() + 1));
  }
  if (table.rows.empty())
    throw Error(ErrorCode::EmptyInput, "no records in " +
                                           (table.provenance.empty() ? "input" : table.provenance));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<FeatureSchema> canonical_feature(std::string_view name) {
  static const std::vector<std::pair<std::string, std::string>> aliases{
      {"trestbps", "Restbp"}, {"thalach", "MaxHeart"}, {"ca", "MajorVessels"},
      {"restecg", "RestECG"}, {"exang", "ExAng"},      {"oldpeak", "OldPeak"},
  };
  const auto key = lowercase(name);
  for (const auto& s : cleveland_schema())
    if (lowercase(s.name) == key)
      return s;
  for (const auto& [alias, canonical] : aliases)
    if (alias == key)
      for (const auto& s : cleveland_schema())
        if (s.name == canonical)
          return s;
  return std::nullopt;
}

} // namespace

bool RawRow::complete() const noexcept {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); });
}

RawTable parse_csv(std::istream& in, const std::vector<FeatureSchema>& schema,
                   std::string provenance) {
  RawTable table{schema, {}, std::move(provenance)};
  parse_body(in, table, 0);
  return table;
}

RawTable parse_csv(std::string_view text, const std::vector<FeatureSchema>& schema,
                   std::string provenance) {
  std::istringstream in{std::string(text)};
  return parse_csv(in, schema, std::move(provenance));
}

RawTable parse_csv_with_header(std::istream& in, std::string provenance) {
  RawTable table{{}, {}, std::move(provenance)};
  std::string header;
  std::size_t line_number = 0;
  while (std::getline(in, header)) {
    ++line_number;
    if (!trim(header).empty())
      break;
  }
  const auto names = split_fields(header);
  if (trim(header).empty() || names.size() < 2)
    throw Error(ErrorCode::EmptyInput, "missing or too-short header line");
  for (std::size_t c = 0; c + 1 < names.size(); ++c) {
    auto feature = canonical_feature(names[c]);
    if (feature)
      feature->name = std::string(names[c]);
    table.schema.push_back(feature.value_or(
        FeatureSchema{std::string(names[c]), FeatureKind::continuous, std::nullopt}));
  }
  parse_body(in, table, line_number);
  return table;
}

Label binarize_target(double raw_target) {
  if (raw_target != std::floor(raw_target) || raw_target < 0.0 || raw_target > 4.0)
    throw Error(ErrorCode::OutOfRangeTarget, "diagnosis value " + std::to_string(raw_target) +
                                                 " is outside 0..4");
  return raw_target >= 1.0 ? 1 : 0;
}

Dataset drop_incomplete(const RawTable& raw) {
  const std::size_t width = raw.schema.size();
  std::vector<double> values;
  std::vector<Label> labels;
  for (const auto& row : raw.rows) {
    if (!row.complete())
      continue;
    for (std::size_t f = 0; f < width; ++f) {
      const double v = *row.cells[f];
      if (!raw.schema[f].allows(v))
        throw Error(ErrorCode::InvalidValue, "line " + std::to_string(row.line) + ", feature " +
                                                 raw.schema[f].name + ": value " +
                                                 std::to_string(v) + " outside its domain");
      values.push_back(v);
    }
    try {
      labels.push_back(binarize_target(*row.cells[width]));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  if (labels.empty())
    throw Error(ErrorCode::EmptyDataset, "every row has a missing value");
  return Dataset(raw.schema, std::move(values), std::move(labels), raw.provenance);
}

LoadedDataset load_dataset(std::istream& in, std::string provenance) {
  // Peek at the first non-empty line to decide between the two layouts.
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::string_view first;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto eol = text.find('\n', pos);
      const auto line = trim(std::string_view(text).substr(pos, eol - pos));
      if (!line.empty()) {
        first = line;
        break;
      }
      if (eol == std::string::npos)
        break;
      pos = eol + 1;
    }
  }
  RawTable raw;
  const auto first_cell = split_fields(first).front();
  std::istringstream body(text);
  if (!first.empty() && !is_missing(first_cell) && !parse_number(first_cell))
    raw = parse_csv_with_header(body, std::move(provenance));
  else
    raw = parse_csv(body, cleveland_schema(), std::move(provenance));
  auto ds = drop_incomplete(raw);
  LoadSummary summary{raw.rows.size(), raw.rows.size() - ds.num_rows(), ds.num_rows()};
  return {std::move(ds), summary};
}

LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return load_dataset(in, path);
}

// ---------------------------------------------------------------------------
// Transforms

Dataset select_columns(const Dataset& ds, std::span<const std::string> keep) {
  std::vector<std::size_t> indices;
  indices.reserve(keep.size());
  for (const auto& name : keep)
    indices.push_back(ds.feature_index(name));
  return ds.subset_features(indices);
}

ScalingStats fit_scaling(const Dataset& ds) {
  const std::size_t n = ds.num_rows();
  const std::size_t width = ds.num_features();
  ScalingStats stats{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
  if (n == 0)
    return stats;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < width; ++f)
      stats.mean[f] += ds.row(r)[f];
  for (auto& m : stats.mean)
    m /= static_cast<double>(n);
  if (n < 2)
    return stats;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < width; ++f) {
      const double d = ds.row(r)[f] - stats.mean[f];
      stats.stddev[f] += d * d;
    }
  for (auto& s : stats.stddev)
    s = std::sqrt(s / static_cast<double>(n - 1));
  return stats;
}

void apply_scaling(const ScalingStats& stats, const std::vector<FeatureSchema>& schema,
                   std::span<double> features) {
  for (std::size_t f = 0; f < features.size(); ++f)
    if (schema[f].kind == FeatureKind::continuous && stats.stddev[f] > 0.0)
      features[f] = (features[f] - stats.mean[f]) / stats.stddev[f];
}

void invert_scaling(const ScalingStats& stats, const std::vector<FeatureSchema>& schema,
                    std::span<double> features) {
  for (std::size_t f = 0; f < features.size(); ++f)
    if (schema[f].kind == FeatureKind::continuous && stats.stddev[f] > 0.0)
      features[f] = features[f] * stats.stddev[f] + stats.mean[f];
}

std::pair<Dataset, ScalingStats> standardize(const Dataset& ds,
                                             const std::optional<ScalingStats>& stats) {
  ScalingStats used = stats ? *stats : fit_scaling(ds);
  if (used.mean.size() != ds.num_features() || used.stddev.size() != ds.num_features())
    throw Error(ErrorCode::LengthMismatch, "scaling stats cover " +
                                               std::to_string(used.mean.size()) +
                                               " features, dataset has " +
                                               std::to_string(ds.num_features()));
  std::vector<double> values(ds.values().begin(), ds.values().end());
  const std::size_t width = ds.num_features();
  for (std::size_t r = 0; r < ds.num_rows(); ++r)
    apply_scaling(used, ds.schema(), std::span<double>(values.data() + r * width, width));
  std::vector<Label> labels(ds.labels().begin(), ds.labels().end());
  return {Dataset(ds.schema(), std::move(values), std::move(labels), ds.provenance()),
          std::move(used)};
}

} // namespace cadml
