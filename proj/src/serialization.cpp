#include "cadml/serialization.hpp"

#include "cadml/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cadml {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::InvalidModel, what);
}

template <typename T> T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    malformed(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("field '") + key + "': " + e.what());
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json matrix_rows(std::span<const double> values, std::size_t width) {
  Json rows = Json::array();
  for (std::size_t r = 0; width > 0 && r < values.size() / width; ++r)
    rows.push_back(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(r * width),
                                       values.begin() + static_cast<std::ptrdiff_t>((r + 1) * width)));
  return rows;
}

std::vector<double> flatten_rows(const Json& rows, std::size_t width) {
  std::vector<double> out;
  for (const auto& row : rows) {
    const auto v = row.get<std::vector<double>>();
    if (v.size() != width)
      malformed("row width does not match schema");
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

Json likelihood_to_json(const FeatureLikelihood& lk) {
  Json j;
  if (const auto* g = std::get_if<GaussianLikelihood>(&lk)) {
    j["type"] = "gaussian";
    j["mean"] = g->mean;
    j["variance"] = g->variance;
  } else if (const auto* kde = std::get_if<KernelDensityLikelihood>(&lk)) {
    j["type"] = "kde";
    j["bandwidth"] = kde->bandwidth;
    j["samples"] = kde->samples;
  } else if (const auto* table = std::get_if<FrequencyLikelihood>(&lk)) {
    j["type"] = "frequency";
    j["values"] = table->values;
    j["probabilities"] = table->probabilities;
  }
  return j;
}

FeatureLikelihood likelihood_from_json(const Json& j) {
  const auto type = field<std::string>(j, "type");
  if (type == "gaussian")
    return GaussianLikelihood{field<double>(j, "mean"), field<double>(j, "variance")};
  if (type == "kde")
    return KernelDensityLikelihood{field<std::vector<double>>(j, "samples"),
                                   field<double>(j, "bandwidth")};
  if (type == "frequency") {
    FrequencyLikelihood t{field<std::vector<double>>(j, "values"),
                          field<std::vector<double>>(j, "probabilities")};
    if (t.values.size() != t.probabilities.size())
      malformed("frequency table sizes differ");
    return t;
  }
  malformed("unknown likelihood type '" + type + "'");
}

Json state_to_json(const ClassifierState& state) {
  Json j;
  if (const auto* nb = std::get_if<NbModel>(&state)) {
    j["priors"] = std::vector<double>(nb->priors().begin(), nb->priors().end());
    Json per_class = Json::array();
    for (Label c : {0, 1}) {
      Json features = Json::array();
      for (const auto& lk : nb->likelihoods(c))
        features.push_back(likelihood_to_json(lk));
      per_class.push_back(std::move(features));
    }
    j["likelihoods"] = std::move(per_class);
  } else if (const auto* svm = std::get_if<SvmModel>(&state)) {
    j["C"] = svm->params().C;
    j["sigma"] = svm->params().sigma;
    j["bias"] = svm->bias();
    j["dual_objective"] = svm->dual_objective();
    j["converged"] = svm->converged();
    j["iterations"] = svm->iterations();
    j["coefficients"] = std::vector<double>(svm->coefficients().begin(), svm->coefficients().end());
    j["support_vectors"] = matrix_rows(svm->support_vectors(), svm->num_features());
  } else if (const auto* knn = std::get_if<KnnModel>(&state)) {
    j["k"] = knn->k();
    j["labels"] = std::vector<Label>(knn->labels().begin(), knn->labels().end());
    j["exemplars"] = matrix_rows(knn->exemplars(), knn->num_features());
  }
  return j;
}

ClassifierState state_from_json(const Json& j, const HyperParams& params,
                                const std::vector<FeatureSchema>& schema) {
  switch (algorithm_of(params)) {
  case Algorithm::naive_bayes: {
    const auto priors = field<std::vector<double>>(j, "priors");
    if (priors.size() != 2)
      malformed("naive Bayes model needs two priors");
    const auto& per_class = j.at("likelihoods");
    if (!per_class.is_array() || per_class.size() != 2)
      malformed("naive Bayes model needs likelihoods for two classes");
    std::array<std::vector<FeatureLikelihood>, 2> likelihoods;
    for (std::size_t c = 0; c < 2; ++c)
      for (const auto& lk : per_class[c])
        likelihoods[c].push_back(likelihood_from_json(lk));
    return NbModel(schema, std::get<NbParams>(params), {priors[0], priors[1]},
                   std::move(likelihoods));
  }
  case Algorithm::svm:
    return SvmModel(schema, std::get<SvmParams>(params),
                    flatten_rows(j.at("support_vectors"), schema.size()),
                    field<std::vector<double>>(j, "coefficients"), field<double>(j, "bias"),
                    field<double>(j, "dual_objective"), field<bool>(j, "converged"),
                    field<std::size_t>(j, "iterations"));
  case Algorithm::knn:
    return KnnModel(schema, flatten_rows(j.at("exemplars"), schema.size()),
                    field<std::vector<Label>>(j, "labels"), field<int>(j, "k"));
  }
  malformed("unknown algorithm");
}

} // namespace

std::string format_metric(const std::optional<double>& value) {
  if (!value)
    return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", *value);
  return buffer;
}

Json to_json(const FeatureSchema& feature) {
  Json j;
  j["name"] = feature.name;
  j["kind"] = std::string(to_string(feature.kind));
  j["allowed_values"] = feature.allowed_values ? Json(*feature.allowed_values) : Json(nullptr);
  return j;
}

FeatureSchema feature_schema_from_json(const Json& j) {
  FeatureSchema f{field<std::string>(j, "name"),
                  feature_kind_from_string(field<std::string>(j, "kind")), std::nullopt};
  if (j.contains("allowed_values") && !j.at("allowed_values").is_null())
    f.allowed_values = field<std::vector<double>>(j, "allowed_values");
  return f;
}

Json to_json(const Dataset& ds) {
  Json j;
  j["provenance"] = ds.provenance();
  Json schema = Json::array();
  for (const auto& f : ds.schema())
    schema.push_back(to_json(f));
  j["schema"] = std::move(schema);
  Json rows = Json::array();
  for (std::size_t r = 0; r < ds.num_rows(); ++r) {
    Json row;
    row["features"] = std::vector<double>(ds.row(r).begin(), ds.row(r).end());
    row["label"] = ds.label(r);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Dataset dataset_from_json(const Json& j) {
  std::vector<FeatureSchema> schema;
  for (const auto& f : j.at("schema"))
    schema.push_back(feature_schema_from_json(f));
  std::vector<double> values;
  std::vector<Label> labels;
  for (const auto& row : j.at("rows")) {
    const auto features = field<std::vector<double>>(row, "features");
    values.insert(values.end(), features.begin(), features.end());
    labels.push_back(field<Label>(row, "label"));
  }
  return Dataset(std::move(schema), std::move(values), std::move(labels),
                 j.value("provenance", std::string{}));
}

Json to_json(const HyperParams& params) {
  Json j;
  if (const auto* nb = std::get_if<NbParams>(&params)) {
    j["kernel"] = nb->use_kernel_density;
    j["laplace"] = nb->laplace;
    j["adjust"] = nb->bandwidth_adjust;
  } else if (const auto* svm = std::get_if<SvmParams>(&params)) {
    j["C"] = svm->C;
    j["sigma"] = svm->sigma;
  } else if (const auto* knn = std::get_if<KnnParams>(&params)) {
    j["k"] = knn->k;
  }
  return j;
}

HyperParams hyperparams_from_json(const Json& j, Algorithm algorithm) {
  HyperParams params;
  switch (algorithm) {
  case Algorithm::naive_bayes:
    params = NbParams{j.value("kernel", false), j.value("laplace", 0.0), j.value("adjust", 1.0)};
    break;
  case Algorithm::svm:
    params = SvmParams{field<double>(j, "C"), j.value("sigma", 0.1268408)};
    break;
  case Algorithm::knn:
    params = KnnParams{field<int>(j, "k")};
    break;
  }
  validate(params);
  return params;
}

Grid grid_from_json(const Json& j) {
  Grid grid{algorithm_from_string(field<std::string>(j, "algorithm")), {}};
  if (!j.contains("candidates") || !j.at("candidates").is_array())
    malformed("grid needs a 'candidates' array");
  for (const auto& c : j.at("candidates"))
    grid.candidates.push_back(hyperparams_from_json(c, grid.algorithm));
  validate(grid);
  return grid;
}

Json to_json(const TrainedModel& model) {
  Json j;
  j["format"] = "cadml-model";
  j["version"] = kModelFormatVersion;
  j["algorithm"] = std::string(to_string(model.algorithm()));
  j["params"] = to_json(model.params);
  Json schema = Json::array();
  for (const auto& f : model.schema)
    schema.push_back(to_json(f));
  j["schema"] = std::move(schema);
  if (model.scaling) {
    j["scaling"] = {{"mean", model.scaling->mean}, {"stddev", model.scaling->stddev}};
  } else {
    j["scaling"] = nullptr;
  }
  j["state"] = state_to_json(model.state);
  return j;
}

TrainedModel model_from_json(const Json& j) {
  try {
    if (field<std::string>(j, "format") != "cadml-model")
      malformed("not a model document");
    if (field<int>(j, "version") != kModelFormatVersion)
      malformed("unsupported model version " + j.at("version").dump());
    TrainedModel model;
    const auto algorithm = algorithm_from_string(field<std::string>(j, "algorithm"));
    model.params = hyperparams_from_json(j.at("params"), algorithm);
    for (const auto& f : j.at("schema"))
      model.schema.push_back(feature_schema_from_json(f));
    if (!j.at("scaling").is_null()) {
      model.scaling = ScalingStats{field<std::vector<double>>(j.at("scaling"), "mean"),
                                   field<std::vector<double>>(j.at("scaling"), "stddev")};
      if (model.scaling->mean.size() != model.schema.size() ||
          model.scaling->stddev.size() != model.schema.size())
        malformed("scaling stats do not match schema");
    }
    model.state = state_from_json(j.at("state"), model.params, model.schema);
    return model;
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidModel)
      throw;
    malformed(e.what());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << to_json(model).dump(2) << '\n';
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    malformed(path + ": " + e.what());
  }
  return model_from_json(j);
}

Json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

Json to_json(const MetricsReport& report) {
  Json j;
  j["accuracy"] = optional_number(report.accuracy);
  j["recall"] = optional_number(report.recall);
  j["specificity"] = optional_number(report.specificity);
  j["precision"] = optional_number(report.precision);
  j["matrix"] = to_json(report.matrix);
  return j;
}

Json to_json(const CVResult& cv) {
  Json j;
  j["folds"] = cv.per_fold.size();
  j["fold_fingerprint"] = cv.fold_fingerprint;
  j["mean_accuracy"] = cv.mean_accuracy;
  j["pooled"] = to_json(cv.pooled);
  Json per_fold = Json::array();
  for (const auto& f : cv.per_fold)
    per_fold.push_back(to_json(f));
  j["per_fold"] = std::move(per_fold);
  return j;
}

std::string to_csv(const CVResult& cv) {
  std::ostringstream out;
  out << "fold,tp,fp,tn,fn,accuracy,recall,specificity,precision\n";
  const auto line = [&out](const std::string& name, const MetricsReport& m) {
    out << name << ',' << m.matrix.tp << ',' << m.matrix.fp << ',' << m.matrix.tn << ','
        << m.matrix.fn << ',' << format_metric(m.accuracy) << ',' << format_metric(m.recall) << ','
        << format_metric(m.specificity) << ',' << format_metric(m.precision) << '\n';
  };
  for (std::size_t f = 0; f < cv.per_fold.size(); ++f)
    line(std::to_string(f), cv.per_fold[f]);
  line("pooled", cv.pooled);
  return out.str();
}

Json to_json(const RankedList& list) {
  Json entries = Json::array();
  for (const auto& e : list.entries)
    entries.push_back({{"feature", e.feature}, {"score", e.score}});
  return entries;
}

Json to_json(const SubsetSearchResult& result) {
  return {{"selected", result.selected},
          {"objective", result.objective},
          {"expansions", result.expansions}};
}

Json to_json(const TuneResult& result) {
  Json j;
  j["algorithm"] = std::string(to_string(result.algorithm));
  j["fold_fingerprint"] = result.fold_fingerprint;
  Json candidates = Json::array();
  for (const auto& c : result.candidates) {
    Json entry;
    entry["params"] = to_json(c.params);
    entry["mean_accuracy"] = c.cv ? Json(c.mean_accuracy) : Json(nullptr);
    entry["error"] = c.error ? Json(*c.error) : Json(nullptr);
    candidates.push_back(std::move(entry));
  }
  j["candidates"] = std::move(candidates);
  j["best"] = {{"index", result.best_index},
               {"params", to_json(result.best)},
               {"mean_accuracy", result.best_candidate().mean_accuracy}};
  j["cv"] = to_json(*result.best_candidate().cv);
  return j;
}

Json to_json(const ComparisonReport& report) {
  Json j;
  j["fold_fingerprint"] = report.fold_fingerprint;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r;
    r["algorithm"] = std::string(to_string(row.tuning.algorithm));
    r["best_params"] = to_json(row.tuning.best);
    r["mean_accuracy"] = row.tuning.best_candidate().mean_accuracy;
    r["metrics"] = to_json(row.metrics);
    Json best = Json::array();
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m)
      if (row.is_best[m])
        best.push_back(std::string(to_string(kAllMetrics[m])));
    r["best_on"] = std::move(best);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

} // namespace cadml
