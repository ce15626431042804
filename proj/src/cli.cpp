#include "cadml/cli.hpp"

#include "cadml/error.hpp"
#include "cadml/feature_selection.hpp"
#include "cadml/serialization.hpp"
#include "cadml/simd/kernels.hpp"
#include "cadml/tuning.hpp"
#include "cadml/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cadml::cli {

namespace {

enum class Format { text, json, csv };

struct RunConfig {
  std::string command;
  std::string data_path;
  std::string keep; // comma list, "all", or empty for the subcommand default
  std::string algorithm;
  std::size_t folds = 10;
  std::optional<std::uint64_t> seed;
  bool no_scale = false;
  std::string format = "text";
  std::string out_path;
  std::string grid_path;
  std::string model_path;
  // rank
  std::string evaluator = "info_gain";
  std::optional<std::size_t> top;
  std::optional<double> threshold;
  // subset
  std::size_t stale = 5;
  // predict
  std::string record;

  bool scaling() const { return !no_scale; }
};

Format parse_format(const std::string& text) {
  if (text == "text")
    return Format::text;
  if (text == "json")
    return Format::json;
  if (text == "csv")
    return Format::csv;
  throw Error(ErrorCode::Usage, "unknown format '" + text + "'");
}

std::uint64_t default_seed(const std::string& command) { return command == "subset" ? 1 : 2018; }

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["data"] = c.data_path;
  j["keep"] = c.keep;
  j["algorithm"] = c.algorithm;
  j["folds"] = c.folds;
  j["seed"] = c.seed.value_or(default_seed(c.command));
  j["scaling"] = c.scaling();
  j["format"] = c.format;
  j["grid"] = c.grid_path;
  j["model"] = c.model_path;
  if (c.command == "rank") {
    j["evaluator"] = c.evaluator;
    j["top"] = c.top ? Json(*c.top) : Json(nullptr);
    j["threshold"] = c.threshold ? Json(*c.threshold) : Json(nullptr);
  }
  if (c.command == "subset")
    j["stale"] = c.stale;
  if (c.command == "predict")
    j["record"] = c.record;
  return j;
}

Json envelope(const RunConfig& c, Json result) {
  Json j;
  j["tool"] = "cadml";
  j["version"] = std::string(kVersion);
  j["config"] = config_json(c);
  j["result"] = std::move(result);
  return j;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty())
      items.push_back(item);
  return items;
}

bool has_features(const Dataset& ds, const std::vector<std::string>& names) {
  const auto all = ds.feature_names();
  return std::all_of(names.begin(), names.end(), [&](const std::string& n) {
    return std::find(all.begin(), all.end(), n) != all.end();
  });
}

// The model-building subcommands default to the seven selected features when
// the data has them; feature selection itself defaults to every feature.
Dataset apply_keep(const Dataset& ds, const RunConfig& c, bool default_to_selected) {
  if (c.keep == "all")
    return ds;
  if (c.keep.empty()) {
    if (default_to_selected && has_features(ds, cleveland_selected_features()))
      return select_columns(ds, cleveland_selected_features());
    return ds;
  }
  const auto names = split_list(c.keep);
  return select_columns(ds, names);
}

LoadedDataset load(const RunConfig& c) {
  if (c.data_path.empty())
    throw Error(ErrorCode::Usage, "--data is required");
  return load_dataset(c.data_path);
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

Algorithm algorithm_or(const RunConfig& c, Algorithm fallback) {
  return c.algorithm.empty() ? fallback : algorithm_from_string(c.algorithm);
}

Grid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open grid '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, "grid '" + path + "': " + e.what());
  }
  try {
    return grid_from_json(j);
  } catch (const Error& e) {
    throw Error(ErrorCode::Usage, "grid '" + path + "': " + e.what());
  }
}

/// The configuration each algorithm's tuning settled on in the reference study.
HyperParams reference_params(Algorithm algorithm) {
  switch (algorithm) {
  case Algorithm::naive_bayes:
    return NbParams{false, 0.0, 1.0};
  case Algorithm::svm:
    return SvmParams{0.25, 0.1268408};
  case Algorithm::knn:
    return KnnParams{5};
  }
  return NbParams{};
}

std::string metrics_line(const MetricsReport& m) {
  return "accuracy " + format_metric(m.accuracy) + "  recall " + format_metric(m.recall) +
         "  specificity " + format_metric(m.specificity) + "  precision " +
         format_metric(m.precision);
}

std::string matrix_line(const ConfusionMatrix& cm) {
  return "TP=" + std::to_string(cm.tp) + " FP=" + std::to_string(cm.fp) +
         " TN=" + std::to_string(cm.tn) + " FN=" + std::to_string(cm.fn);
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the rendered report.

std::string cmd_inspect(const RunConfig& c, Format format) {
  const auto loaded = load(c);
  const auto& ds = loaded.dataset;
  const auto [negatives, positives] = ds.class_counts();
  Json features = Json::array();
  for (std::size_t f = 0; f < ds.num_features(); ++f) {
    const auto col = ds.column(f);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    double mean = 0.0;
    for (double v : col)
      mean += v;
    mean /= static_cast<double>(col.size());
    features.push_back({{"name", ds.schema()[f].name},
                        {"kind", std::string(to_string(ds.schema()[f].kind))},
                        {"min", *lo},
                        {"max", *hi},
                        {"mean", mean}});
  }
  Json result;
  result["parsed"] = loaded.summary.parsed;
  result["dropped"] = loaded.summary.dropped;
  result["kept"] = loaded.summary.kept;
  result["class_balance"] = {{"negative", negatives}, {"positive", positives}};
  result["features"] = features;

  if (format == Format::json)
    return envelope(c, std::move(result)).dump(2) + "\n";
  std::ostringstream out;
  if (format == Format::csv) {
    out << "feature,kind,min,max,mean\n";
    for (const auto& f : features)
      out << f["name"].get<std::string>() << ',' << f["kind"].get<std::string>() << ','
          << fixed(f["min"].get<double>()) << ',' << fixed(f["max"].get<double>()) << ','
          << fixed(f["mean"].get<double>()) << '\n';
    return out.str();
  }
  out << loaded.summary.parsed << " parsed, " << loaded.summary.dropped << " dropped, "
      << loaded.summary.kept << " kept\n";
  out << "class balance: " << negatives << " negative / " << positives << " positive\n";
  out << std::left << std::setw(14) << "feature" << std::setw(13) << "kind" << std::right
      << std::setw(10) << "min" << std::setw(10) << "max" << std::setw(10) << "mean" << '\n';
  for (const auto& f : features)
    out << std::left << std::setw(14) << f["name"].get<std::string>() << std::setw(13)
        << f["kind"].get<std::string>() << std::right << std::setw(10)
        << fixed(f["min"].get<double>(), 2) << std::setw(10) << fixed(f["max"].get<double>(), 2)
        << std::setw(10) << fixed(f["mean"].get<double>(), 2) << '\n';
  return out.str();
}

std::string cmd_rank(const RunConfig& c, Format format) {
  const auto ds = apply_keep(load(c).dataset, c, false);
  const auto evaluator = evaluator_from_string(c.evaluator);
  const auto ranked = rank_features(ds, evaluator);
  std::optional<std::vector<std::string>> selected;
  if (c.top)
    selected = ranked.top(*c.top);
  else if (c.threshold)
    selected = ranked.above(*c.threshold);

  if (format == Format::json) {
    Json result;
    result["evaluator"] = std::string(to_string(evaluator));
    result["ranking"] = to_json(ranked);
    result["selected"] = selected ? Json(*selected) : Json(nullptr);
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::csv) {
    out << "feature,score\n";
    for (const auto& e : ranked.entries)
      out << e.feature << ',' << fixed(e.score, 6) << '\n';
    return out.str();
  }
  out << "ranking by " << to_string(evaluator) << '\n';
  for (const auto& e : ranked.entries)
    out << std::left << std::setw(14) << e.feature << std::right << std::setw(10)
        << fixed(e.score, 6) << '\n';
  if (selected) {
    out << "selected:";
    for (const auto& s : *selected)
      out << ' ' << s;
    out << '\n';
  }
  return out.str();
}

std::string cmd_subset(const RunConfig& c, Format format) {
  const auto ds = apply_keep(load(c).dataset, c, false);
  const auto seed = c.seed.value_or(default_seed(c.command));
  const auto algorithm = algorithm_or(c, Algorithm::naive_bayes);
  const auto wrapped = c.grid_path.empty() ? reference_params(algorithm)
                                           : load_grid(c.grid_path).candidates.front();
  const auto subset = best_first_subset(ds, wrapped, c.folds, seed, c.stale, c.scaling());
  const auto ig = rank_features(ds, Evaluator::info_gain);
  const auto corr = rank_features(ds, Evaluator::correlation);
  const auto aggregate = aggregate_selection(ds, ig, corr, subset, 7);

  if (format == Format::json) {
    Json result = to_json(subset);
    result["wrapped"] = {{"algorithm", std::string(to_string(algorithm_of(wrapped)))},
                         {"params", to_json(wrapped)}};
    result["aggregate"] = aggregate;
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::csv) {
    out << "feature,selected,aggregate\n";
    for (const auto& name : ds.feature_names()) {
      const bool in_subset =
          std::find(subset.selected.begin(), subset.selected.end(), name) != subset.selected.end();
      const bool in_aggregate = std::find(aggregate.begin(), aggregate.end(), name) != aggregate.end();
      out << name << ',' << (in_subset ? 1 : 0) << ',' << (in_aggregate ? 1 : 0) << '\n';
    }
    return out.str();
  }
  out << "best-first subset (" << to_string(algorithm_of(wrapped)) << ", " << c.folds
      << "-fold, seed " << seed << ")\n";
  out << "selected:";
  for (const auto& s : subset.selected)
    out << ' ' << s;
  out << "\nobjective: " << fixed(subset.objective) << "\nexpansions: " << subset.expansions
      << "\naggregate (top 7 of either ranker or subset):";
  for (const auto& s : aggregate)
    out << ' ' << s;
  out << '\n';
  return out.str();
}

std::string cv_text(const CVResult& cv) {
  std::ostringstream out;
  for (std::size_t f = 0; f < cv.per_fold.size(); ++f)
    out << "fold " << std::setw(3) << f << ": " << metrics_line(cv.per_fold[f]) << "  ("
        << matrix_line(cv.per_fold[f].matrix) << ")\n";
  out << "pooled  : " << metrics_line(cv.pooled) << "  (" << matrix_line(cv.pooled.matrix)
      << ")\n";
  out << "mean accuracy: " << fixed(cv.mean_accuracy) << '\n';
  return out.str();
}

std::string cmd_cv(const RunConfig& c, Format format) {
  const auto ds = apply_keep(load(c).dataset, c, true);
  const auto seed = c.seed.value_or(default_seed(c.command));
  const auto params = c.grid_path.empty()
                          ? reference_params(algorithm_or(c, Algorithm::naive_bayes))
                          : load_grid(c.grid_path).candidates.front();
  const auto cv = cross_validate(ds, params, c.folds, seed, c.scaling());
  if (format == Format::json) {
    Json result;
    result["algorithm"] = std::string(to_string(algorithm_of(params)));
    result["params"] = to_json(params);
    result["features"] = ds.feature_names();
    result["cv"] = to_json(cv);
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  if (format == Format::csv)
    return to_csv(cv);
  return std::string(to_string(algorithm_of(params))) + " " + describe(params) + ", " +
         std::to_string(c.folds) + "-fold, seed " + std::to_string(seed) + "\n" + cv_text(cv);
}

std::string cmd_tune(const RunConfig& c, Format format, std::ostream& err) {
  const auto ds = apply_keep(load(c).dataset, c, true);
  const auto seed = c.seed.value_or(default_seed(c.command));
  const Grid grid = c.grid_path.empty() ? default_grid(algorithm_or(c, Algorithm::naive_bayes))
                                        : load_grid(c.grid_path);
  const auto tuned = grid_search(ds, grid, c.folds, seed, c.scaling());
  if (!c.model_path.empty())
    save_model(tuned.final_model, c.model_path);
  if (const auto* svm = std::get_if<SvmModel>(&tuned.final_model.state); svm && !svm->converged())
    err << "warning: final SVM did not converge within the iteration limit\n";

  if (format == Format::json) {
    Json result = to_json(tuned);
    result["features"] = ds.feature_names();
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::csv) {
    out << "candidate,params,mean_accuracy,selected\n";
    for (std::size_t i = 0; i < tuned.candidates.size(); ++i)
      out << i << ",\"" << describe(tuned.candidates[i].params) << "\","
          << (tuned.candidates[i].cv ? fixed(tuned.candidates[i].mean_accuracy) : "failed") << ','
          << (i == tuned.best_index ? 1 : 0) << '\n';
    return out.str();
  }
  out << "grid search: " << to_string(grid.algorithm) << ", " << c.folds << "-fold, seed " << seed
      << '\n';
  for (std::size_t i = 0; i < tuned.candidates.size(); ++i) {
    const auto& cand = tuned.candidates[i];
    out << (i == tuned.best_index ? "* " : "  ") << std::left << std::setw(36)
        << describe(cand.params) << std::right
        << (cand.cv ? fixed(cand.mean_accuracy) : "failed: " + cand.error.value_or("")) << '\n';
  }
  out << "best: " << describe(tuned.best) << '\n' << cv_text(*tuned.best_candidate().cv);
  if (!c.model_path.empty())
    out << "final model written to " << c.model_path << '\n';
  return out.str();
}

std::string cmd_compare(const RunConfig& c, Format format) {
  const auto ds = apply_keep(load(c).dataset, c, true);
  const auto seed = c.seed.value_or(default_seed(c.command));
  const auto report = compare_models(ds, c.folds, seed, c.scaling());
  if (format == Format::json) {
    Json result = to_json(report);
    result["features"] = ds.feature_names();
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::csv) {
    out << "algorithm,params,accuracy,recall,specificity,precision,mean_accuracy\n";
    for (const auto& row : report.rows)
      out << to_string(row.tuning.algorithm) << ",\"" << describe(row.tuning.best) << "\","
          << format_metric(row.metrics.accuracy) << ',' << format_metric(row.metrics.recall) << ','
          << format_metric(row.metrics.specificity) << ','
          << format_metric(row.metrics.precision) << ','
          << fixed(row.tuning.best_candidate().mean_accuracy) << '\n';
    return out.str();
  }
  out << "model comparison, " << c.folds << "-fold, seed " << seed << " (* = best on metric)\n";
  out << std::left << std::setw(6) << "model" << std::setw(36) << "selected parameters"
      << std::right;
  for (auto m : kAllMetrics)
    out << std::setw(13) << to_string(m);
  out << '\n';
  for (const auto& row : report.rows) {
    out << std::left << std::setw(6) << to_string(row.tuning.algorithm) << std::setw(36)
        << describe(row.tuning.best) << std::right;
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m)
      out << std::setw(12) << format_metric(metric_value(row.metrics, kAllMetrics[m]))
          << (row.is_best[m] ? '*' : ' ');
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<double>> read_records(const RunConfig& c) {
  std::vector<std::string> lines;
  if (!c.record.empty()) {
    lines.push_back(c.record);
  } else if (!c.data_path.empty()) {
    std::ifstream in(c.data_path);
    if (!in)
      throw Error(ErrorCode::Io, "cannot open '" + c.data_path + "'");
    std::string line;
    while (std::getline(in, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        lines.push_back(line);
  } else {
    throw Error(ErrorCode::Usage, "predict needs --record or --data");
  }
  std::vector<std::vector<double>> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    // Reuse the CSV cell rules: the record parses as a one-row table.
    std::vector<FeatureSchema> anonymous(std::count(lines[i].begin(), lines[i].end(), ','));
    auto table = parse_csv(lines[i], anonymous);
    std::vector<double> values;
    for (const auto& cell : table.rows.front().cells) {
      if (!cell)
        throw Error(ErrorCode::InvalidValue, "record " + std::to_string(i + 1) + " has a missing value");
      values.push_back(*cell);
    }
    records.push_back(std::move(values));
  }
  return records;
}

std::string cmd_predict(const RunConfig& c, Format format) {
  if (c.model_path.empty())
    throw Error(ErrorCode::Usage, "--model is required");
  const auto model = load_model(c.model_path);
  const auto records = read_records(c);
  Json predictions = Json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].size() != model.num_features())
      throw Error(ErrorCode::LengthMismatch,
                  "record " + std::to_string(i + 1) + " has " + std::to_string(records[i].size()) +
                      " values, model expects " + std::to_string(model.num_features()));
    Json p;
    p["label"] = predict(model, records[i]);
    if (const auto posterior = predict_posterior(model, records[i]))
      p["posterior"] = {posterior->probability[0], posterior->probability[1]};
    else
      p["posterior"] = nullptr;
    predictions.push_back(std::move(p));
  }
  if (format == Format::json) {
    Json result;
    result["algorithm"] = std::string(to_string(model.algorithm()));
    result["features"] = [&] {
      std::vector<std::string> names;
      for (const auto& f : model.schema)
        names.push_back(f.name);
      return names;
    }();
    result["predictions"] = std::move(predictions);
    return envelope(c, std::move(result)).dump(2) + "\n";
  }
  std::ostringstream out;
  if (format == Format::csv)
    out << "record,label,p0,p1\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const bool has_posterior = !p["posterior"].is_null();
    if (format == Format::csv) {
      out << i + 1 << ',' << p["label"].get<int>() << ','
          << (has_posterior ? fixed(p["posterior"][0].get<double>(), 6) : "n/a") << ','
          << (has_posterior ? fixed(p["posterior"][1].get<double>(), 6) : "n/a") << '\n';
    } else {
      out << "record " << i + 1 << ": label " << p["label"].get<int>();
      if (has_posterior)
        out << "  P(0)=" << fixed(p["posterior"][0].get<double>(), 6)
            << "  P(1)=" << fixed(p["posterior"][1].get<double>(), 6);
      out << '\n';
    }
  }
  return out.str();
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
  case ErrorCategory::usage:
    return kUsage;
  case ErrorCategory::data:
    return kDataError;
  case ErrorCategory::training:
    return kTrainingError;
  }
  return kDataError;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--data", c.data_path, "Data file (UCI layout, optional header line)");
  sub->add_option("--keep", c.keep, "Comma-separated feature names, or 'all'");
  sub->add_option("--algorithm", c.algorithm, "nb, svm or knn");
  sub->add_option("--folds", c.folds, "Cross-validation folds")->check(CLI::Range(2, 1'000'000));
  sub->add_option("--seed", c.seed, "Fold shuffle seed (default 2018; 1 for subset)");
  sub->add_flag("--no-scale", c.no_scale, "Disable z-scoring for SVM and k-NN");
  sub->add_option("--format", c.format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  sub->add_option("--out", c.out_path, "Write the report here instead of stdout");
  sub->add_option("--grid", c.grid_path, "JSON grid overriding the default candidates");
  sub->add_option("--model", c.model_path, "Model file (written by tune, read by predict)");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coronary artery disease classification pipeline", "cadml"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig config;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"inspect", "Summarize a data file"},
      {"rank", "Rank features by information gain or correlation"},
      {"subset", "Best-first wrapper feature subset search"},
      {"cv", "Stratified k-fold cross-validation of one configuration"},
      {"tune", "Grid search and refit on all rows"},
      {"compare", "Tune all three classifiers and compare their metrics"},
      {"predict", "Label new records with a saved model"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, config);
    if (name == "rank") {
      sub->add_option("--evaluator", config.evaluator, "info_gain or correlation");
      sub->add_option("--top", config.top, "Report the top N features as selected");
      sub->add_option("--threshold", config.threshold, "Report features scoring above this");
    } else if (name == "subset") {
      sub->add_option("--stale", config.stale, "Expansions without improvement before stopping")
          ->check(CLI::PositiveNumber);
    } else if (name == "predict") {
      sub->add_option("--record", config.record, "One comma-separated record");
    }
  }

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    const auto format = parse_format(config.format);
    std::string report;
    if (config.command == "inspect")
      report = cmd_inspect(config, format);
    else if (config.command == "rank")
      report = cmd_rank(config, format);
    else if (config.command == "subset")
      report = cmd_subset(config, format);
    else if (config.command == "cv")
      report = cmd_cv(config, format);
    else if (config.command == "tune")
      report = cmd_tune(config, format, err);
    else if (config.command == "compare")
      report = cmd_compare(config, format);
    else
      report = cmd_predict(config, format);

    if (config.out_path.empty()) {
      out << report;
    } else {
      std::ofstream file(config.out_path);
      if (!file)
        throw Error(ErrorCode::Io, "cannot write '" + config.out_path + "'");
      file << report;
    }
    return kSuccess;
  } catch (const Error& e) {
    err << "cadml " << config.command << ": " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    err << "cadml " << config.command << ": " << e.what() << '\n';
    return kDataError;
  }
}

} // namespace cadml::cli
