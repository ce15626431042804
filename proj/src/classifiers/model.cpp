#include "cadml/classifiers/model.hpp"

#include "cadml/error.hpp"

namespace cadml {

bool uses_scaling(Algorithm algorithm) noexcept { return algorithm != Algorithm::naive_bayes; }

TrainedModel fit_model(const Dataset& train, const HyperParams& params, bool scaling,
                       const SvmSolverOptions& svm_options) {
  validate(params);
  TrainedModel model{params, train.schema(), std::nullopt, {}};
  const Dataset* fit_on = &train;
  Dataset scaled;
  if (scaling && uses_scaling(algorithm_of(params))) {
    auto [transformed, stats] = standardize(train);
    scaled = std::move(transformed);
    model.scaling = std::move(stats);
    fit_on = &scaled;
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NbParams>)
          model.state = nb_fit(*fit_on, p);
        else if constexpr (std::is_same_v<T, SvmParams>)
          model.state = svm_fit(*fit_on, p, svm_options);
        else
          model.state = knn_fit(*fit_on, p);
      },
      params);
  return model;
}

namespace {

std::vector<double> prepare(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != model.num_features())
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(model.num_features()) +
                                               " features, got " + std::to_string(x.size()));
  std::vector<double> v(x.begin(), x.end());
  if (model.scaling)
    apply_scaling(*model.scaling, model.schema, v);
  return v;
}

} // namespace

Label predict(const TrainedModel& model, std::span<const double> x) {
  const auto v = prepare(model, x);
  return std::visit(
      [&](const auto& state) -> Label {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, NbModel>)
          return nb_predict(state, v);
        else if constexpr (std::is_same_v<T, SvmModel>)
          return svm_predict(state, v);
        else
          return knn_predict(state, v);
      },
      model.state);
}

std::optional<PosteriorVector> predict_posterior(const TrainedModel& model,
                                                 std::span<const double> x) {
  const auto v = prepare(model, x);
  if (const auto* nb = std::get_if<NbModel>(&model.state))
    return nb_posterior(*nb, v);
  return std::nullopt;
}

std::vector<Label> predict_all(const TrainedModel& model, const Dataset& ds) {
  std::vector<Label> out;
  out.reserve(ds.num_rows());
  for (std::size_t r = 0; r < ds.num_rows(); ++r)
    out.push_back(predict(model, ds.row(r)));
  return out;
}

} // namespace cadml
