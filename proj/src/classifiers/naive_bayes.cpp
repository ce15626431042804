#include "cadml/classifiers/naive_bayes.hpp"

#include "cadml/error.hpp"
#include "cadml/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cadml {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double log_sum_exp(std::span<const double> terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double t : terms)
    peak = std::max(peak, t);
  if (!std::isfinite(peak))
    return peak;
  double sum = 0.0;
  for (double t : terms)
    sum += std::exp(t - peak);
  return peak + std::log(sum);
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2)
    return 0.0;
  double mean = 0.0;
  for (double x : xs)
    mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs)
    ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

// Linear-interpolation quantile (the common "type 7" definition).
double quantile(std::vector<double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double kde_log_density(const KernelDensityLikelihood& kde, double x) {
  std::vector<double> terms(kde.samples.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double z = (x - kde.samples[i]) / kde.bandwidth;
    terms[i] = -0.5 * z * z;
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(kde.samples.size()) * kde.bandwidth) -
         0.5 * kLogTwoPi;
}

double frequency_log_probability(const FrequencyLikelihood& table, double x) {
  for (std::size_t i = 0; i < table.values.size(); ++i)
    if (table.values[i] == x)
      return std::log(std::max(table.probabilities[i], kMinCategoricalProbability));
  return std::log(kMinCategoricalProbability);
}

} // namespace

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty())
    return 1.0;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(sample_variance(samples));
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  double scale = std::min(sd, iqr / 1.34);
  if (!(scale > 0.0))
    scale = sd;
  if (!(scale > 0.0))
    scale = std::abs(samples.front());
  if (!(scale > 0.0))
    scale = 1.0;
  return 0.9 * scale * std::pow(static_cast<double>(samples.size()), -0.2);
}

NbModel::NbModel(std::vector<FeatureSchema> schema, NbParams params, std::array<double, 2> priors,
                 std::array<std::vector<FeatureLikelihood>, 2> likelihoods)
    : schema_(std::move(schema)), params_(params), priors_(priors),
      likelihoods_(std::move(likelihoods)) {
  for (const auto& per_class : likelihoods_)
    if (per_class.size() != schema_.size())
      throw Error(ErrorCode::InvalidModel, "likelihood count does not match schema");
  for (std::size_t f = 0; f < schema_.size(); ++f) {
    if (!std::holds_alternative<GaussianLikelihood>(likelihoods_[0][f]))
      continue;
    gaussian_features_.push_back(f);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& g = std::get<GaussianLikelihood>(likelihoods_[c][f]);
      gaussian_means_[c].push_back(g.mean);
      gaussian_weights_[c].push_back(0.5 / g.variance);
      gaussian_log_norm_[c] -= 0.5 * (kLogTwoPi + std::log(g.variance));
    }
  }
}

std::array<double, 2> NbModel::log_joint(std::span<const double> x) const {
  if (x.size() != schema_.size())
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(schema_.size()) +
                                               " features, got " + std::to_string(x.size()));
  std::vector<double> gathered(gaussian_features_.size());
  for (std::size_t i = 0; i < gathered.size(); ++i)
    gathered[i] = x[gaussian_features_[i]];

  std::array<double, 2> score{};
  for (std::size_t c = 0; c < 2; ++c) {
    double s = std::log(priors_[c]) + gaussian_log_norm_[c] -
               simd::weighted_squared_distance(gathered, gaussian_means_[c], gaussian_weights_[c]);
    for (std::size_t f = 0; f < schema_.size(); ++f) {
      const auto& lk = likelihoods_[c][f];
      if (const auto* kde = std::get_if<KernelDensityLikelihood>(&lk))
        s += kde_log_density(*kde, x[f]);
      else if (const auto* table = std::get_if<FrequencyLikelihood>(&lk))
        s += frequency_log_probability(*table, x[f]);
    }
    score[c] = s;
  }
  return score;
}

NbModel nb_fit(const Dataset& ds, const NbParams& params) {
  validate(params);
  const auto [negatives, positives] = ds.class_counts();
  if (negatives == 0 || positives == 0)
    throw Error(ErrorCode::SingleClassData, "naive Bayes needs both classes");
  if (negatives < 2 || positives < 2)
    throw Error(ErrorCode::TooFewRows, "naive Bayes needs at least 2 rows per class");

  const double n = static_cast<double>(ds.num_rows());
  const std::array<double, 2> priors{static_cast<double>(negatives) / n,
                                     static_cast<double>(positives) / n};
  std::array<std::vector<FeatureLikelihood>, 2> likelihoods;

  for (std::size_t f = 0; f < ds.num_features(); ++f) {
    const auto& feature = ds.schema()[f];
    const auto column = ds.column(f);
    std::array<std::vector<double>, 2> by_class;
    for (std::size_t r = 0; r < column.size(); ++r)
      by_class[static_cast<std::size_t>(ds.label(r))].push_back(column[r]);

    if (feature.kind != FeatureKind::continuous) {
      std::vector<double> domain;
      if (feature.allowed_values) {
        domain = *feature.allowed_values;
      } else {
        const std::set<double> seen(column.begin(), column.end());
        domain.assign(seen.begin(), seen.end());
      }
      for (std::size_t c = 0; c < 2; ++c) {
        FrequencyLikelihood table{domain, {}};
        const double denom = static_cast<double>(by_class[c].size()) +
                             params.laplace * static_cast<double>(domain.size());
        for (double v : domain) {
          const auto count = std::count(by_class[c].begin(), by_class[c].end(), v);
          table.probabilities.push_back((static_cast<double>(count) + params.laplace) / denom);
        }
        likelihoods[c].emplace_back(std::move(table));
      }
      continue;
    }

    if (params.use_kernel_density) {
      for (std::size_t c = 0; c < 2; ++c) {
        const double bw = silverman_bandwidth(by_class[c]) * params.bandwidth_adjust;
        likelihoods[c].emplace_back(KernelDensityLikelihood{by_class[c], bw});
      }
      continue;
    }

    const double floor = 1e-9 * (sample_variance(column) + 1e-12);
    for (std::size_t c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (double v : by_class[c])
        mean += v;
      mean /= static_cast<double>(by_class[c].size());
      likelihoods[c].emplace_back(
          GaussianLikelihood{mean, std::max(sample_variance(by_class[c]), floor)});
    }
  }
  return NbModel(ds.schema(), params, priors, std::move(likelihoods));
}

PosteriorVector nb_posterior(const NbModel& model, std::span<const double> x) {
  const auto score = model.log_joint(x);
  const double norm = log_sum_exp(score);
  PosteriorVector out;
  if (!std::isfinite(norm))
    return out; // both likelihoods underflowed: no evidence either way
  out.probability[0] = std::exp(score[0] - norm);
  out.probability[1] = std::exp(score[1] - norm);
  const double total = out.probability[0] + out.probability[1];
  out.probability[0] /= total;
  out.probability[1] /= total;
  return out;
}

Label nb_predict(const NbModel& model, std::span<const double> x) {
  const auto score = model.log_joint(x);
  return score[1] > score[0] ? 1 : 0;
}

} // namespace cadml
