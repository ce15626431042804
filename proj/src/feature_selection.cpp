#include "cadml/feature_selection.hpp"

#include "cadml/error.hpp"
#include "cadml/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

namespace cadml {

std::vector<std::string> RankedList::top(std::size_t n) const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < entries.size() && i < n; ++i)
    names.push_back(entries[i].feature);
  return names;
}

std::vector<std::string> RankedList::above(double threshold) const {
  std::vector<std::string> names;
  for (const auto& e : entries)
    if (e.score > threshold)
      names.push_back(e.feature);
  return names;
}

std::size_t RankedList::position(std::string_view feature) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].feature == feature)
      return i;
  throw Error(ErrorCode::UnknownFeature, std::string(feature));
}

std::string_view to_string(Evaluator evaluator) noexcept {
  return evaluator == Evaluator::info_gain ? "info_gain" : "correlation";
}

Evaluator evaluator_from_string(std::string_view text) {
  if (text == "info_gain" || text == "infogain" || text == "ig")
    return Evaluator::info_gain;
  if (text == "correlation" || text == "corr")
    return Evaluator::correlation;
  throw Error(ErrorCode::Usage, "unknown evaluator '" + std::string(text) + "'");
}

namespace {

double entropy_of_counts(std::size_t negatives, std::size_t positives) {
  const double n = static_cast<double>(negatives + positives);
  double h = 0.0;
  for (const auto count : {negatives, positives}) {
    if (count == 0)
      continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t classes_present(std::size_t negatives, std::size_t positives) {
  return static_cast<std::size_t>(negatives > 0) + static_cast<std::size_t>(positives > 0);
}

void check_lengths(std::span<const double> feature, std::span<const Label> labels) {
  if (feature.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, "feature and label columns differ in length");
  if (labels.empty())
    throw Error(ErrorCode::EmptyInput, "empty column");
}

struct Sorted {
  std::vector<double> values;
  std::vector<Label> labels;
};

// Recursive MDL split of sorted[lo, hi).
void mdl_split(const Sorted& s, std::size_t lo, std::size_t hi, std::vector<double>& cuts) {
  const std::size_t n = hi - lo;
  if (n < 2)
    return;
  std::size_t total_pos = 0;
  for (std::size_t i = lo; i < hi; ++i)
    total_pos += static_cast<std::size_t>(s.labels[i]);
  const std::size_t total_neg = n - total_pos;
  const double whole = entropy_of_counts(total_neg, total_pos);
  if (whole == 0.0)
    return;

  std::size_t best = hi;
  double best_entropy = std::numeric_limits<double>::infinity();
  std::size_t left_pos = 0;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    left_pos += static_cast<std::size_t>(s.labels[i - 1]);
    if (s.values[i - 1] == s.values[i])
      continue;
    const std::size_t left_n = i - lo;
    const std::size_t right_n = n - left_n;
    const std::size_t right_pos = total_pos - left_pos;
    const double e = (static_cast<double>(left_n) * entropy_of_counts(left_n - left_pos, left_pos) +
                      static_cast<double>(right_n) *
                          entropy_of_counts(right_n - right_pos, right_pos)) /
                     static_cast<double>(n);
    if (e < best_entropy) {
      best_entropy = e;
      best = i;
    }
  }
  if (best == hi)
    return;

  std::size_t lp = 0;
  for (std::size_t i = lo; i < best; ++i)
    lp += static_cast<std::size_t>(s.labels[i]);
  const std::size_t ln = best - lo - lp;
  const std::size_t rp = total_pos - lp;
  const std::size_t rn = total_neg - ln;
  const double e1 = entropy_of_counts(ln, lp);
  const double e2 = entropy_of_counts(rn, rp);
  const auto k = static_cast<double>(classes_present(total_neg, total_pos));
  const auto k1 = static_cast<double>(classes_present(ln, lp));
  const auto k2 = static_cast<double>(classes_present(rn, rp));
  const double gain = whole - best_entropy;
  const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * whole - k1 * e1 - k2 * e2);
  const double threshold = (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
  if (!(gain > threshold))
    return;

  cuts.push_back(0.5 * (s.values[best - 1] + s.values[best]));
  mdl_split(s, lo, best, cuts);
  mdl_split(s, best, hi, cuts);
}

} // namespace

double entropy(std::span<const Label> labels) {
  if (labels.empty())
    throw Error(ErrorCode::EmptyInput, "entropy of an empty label set");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return entropy_of_counts(labels.size() - positives, positives);
}

std::vector<double> discretize_mdl(std::span<const double> feature, std::span<const Label> labels) {
  check_lengths(feature, labels);
  std::vector<std::size_t> order(feature.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return feature[a] < feature[b]; });
  Sorted s;
  for (auto i : order) {
    s.values.push_back(feature[i]);
    s.labels.push_back(labels[i]);
  }
  std::vector<double> cuts;
  mdl_split(s, 0, s.values.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

double info_gain(std::span<const double> feature, std::span<const Label> labels, FeatureKind kind) {
  check_lengths(feature, labels);
  // bin -> (negatives, positives)
  std::map<double, std::array<std::size_t, 2>> bins;
  if (kind == FeatureKind::continuous) {
    const auto cuts = discretize_mdl(feature, labels);
    for (std::size_t i = 0; i < feature.size(); ++i) {
      const auto bin = std::upper_bound(cuts.begin(), cuts.end(), feature[i]) - cuts.begin();
      ++bins[static_cast<double>(bin)][static_cast<std::size_t>(labels[i])];
    }
  } else {
    for (std::size_t i = 0; i < feature.size(); ++i)
      ++bins[feature[i]][static_cast<std::size_t>(labels[i])];
  }
  const double n = static_cast<double>(labels.size());
  double conditional = 0.0;
  for (const auto& [bin, counts] : bins)
    conditional += static_cast<double>(counts[0] + counts[1]) / n *
                   entropy_of_counts(counts[0], counts[1]);
  return std::max(0.0, entropy(labels) - conditional);
}

double correlation_score(std::span<const double> feature, std::span<const Label> labels) {
  check_lengths(feature, labels);
  if (labels.size() < 2)
    throw Error(ErrorCode::EmptyInput, "correlation needs at least 2 rows");
  const double n = static_cast<double>(labels.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mean_x += feature[i];
    mean_y += labels[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double dx = feature[i] - mean_x;
    const double dy = labels[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    return 0.0;
  return std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
}

RankedList rank_features(const Dataset& ds, Evaluator evaluator) {
  if (ds.num_rows() < 2)
    throw Error(ErrorCode::EmptyInput, "ranking needs at least 2 rows");
  const auto [negatives, positives] = ds.class_counts();
  if (negatives == 0 || positives == 0)
    throw Error(ErrorCode::SingleClassData, "ranking needs both classes");
  RankedList list;
  for (std::size_t f = 0; f < ds.num_features(); ++f) {
    const auto column = ds.column(f);
    const double score = evaluator == Evaluator::info_gain
                             ? info_gain(column, ds.labels(), ds.schema()[f].kind)
                             : correlation_score(column, ds.labels());
    list.entries.push_back({ds.schema()[f].name, score});
  }
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const FeatureScore& a, const FeatureScore& b) { return a.score > b.score; });
  return list;
}

namespace {

std::vector<std::size_t> mask_indices(std::uint64_t mask, std::size_t width) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < width; ++f)
    if ((mask >> f) & 1U)
      out.push_back(f);
  return out;
}

} // namespace

SubsetSearchResult best_first_subset(const Dataset& ds, const HyperParams& wrapped,
                                     std::size_t folds, std::uint64_t seed,
                                     std::size_t stale_limit, bool scaling) {
  validate(wrapped);
  const std::size_t width = ds.num_features();
  if (width > 64)
    throw Error(ErrorCode::Usage, "subset search supports at most 64 features");
  if (stale_limit == 0)
    throw Error(ErrorCode::Usage, "stale limit must be at least 1");
  const auto assignment = stratified_folds(ds.labels(), folds, seed);

  const auto majority = [](const Dataset& train, const Dataset& test) {
    const auto [neg, pos] = train.class_counts();
    return std::vector<Label>(test.num_rows(), pos > neg ? 1 : 0);
  };
  SubsetSearchResult result;
  const auto evaluate = [&](std::uint64_t mask) {
    ++result.expansions;
    if (mask == 0)
      return cross_validate(ds, assignment, majority).mean_accuracy;
    return cross_validate(ds.subset_features(mask_indices(mask, width)), wrapped, assignment,
                          scaling)
        .mean_accuracy;
  };

  struct Node {
    std::uint64_t mask;
    double merit;
  };
  std::vector<Node> open; // discovery order; ties resolved toward earlier nodes
  std::unordered_set<std::uint64_t> visited;

  Node best{0, evaluate(0)};
  open.push_back(best);
  visited.insert(0);
  std::size_t stale = 0;
  while (!open.empty() && stale < stale_limit) {
    auto pick = open.begin();
    for (auto it = open.begin(); it != open.end(); ++it)
      if (it->merit > pick->merit)
        pick = it;
    const Node node = *pick;
    open.erase(pick);

    bool improved = false;
    for (std::size_t f = 0; f < width; ++f) {
      const std::uint64_t child = node.mask ^ (std::uint64_t{1} << f);
      if (!visited.insert(child).second)
        continue;
      const Node next{child, evaluate(child)};
      open.push_back(next);
      if (next.merit > best.merit) {
        best = next;
        improved = true;
      }
    }
    stale = improved ? 0 : stale + 1;
  }

  for (auto f : mask_indices(best.mask, width))
    result.selected.push_back(ds.schema()[f].name);
  result.objective = best.merit;
  return result;
}

std::vector<std::string> aggregate_selection(const Dataset& ds, const RankedList& info_gain,
                                             const RankedList& correlation,
                                             const SubsetSearchResult& subset, std::size_t top_n) {
  const auto ig_top = info_gain.top(top_n);
  const auto corr_top = correlation.top(top_n);
  const auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  std::vector<std::string> keep;
  for (const auto& name : ds.feature_names())
    if (contains(ig_top, name) || contains(corr_top, name) || contains(subset.selected, name))
      keep.push_back(name);
  return keep;
}

} // namespace cadml
