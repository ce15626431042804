#include "cadml/error.hpp"
#include "cadml/evaluation.hpp"
#include "cadml/feature_selection.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cadml;
using cadml::testing::cleveland_path;

namespace {

Dataset cleveland() { return load_dataset(cleveland_path()).dataset; }

/// Mean CV accuracy of every subset, by brute force on one fold assignment.
double exhaustive_best(const Dataset& ds, const HyperParams& params, const FoldAssignment& folds) {
  const auto majority = [](const Dataset& train, const Dataset& test) {
    const auto [neg, pos] = train.class_counts();
    return std::vector<Label>(test.num_rows(), pos > neg ? 1 : 0);
  };
  double best = cross_validate(ds, folds, majority).mean_accuracy;
  const std::uint64_t limit = std::uint64_t{1} << ds.num_features();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::vector<std::size_t> cols;
    for (std::size_t f = 0; f < ds.num_features(); ++f)
      if ((mask >> f) & 1U)
        cols.push_back(f);
    best = std::max(best,
                    cross_validate(ds.subset_features(cols), params, folds, true).mean_accuracy);
  }
  return best;
}

Dataset with_noise(const Dataset& base, std::size_t noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto schema = base.schema();
  for (std::size_t i = 0; i < noise; ++i)
    schema.push_back({"Noise" + std::to_string(i), FeatureKind::continuous, std::nullopt});
  std::vector<double> values;
  for (std::size_t r = 0; r < base.num_rows(); ++r) {
    values.insert(values.end(), base.row(r).begin(), base.row(r).end());
    for (std::size_t i = 0; i < noise; ++i)
      values.push_back(normal(rng));
  }
  return Dataset(schema, values, {base.labels().begin(), base.labels().end()});
}

} // namespace

TEST_CASE("entropy") {
  const std::vector<Label> mixed{0, 0, 0, 1};
  CHECK(entropy(mixed) == doctest::Approx(0.811278).epsilon(1e-6));
  const std::vector<Label> even{0, 1, 0, 1};
  CHECK(entropy(even) == doctest::Approx(1.0));
  const std::vector<Label> pure{1, 1, 1};
  CHECK(entropy(pure) == 0.0);
  CHECK_THROWS_AS(entropy(std::vector<Label>{}), Error);
}

TEST_CASE("mdl discretization and information gain") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<Label> y{0, 0, 1, 1};
  const auto cuts = discretize_mdl(x, y);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0] > 2.0);
  CHECK(cuts[0] < 3.0);
  CHECK(info_gain(x, y, FeatureKind::continuous) == doctest::Approx(1.0));

  SUBCASE("no informative cut") {
    const std::vector<double> flat{1, 2, 3, 4};
    const std::vector<Label> alternating{0, 1, 0, 1};
    CHECK(discretize_mdl(flat, alternating).empty());
    CHECK(info_gain(flat, alternating, FeatureKind::continuous) == 0.0);
  }
  SUBCASE("categorical codes are bins") {
    const std::vector<double> codes{3, 3, 7, 7};
    CHECK(info_gain(codes, y, FeatureKind::categorical) == doctest::Approx(1.0));
  }
  SUBCASE("length mismatch") {
    const std::vector<Label> short_y{0, 1};
    CHECK_THROWS_AS(info_gain(x, short_y, FeatureKind::continuous), Error);
  }
}

TEST_CASE("correlation score") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<Label> y{0, 0, 1, 1};
  CHECK(correlation_score(x, y) == doctest::Approx(0.894427).epsilon(1e-6));
  const std::vector<double> reversed{4, 3, 2, 1};
  CHECK(correlation_score(reversed, y) == doctest::Approx(0.894427).epsilon(1e-6));
  const std::vector<double> constant{5, 5, 5, 5};
  CHECK(correlation_score(constant, y) == 0.0);
}

TEST_CASE("ranking order") {
  SUBCASE("equal scores keep schema order") {
    const auto ds = Dataset::from_rows({{1, 1, 1}, {2, 2, 0}, {3, 3, 0}, {4, 4, 1}}, {0, 0, 1, 1});
    for (auto ev : {Evaluator::info_gain, Evaluator::correlation}) {
      const auto ranked = rank_features(ds, ev);
      REQUIRE(ranked.entries.size() == 3);
      CHECK(ranked.entries[0].feature == "f0");
      CHECK(ranked.entries[1].feature == "f1");
      CHECK(ranked.position("f2") == 2);
      CHECK(std::is_sorted(ranked.entries.begin(), ranked.entries.end(),
                           [](const auto& a, const auto& b) { return a.score > b.score; }));
    }
  }
  SUBCASE("a separating feature outranks noise") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 200; ++i) {
      const Label c = i % 2;
      rows.push_back({normal(rng), c + 0.1 * normal(rng)});
      labels.push_back(c);
    }
    const auto ds = Dataset::from_rows(rows, labels);
    for (auto ev : {Evaluator::info_gain, Evaluator::correlation})
      CHECK(rank_features(ds, ev).top(1) == std::vector<std::string>{"f1"});
  }
  SUBCASE("single class") {
    const auto ds = Dataset::from_rows({{1}, {2}}, {1, 1});
    CHECK_THROWS_AS(rank_features(ds, Evaluator::info_gain), Error);
  }
  SUBCASE("top, above and position") {
    const RankedList list{{{"a", 0.5}, {"b", 0.3}, {"c", 0.1}}};
    CHECK(list.top(2) == std::vector<std::string>{"a", "b"});
    CHECK(list.top(10).size() == 3);
    CHECK(list.above(0.2) == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(list.position("z"), Error);
  }
}

TEST_CASE("ranking invariances") {
  const auto ds = cleveland();
  const auto ig = rank_features(ds, Evaluator::info_gain);
  const auto corr = rank_features(ds, Evaluator::correlation);

  // Strictly increasing transform of a continuous feature: IG unchanged; affine: |r| unchanged.
  const auto f = ds.feature_index("Chol");
  std::vector<double> values(ds.values().begin(), ds.values().end());
  for (std::size_t r = 0; r < ds.num_rows(); ++r)
    values[r * ds.num_features() + f] = 3.0 * values[r * ds.num_features() + f] + 11.0;
  const Dataset affine(ds.schema(), values, {ds.labels().begin(), ds.labels().end()});
  CHECK(rank_features(affine, Evaluator::info_gain).entries == ig.entries);
  const auto corr_affine = rank_features(affine, Evaluator::correlation);
  for (std::size_t i = 0; i < corr.entries.size(); ++i) {
    CHECK(corr_affine.entries[i].feature == corr.entries[i].feature);
    CHECK(corr_affine.entries[i].score == doctest::Approx(corr.entries[i].score).epsilon(1e-12));
  }

  // Swapping the class labels changes neither score.
  std::vector<Label> flipped(ds.labels().begin(), ds.labels().end());
  for (auto& l : flipped)
    l = 1 - l;
  const Dataset swapped(ds.schema(), {ds.values().begin(), ds.values().end()}, flipped);
  const auto ig_swapped = rank_features(swapped, Evaluator::info_gain);
  for (std::size_t i = 0; i < ig.entries.size(); ++i)
    CHECK(ig_swapped.entries[i].score == doctest::Approx(ig.entries[i].score).epsilon(1e-12));

  // Row order does not matter.
  std::vector<std::size_t> order(ds.num_rows());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = order.size() - 1 - i;
  const auto reversed = rank_features(ds.subset_rows(order), Evaluator::info_gain);
  for (std::size_t i = 0; i < ig.entries.size(); ++i)
    CHECK(reversed.entries[i].score == doctest::Approx(ig.entries[i].score).epsilon(1e-12));
}

TEST_CASE("best-first search") {
  const HyperParams nb = NbParams{};

  SUBCASE("one informative feature among constants") {
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 40; ++i) {
      const Label c = i % 2;
      rows.push_back({1.0, c * 10.0 + (i % 5), 2.0});
      labels.push_back(c);
    }
    const auto result = best_first_subset(Dataset::from_rows(rows, labels), nb, 5, 3);
    CHECK(result.selected == std::vector<std::string>{"f1"});
    CHECK(result.objective == 1.0);
  }

  SUBCASE("unlimited patience matches the exhaustive optimum") {
    const auto full = cleveland();
    const std::vector<std::string> keep{"Age", "Sex", "Cp", "Chol", "MaxHeart", "OldPeak", "Thal",
                                        "fbs"};
    const auto ds = select_columns(full, keep);
    const auto folds = stratified_folds(ds.labels(), 10, 11);
    const auto result = best_first_subset(ds, nb, 10, 11, kUnlimitedStale);
    CHECK(result.expansions == (std::size_t{1} << keep.size()));
    CHECK(result.objective == doctest::Approx(exhaustive_best(ds, nb, folds)).epsilon(1e-12));

    std::vector<std::size_t> cols;
    for (const auto& name : result.selected)
      cols.push_back(ds.feature_index(name));
    CHECK(cross_validate(ds.subset_features(cols), nb, folds, true).mean_accuracy ==
          doctest::Approx(result.objective).epsilon(1e-12));
  }

  SUBCASE("default patience stays near the optimum with noise features") {
    const auto base = select_columns(cleveland(), cleveland_selected_features());
    const auto ds = with_noise(base, 5, 99);
    const auto folds = stratified_folds(ds.labels(), 10, 1);
    const auto result = best_first_subset(ds, nb, 10, 1);
    const double optimum = exhaustive_best(ds, nb, folds);
    CHECK(result.objective <= optimum + 1e-12);
    CHECK(result.objective >= optimum - 0.02);
  }

  SUBCASE("bad arguments") {
    const auto ds = cleveland();
    CHECK_THROWS_AS(best_first_subset(ds, nb, 10, 1, 0), Error);
    CHECK_THROWS_AS(best_first_subset(ds, KnnParams{0}, 10, 1), Error);
  }
}

TEST_CASE("aggregate selection") {
  const auto ds = Dataset::from_rows({{0, 0, 0, 0}, {1, 1, 1, 1}}, {0, 1});
  const RankedList ig{{{"f3", 0.9}, {"f0", 0.5}, {"f1", 0.1}, {"f2", 0.0}}};
  const RankedList corr{{{"f3", 0.9}, {"f1", 0.5}, {"f0", 0.1}, {"f2", 0.0}}};
  const SubsetSearchResult subset{{"f2"}, 0.8, 5};
  CHECK(aggregate_selection(ds, ig, corr, subset, 1) == std::vector<std::string>{"f2", "f3"});
  CHECK(aggregate_selection(ds, ig, corr, {}, 2) == std::vector<std::string>{"f0", "f1", "f3"});
}
