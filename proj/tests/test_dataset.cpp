#include "cadml/dataset.hpp"
#include "cadml/error.hpp"
#include "cadml/serialization.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace cadml;
using cadml::testing::cleveland_path;
using cadml::testing::data_file;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected cadml::Error");
  return ErrorCode::Usage;
}

} // namespace

TEST_CASE("cleveland schema") {
  const auto& schema = cleveland_schema();
  REQUIRE(schema.size() == 13);
  for (const auto* name : {"Age", "Restbp", "Chol", "MaxHeart", "OldPeak"})
    CHECK(std::find_if(schema.begin(), schema.end(), [&](const auto& f) { return f.name == name; })->kind == FeatureKind::continuous);
  for (const auto& f : schema) {
    if (f.kind == FeatureKind::continuous)
      CHECK_FALSE(f.allowed_values.has_value());
    else
      CHECK_FALSE(f.allowed_values->empty());
  }
  CHECK(schema[11].name == "MajorVessels");
  CHECK(schema[11].kind == FeatureKind::ordinal);
  CHECK(*schema[11].allowed_values == std::vector<double>{0, 1, 2, 3});
  CHECK(*schema[12].allowed_values == std::vector<double>{3, 6, 7});
}

TEST_CASE("parse_csv") {
  SUBCASE("well-formed row") {
    const auto t = parse_csv("63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,0\n",
                             cleveland_schema());
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].complete());
    CHECK(*t.rows[0].cells[9] == 2.3);
    CHECK(*t.rows[0].cells[13] == 0.0);
  }
  SUBCASE("missing cell in column 12") {
    const auto t = parse_csv("52.0,1.0,3.0,138.0,223.0,0.0,0.0,169.0,0.0,0.0,1.0,?,3.0,0\n",
                             cleveland_schema());
    REQUIRE(t.rows.size() == 1);
    CHECK_FALSE(t.rows[0].complete());
    CHECK_FALSE(t.rows[0].cells[11].has_value());
    CHECK(t.rows[0].cells[12].has_value());
  }
  SUBCASE("13 fields") {
    CHECK(code_of([] {
            parse_csv("63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0\n",
                      cleveland_schema());
          }) == ErrorCode::WrongFieldCount);
  }
  SUBCASE("non-numeric cell") {
    try {
      parse_csv("1,2,3,4,5,6,7,8,9,10,11,12,13,0\n1,2,x,4,5,6,7,8,9,10,11,12,13,0\n",
                cleveland_schema());
      FAIL("expected NonNumericCell");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonNumericCell);
      CHECK(std::string(e.what()).find("line 2, column 3") != std::string::npos);
    }
  }
  SUBCASE("blank lines are skipped, empty input is an error") {
    CHECK(parse_csv("\n1,2,3,4,5,6,7,8,9,10,11,12,13,0\n\n", cleveland_schema()).rows.size() == 1);
    CHECK(code_of([] { parse_csv("\n\n", cleveland_schema()); }) == ErrorCode::EmptyInput);
  }
}

TEST_CASE("binarize_target") {
  CHECK(binarize_target(0) == 0);
  CHECK(binarize_target(1) == 1);
  CHECK(binarize_target(2) == 1);
  CHECK(binarize_target(3) == 1);
  CHECK(binarize_target(4) == 1);
  CHECK(code_of([] { binarize_target(5); }) == ErrorCode::OutOfRangeTarget);
  CHECK(code_of([] { binarize_target(-1); }) == ErrorCode::OutOfRangeTarget);
  CHECK(code_of([] { binarize_target(0.5); }) == ErrorCode::OutOfRangeTarget);
}

TEST_CASE("drop_incomplete") {
  SUBCASE("drops rows with a missing cell and folds targets") {
    std::ifstream in(data_file("with_missing.data"));
    const auto raw = parse_csv(in, cleveland_schema());
    const auto ds = drop_incomplete(raw);
    CHECK(ds.num_rows() == 2);
    CHECK(ds.label(0) == 0);
    CHECK(ds.label(1) == 1); // raw target 2
    CHECK(ds.row(1)[0] == 67.0);
  }
  SUBCASE("no missing cells leaves the table unchanged") {
    std::ifstream in(data_file("small.data"));
    const auto raw = parse_csv(in, cleveland_schema());
    const auto ds = drop_incomplete(raw);
    REQUIRE(ds.num_rows() == raw.rows.size());
    for (std::size_t r = 0; r < ds.num_rows(); ++r)
      for (std::size_t f = 0; f < 13; ++f)
        CHECK(ds.row(r)[f] == *raw.rows[r].cells[f]);
  }
  SUBCASE("every row incomplete") {
    std::ifstream in(data_file("all_missing.data"));
    const auto raw = parse_csv(in, cleveland_schema());
    CHECK(code_of([&] { drop_incomplete(raw); }) == ErrorCode::EmptyDataset);
  }
  SUBCASE("values outside a finite domain are rejected") {
    const auto raw = parse_csv("63,1,9,145,233,1,2,150,0,2.3,3,0,6,0\n", cleveland_schema());
    CHECK(code_of([&] { drop_incomplete(raw); }) == ErrorCode::InvalidValue);
  }
}

TEST_CASE("canonical Cleveland file") {
  const auto loaded = load_dataset(cleveland_path());
  CHECK(loaded.summary.parsed == 303);
  CHECK(loaded.summary.dropped == 6);
  CHECK(loaded.summary.kept == 297);
  const auto [neg, pos] = loaded.dataset.class_counts();
  CHECK(neg == 160);
  CHECK(pos == 137);

  // Surviving cells are untouched: compare against a direct re-read.
  std::ifstream in(cleveland_path());
  const auto raw = parse_csv(in, cleveland_schema());
  std::size_t kept = 0;
  for (const auto& row : raw.rows) {
    if (!row.complete())
      continue;
    for (std::size_t f = 0; f < 13; ++f)
      REQUIRE(loaded.dataset.row(kept)[f] == *row.cells[f]);
    ++kept;
  }

  // Deterministic serialization.
  CHECK(to_json(load_dataset(cleveland_path()).dataset).dump() == to_json(loaded.dataset).dump());
}

TEST_CASE("header variant") {
  const auto with_header = load_dataset(data_file("header.csv"));
  const auto plain = load_dataset(data_file("small.data"));
  CHECK(with_header.dataset.num_rows() == plain.dataset.num_rows());
  CHECK(with_header.dataset.values().size() == plain.dataset.values().size());
  CHECK(with_header.dataset.schema()[7].name == "thalach");
  CHECK(with_header.dataset.schema()[12].kind == FeatureKind::categorical);

  std::istringstream generic("height,weight,target\n1.5,60,0\n1.8,90,1\n");
  const auto g = load_dataset(generic, "inline");
  CHECK(g.dataset.num_features() == 2);
  CHECK(g.dataset.schema()[1].kind == FeatureKind::continuous);
}

TEST_CASE("select_columns") {
  const auto ds = load_dataset(cleveland_path()).dataset;
  SUBCASE("schema order is the identity") {
    const auto names = ds.feature_names();
    CHECK(select_columns(ds, names) == ds);
  }
  SUBCASE("the seven selected features") {
    const auto seven = select_columns(ds, cleveland_selected_features());
    CHECK(seven.num_features() == 7);
    CHECK(seven.num_rows() == 297);
    CHECK(seven.feature_names() == cleveland_selected_features());
    CHECK(seven.row(0)[1] == ds.row(0)[ds.feature_index("MaxHeart")]);
    CHECK(std::equal(seven.labels().begin(), seven.labels().end(), ds.labels().begin()));
  }
  SUBCASE("unknown feature") {
    const std::vector<std::string> keep{"Cp", "BloodType"};
    CHECK(code_of([&] { select_columns(ds, keep); }) == ErrorCode::UnknownFeature);
  }
}

TEST_CASE("standardize") {
  SUBCASE("sample standard deviation") {
    const auto ds = Dataset::from_rows({{1.0}, {2.0}, {3.0}}, {0, 1, 0});
    const auto [scaled, stats] = standardize(ds);
    CHECK(stats.mean[0] == 2.0);
    CHECK(stats.stddev[0] == 1.0);
    CHECK(scaled.row(0)[0] == -1.0);
    CHECK(scaled.row(1)[0] == 0.0);
    CHECK(scaled.row(2)[0] == 1.0);
  }
  SUBCASE("constant column passes through") {
    const auto ds = Dataset::from_rows({{5.0}, {5.0}, {5.0}}, {0, 1, 0});
    const auto [scaled, stats] = standardize(ds);
    CHECK(stats.stddev[0] == 0.0);
    CHECK(scaled == ds);
  }
  SUBCASE("supplied stats are reused, not recomputed") {
    const auto ds = Dataset::from_rows({{1.0}, {2.0}, {3.0}}, {0, 1, 0});
    const auto [once, stats] = standardize(ds);
    const auto [twice, stats2] = standardize(once, stats);
    CHECK(stats2 == stats);
    CHECK(twice.row(2)[0] == doctest::Approx((1.0 - 2.0) / 1.0));
  }
  SUBCASE("only continuous features are scaled; inverse recovers inputs") {
    const auto ds = load_dataset(cleveland_path()).dataset;
    const auto [scaled, stats] = standardize(ds);
    const auto cp = ds.feature_index("Cp");
    const auto age = ds.feature_index("Age");
    for (std::size_t r = 0; r < ds.num_rows(); ++r) {
      CHECK(scaled.row(r)[cp] == ds.row(r)[cp]);
      std::vector<double> back(scaled.row(r).begin(), scaled.row(r).end());
      invert_scaling(stats, ds.schema(), back);
      for (std::size_t f = 0; f < ds.num_features(); ++f)
        REQUIRE(std::abs(back[f] - ds.row(r)[f]) <= 1e-12 * std::max(1.0, std::abs(ds.row(r)[f])));
    }
    CHECK(scaled.row(0)[age] != ds.row(0)[age]);
  }
  SUBCASE("mismatched stats") {
    const auto ds = Dataset::from_rows({{1.0, 2.0}, {2.0, 3.0}}, {0, 1});
    const ScalingStats bad{{0.0}, {1.0}};
    CHECK(code_of([&] { standardize(ds, bad); }) == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("dataset json golden file") {
  const auto ds = load_dataset(data_file("small.data")).dataset;
  auto j = to_json(ds);
  j["provenance"] = "small.data";
  std::ifstream golden(data_file("small.golden.json"));
  REQUIRE_MESSAGE(golden.good(), "golden file missing");
  std::stringstream expected;
  expected << golden.rdbuf();
  CHECK(j.dump(2) + "\n" == expected.str());
  CHECK(dataset_from_json(j) == Dataset(ds.schema(), {ds.values().begin(), ds.values().end()},
                                        {ds.labels().begin(), ds.labels().end()}, "small.data"));
}
