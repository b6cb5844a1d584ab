#include <catch2/catch_amalgamated.hpp>

#include "hfm/dataset.hpp"
#include "hfm/synth.hpp"

#include "support/oracles.hpp"

using hfm::build_dataset;
using hfm::Dataset;
using hfm::LabelChannel;

TEST_CASE("min-max scaling hits the column endpoints") {
  const Dataset ds = build_dataset({{0.0}, {10.0}}, {{1}, {2}}, {0, 1});
  CHECK(ds.feature(0, 0) == 0.0);
  CHECK(ds.feature(1, 0) == 1.0);
}

TEST_CASE("constant feature columns map to zeros") {
  const Dataset ds = build_dataset({{3.5, 1.0}, {3.5, 2.0}}, {{1}, {2}}, {0, 1});
  CHECK(ds.feature(0, 0) == 0.0);
  CHECK(ds.feature(1, 0) == 0.0);
  CHECK(ds.feature(1, 1) == 1.0);
}

TEST_CASE("scaling is idempotent bit-for-bit") {
  auto gen = hfm::make_stream(7, 0, 0);
  std::vector<std::vector<double>> raw(40, std::vector<double>(3));
  for (auto& row : raw)
    for (auto& v : row) v = hfm::uniform01(gen) * 20.0 - 5.0;
  std::vector<std::vector<int>> sens(40, std::vector<int>(1));
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    sens[i][0] = 1 + static_cast<int>(i % 2);
    labels[i] = static_cast<int>(i % 2);
  }

  const Dataset once = build_dataset(raw, sens, labels);
  std::vector<std::vector<double>> scaled(40, std::vector<double>(3));
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t k = 0; k < 3; ++k) scaled[i][k] = once.feature(i, k);
  const Dataset twice = build_dataset(scaled, sens, labels);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(once.feature(i, k) == twice.feature(i, k));
}

TEST_CASE("single-valued sensitive column is rejected") {
  CHECK_THROWS_MATCHES(build_dataset({{0.0}, {1.0}}, {{1}, {1}}, {0, 1}), hfm::Error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("degenerate attribute")));
}

TEST_CASE("gaps in the attribute code range are rejected") {
  CHECK_THROWS_AS(build_dataset({{0.0}, {1.0}, {0.5}}, {{1}, {3}, {1}}, {0, 1, 0}),
                  hfm::Error);
}

TEST_CASE("construction validates shapes and values") {
  CHECK_THROWS_AS(build_dataset({{0.0}}, {{1}}, {0}), hfm::Error);  // n < 2
  CHECK_THROWS_AS(build_dataset({{0.0}, {1.0}}, {{1}}, {0, 1}), hfm::Error);
  CHECK_THROWS_AS(build_dataset({{0.0}, {std::nan("")}}, {{1}, {2}}, {0, 1}), hfm::Error);
  CHECK_THROWS_AS(build_dataset({{0.0}, {1.0}}, {{0}, {1}}, {0, 1}), hfm::Error);
  CHECK_THROWS_AS(
      build_dataset({{0.0}, {1.0}}, {{1}, {2}}, {0, 1}, std::vector<int>{0, 1, 1}),
      hfm::Error);
  // prediction code outside the label-implied class range
  CHECK_THROWS_AS(
      build_dataset({{0.0}, {1.0}}, {{1}, {2}}, {0, 1}, std::vector<int>{0, 2}),
      hfm::Error);
}

TEST_CASE("cardinalities are inferred from observed maxima") {
  const Dataset ds =
      build_dataset({{0.0}, {1.0}, {0.2}, {0.4}}, {{1, 2}, {2, 1}, {3, 2}, {1, 1}},
                    {0, 1, 0, 1});
  CHECK(ds.attr_cardinality(0) == 3);
  CHECK(ds.attr_cardinality(1) == 2);
}

TEST_CASE("point_view assembles [label, features]") {
  // column spans [0,1] already, so scaling leaves the 0.5 row untouched
  const Dataset ds = build_dataset({{0.0}, {0.5}, {1.0}}, {{1}, {1}, {2}}, {0, 1, 0},
                                   std::vector<int>{0, 0, 0});
  const auto pv_true = hfm::point_view(ds, 1, LabelChannel::TrueLabels);
  CHECK(pv_true.vector == std::vector<double>{1.0, 0.5});
  const auto pv_pred = hfm::point_view(ds, 1, LabelChannel::Predictions);
  CHECK(pv_pred.vector == std::vector<double>{0.0, 0.5});
}

TEST_CASE("point_view length is 1 + n_x") {
  const Dataset ds =
      build_dataset({{0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}}, {{1}, {2}}, {0, 1});
  CHECK(hfm::point_view(ds, 1, LabelChannel::TrueLabels).vector.size() == 4);
}

TEST_CASE("predictions channel requires predictions") {
  const Dataset ds = build_dataset({{0.0}, {1.0}}, {{1}, {2}}, {0, 1});
  CHECK_THROWS_AS(hfm::point_view(ds, 0, LabelChannel::Predictions), hfm::Error);
}

TEST_CASE("sensitive codes never leak into distance vectors") {
  // With binary labels and scaled features every legitimate vector entry
  // lies in [0,1]; attribute codes >= 2 act as sentinels outside that
  // range, so a leak would be visible immediately.
  std::vector<std::vector<double>> features(24, std::vector<double>(2));
  std::vector<std::vector<int>> sens(24, std::vector<int>(2));
  std::vector<int> labels(24);
  auto gen = hfm::make_stream(11, 0, 0);
  for (std::size_t i = 0; i < 24; ++i) {
    features[i] = {hfm::uniform01(gen), hfm::uniform01(gen)};
    sens[i] = {1 + static_cast<int>(i % 4), 1 + static_cast<int>(i % 2)};
    labels[i] = static_cast<int>(i % 2);
  }
  const hfm::Dataset ds = build_dataset(features, sens, labels);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto pv = hfm::point_view(ds, i, LabelChannel::TrueLabels, a);
      CHECK(pv.vector.size() == 1 + ds.feature_count());
      for (double v : pv.vector) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      CHECK(pv.group == ds.attribute(i, a));
    }
  }
}

TEST_CASE("with_predictions validates and preserves immutability") {
  const Dataset ds = build_dataset({{0.0}, {1.0}}, {{1}, {2}}, {0, 1});
  CHECK_FALSE(ds.has_predictions());
  const Dataset ds2 = ds.with_predictions({1, 0});
  CHECK(ds2.has_predictions());
  CHECK_FALSE(ds.has_predictions());
  CHECK_THROWS_AS(ds.with_predictions({1}), hfm::Error);
}
