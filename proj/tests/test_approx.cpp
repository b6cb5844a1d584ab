#include <cmath>
#include <limits>

#include <catch2/catch_amalgamated.hpp>

#include "hfm/approx.hpp"
#include "hfm/exact.hpp"
#include "hfm/synth.hpp"

#include "support/oracles.hpp"

using hfm::ApproxParams;
using hfm::build_dataset;
using hfm::Dataset;
using hfm::LabelChannel;

namespace {

Dataset toy4() {
  return build_dataset({{0.0}, {0.1}, {0.5}, {1.0}}, {{1}, {1}, {2}, {2}}, {0, 0, 0, 1});
}

constexpr double kToyMax = 1.3453624047073710;
constexpr double kToySum = 2.6453624047073710;

std::vector<int> codes_of(const Dataset& ds, std::size_t attr) {
  std::vector<int> c(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) c[i] = ds.attribute(i, attr);
  return c;
}

}  // namespace

TEST_CASE("projection is the plain dot product") {
  hfm::PointView p{{1.0, 0.5}, 0, 0};
  CHECK(hfm::project(p, std::vector<double>{1.0, 0.0}) == 1.0);
  CHECK(hfm::project(p, std::vector<double>{0.0, 1.0}) == 0.5);
}

TEST_CASE("orthogonal pairs: reproducible, orthogonal, inside the box") {
  for (std::size_t dim : {2u, 5u, 9u}) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto t1 = hfm::make_projection_task(123, 0, rep, dim);
      const auto t2 = hfm::make_projection_task(123, 0, rep, dim);
      CHECK(t1.w0 == t2.w0);
      CHECK(t1.w1 == t2.w1);
      REQUIRE(t1.w1.size() == dim);
      CHECK(std::fabs(hfm::dot(t1.w0, t1.w1)) <= 1e-9);
      CHECK(hfm::norm(t1.w0) >= 1e-12);
      CHECK(hfm::norm(t1.w1) >= 1e-12);
      for (double v : t1.w0) CHECK((v >= -1.0 && v <= 1.0));
      for (double v : t1.w1) CHECK((v >= -1.0 && v <= 1.0));
    }
  }
}

TEST_CASE("distinct repetitions draw distinct pairs") {
  const auto a = hfm::make_projection_task(7, 0, 0, 5);
  const auto b = hfm::make_projection_task(7, 0, 1, 5);
  CHECK(a.w0 != b.w0);
  CHECK(a.stream_seed != b.stream_seed);
}

TEST_CASE("ten thousand draws stay inside the box") {
  auto gen = hfm::make_stream(55, 0, 0);
  bool inside = true;
  for (int s = 0; s < 10000 && inside; ++s) {
    const auto t = hfm::sample_orthogonal_pair(gen, 5);
    for (double v : t.w0) inside = inside && v >= -1.0 && v <= 1.0;
    for (double v : t.w1) inside = inside && v >= -1.0 && v <= 1.0;
  }
  CHECK(inside);
}

TEST_CASE("dimension one falls back to a single direction") {
  auto gen = hfm::make_stream(3, 0, 0);
  const auto task = hfm::sample_orthogonal_pair(gen, 1);
  CHECK(task.w0.size() == 1);
  CHECK(task.w1.empty());
}

TEST_CASE("scan of the toy dataset along the feature axis") {
  const Dataset ds = toy4();
  const auto matrix = hfm::distance_matrix(ds, LabelChannel::TrueLabels);
  const std::vector<double> w{0.0, 1.0};  // sort by the single feature
  const auto r = hfm::projection_scan(matrix, 2, codes_of(ds, 0), w, 2);
  CHECK_THAT(r.t_max, Catch::Matchers::WithinAbs(kToyMax, 1e-12));
  CHECK_THAT(r.t_sum, Catch::Matchers::WithinAbs(kToySum, 1e-12));
}

TEST_CASE("scan with m2 >= n equals the exact distances") {
  auto gen = hfm::make_stream(404, 0, 0);
  for (int round = 0; round < 15; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    const auto matrix = hfm::distance_matrix(ds, LabelChannel::TrueLabels);
    const std::size_t dim = 1 + ds.feature_count();
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto exact = hfm::exact_attr_distance(ds, a, LabelChannel::TrueLabels);
      const auto task = hfm::make_projection_task(gen(), a, 0, dim);
      const auto r = hfm::projection_scan(matrix, dim, codes_of(ds, a), task.w0,
                                          static_cast<int>(ds.rows()));
      CHECK(r.t_max == exact.d_max);
      CHECK(r.t_sum / static_cast<double>(ds.rows()) == exact.d_avg);
    }
  }
}

TEST_CASE("anchor group at one extreme still yields finite results") {
  // Group 1 occupies the left end of the projection; for its leftmost
  // anchor every complement point sits to the right.
  const Dataset ds = build_dataset({{0.0}, {0.05}, {0.6}, {0.9}, {1.0}},
                                   {{1}, {1}, {2}, {2}, {2}}, {0, 0, 0, 0, 0});
  const auto matrix = hfm::distance_matrix(ds, LabelChannel::TrueLabels);
  const auto r =
      hfm::projection_scan(matrix, 2, codes_of(ds, 0), std::vector<double>{0.0, 1.0}, 1);
  CHECK(std::isfinite(r.t_max));
  CHECK(std::isfinite(r.t_sum));
}

TEST_CASE("per-direction results shrink as m2 grows") {
  auto gen = hfm::make_stream(505, 0, 0);
  const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), 99);
  const auto matrix = hfm::distance_matrix(ds, LabelChannel::TrueLabels);
  const std::size_t dim = 1 + ds.feature_count();
  const auto task = hfm::make_projection_task(1, 0, 0, dim);
  const auto codes = codes_of(ds, 0);

  double prev_max = std::numeric_limits<double>::infinity();
  double prev_sum = std::numeric_limits<double>::infinity();
  for (int m2 = 1; m2 <= 24; m2 += 1) {
    const auto r = hfm::projection_scan(matrix, dim, codes, task.w0, m2);
    CHECK(r.t_max <= prev_max + 1e-15);
    CHECK(r.t_sum <= prev_sum + 1e-12);
    prev_max = r.t_max;
    prev_sum = r.t_sum;
  }
}

TEST_CASE("approximation with m2 >= n reproduces exact values") {
  auto gen = hfm::make_stream(606, 0, 0);
  for (int round = 0; round < 10; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    ApproxParams params;
    params.m1 = 3;
    params.m2 = static_cast<int>(ds.rows());
    params.master_seed = gen();
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto exact = hfm::exact_attr_distance(ds, a, LabelChannel::TrueLabels);
      const auto approx = hfm::approx_attr_distance(ds, a, LabelChannel::TrueLabels, params);
      CHECK_THAT(approx.d_max, Catch::Matchers::WithinRel(exact.d_max, 1e-12));
      CHECK_THAT(approx.d_avg, Catch::Matchers::WithinRel(exact.d_avg, 1e-12));
    }
  }
}

TEST_CASE("every per-anchor minimum dominates its exact per-point minimum") {
  auto gen = hfm::make_stream(650, 0, 0);
  for (int round = 0; round < 10; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    const auto matrix = hfm::distance_matrix(ds, LabelChannel::TrueLabels);
    const std::size_t dim = 1 + ds.feature_count();
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto exact = hfm::exact_attr_distance(ds, a, LabelChannel::TrueLabels);
      const auto task = hfm::make_projection_task(gen(), a, 0, dim);
      std::vector<double> per_anchor;
      hfm::projection_scan(matrix, dim, codes_of(ds, a), task.w0, 3, &per_anchor);
      REQUIRE(per_anchor.size() == ds.rows());
      for (std::size_t i = 0; i < ds.rows(); ++i)
        CHECK(per_anchor[i] >= exact.per_point.values[i] - 1e-12);
    }
  }
}

TEST_CASE("approximation never undershoots the exact distances") {
  auto gen = hfm::make_stream(707, 0, 0);
  for (int round = 0; round < 30; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    ApproxParams params;
    params.m1 = 1 + round % 8;
    params.m2 = hfm::auto_m2(ds.rows());
    params.master_seed = gen();
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto exact = hfm::exact_attr_distance(ds, a, LabelChannel::TrueLabels);
      const auto approx = hfm::approx_attr_distance(ds, a, LabelChannel::TrueLabels, params);
      CHECK(approx.d_max >= exact.d_max - 1e-9 * (1.0 + exact.d_max));
      CHECK(approx.d_avg >= exact.d_avg - 1e-9 * (1.0 + exact.d_avg));
    }
  }
}

TEST_CASE("results are a pure function of seed, not of scheduling") {
  hfm::SynthSpec spec;
  spec.n = 150;
  spec.n_a = 3;
  spec.cardinalities = {2, 4, 3};
  const Dataset ds = hfm::random_dataset(spec, 42);
  ApproxParams params;
  params.m1 = 25;
  params.m2 = 6;
  params.master_seed = 31337;

  const auto base = hfm::approx_all_attrs(ds, LabelChannel::TrueLabels, params, 1);
  for (int workers : {2, 3, 8}) {
    const auto other = hfm::approx_all_attrs(ds, LabelChannel::TrueLabels, params, workers);
    CHECK(base.aggregate_max == other.aggregate_max);
    CHECK(base.aggregate_avg == other.aggregate_avg);
    for (std::size_t a = 0; a < base.per_attribute.size(); ++a) {
      CHECK(base.per_attribute[a].d_max == other.per_attribute[a].d_max);
      CHECK(base.per_attribute[a].d_avg == other.per_attribute[a].d_avg);
    }
    CHECK(base.distance_evaluations == other.distance_evaluations);
  }
}

TEST_CASE("more repetitions can only tighten the estimate") {
  // Repetition streams are keyed by index, so m1 = 12 replays the first
  // 6 repetitions of the same seed and adds more.
  hfm::SynthSpec spec;
  spec.n = 80;
  const Dataset ds = hfm::random_dataset(spec, 5);
  ApproxParams small, large;
  small.m1 = 6;
  large.m1 = 12;
  small.m2 = large.m2 = 4;
  small.master_seed = large.master_seed = 9;
  const auto a = hfm::approx_attr_distance(ds, 0, LabelChannel::TrueLabels, small);
  const auto b = hfm::approx_attr_distance(ds, 0, LabelChannel::TrueLabels, large);
  CHECK(b.d_max <= a.d_max);
  CHECK(b.d_avg <= a.d_avg);
}

TEST_CASE("distance evaluations stay within the 4*m1*m2*n budget") {
  auto gen = hfm::make_stream(808, 0, 0);
  for (int round = 0; round < 6; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    ApproxParams params;
    params.m1 = 5;
    params.m2 = hfm::auto_m2(ds.rows());
    params.master_seed = gen();
    for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
      const auto r = hfm::approx_attr_distance(ds, a, LabelChannel::TrueLabels, params);
      const std::uint64_t budget = 4ULL * params.m1 * params.m2 * ds.rows();
      CHECK(r.distance_evaluations <= budget);
    }
  }
}

TEST_CASE("all-attribute aggregation mirrors the per-attribute runs") {
  hfm::SynthSpec spec;
  spec.n = 70;
  spec.n_a = 2;
  spec.cardinalities = {3, 2};
  const Dataset ds = hfm::random_dataset(spec, 13);
  ApproxParams params;
  params.m1 = 8;
  params.m2 = 5;
  params.master_seed = 777;

  const auto report = hfm::approx_all_attrs(ds, LabelChannel::TrueLabels, params);
  REQUIRE(report.per_attribute.size() == 2);
  double max = 0.0, sum = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const auto r = hfm::approx_attr_distance(ds, a, LabelChannel::TrueLabels, params);
    CHECK(report.per_attribute[a].d_max == r.d_max);
    CHECK(report.per_attribute[a].d_avg == r.d_avg);
    max = std::max(max, r.d_max);
    sum += r.d_avg;
  }
  CHECK(report.aggregate_max == max);
  CHECK_THAT(report.aggregate_avg, Catch::Matchers::WithinRel(sum / 2.0, 1e-15));
  CHECK(report.method == hfm::DistanceMethod::Approx);
  CHECK(report.m1 == params.m1);
  CHECK(report.m2 == params.m2);
  CHECK(report.seed == params.master_seed);
}

TEST_CASE("heavy projection ties keep the scan exact at m2 >= n") {
  // Grid-valued features collide constantly after projection; the
  // (projection, row) total order must still visit every complement
  // point exactly once.
  auto gen = hfm::make_stream(1111, 0, 0);
  for (int round = 0; round < 10; ++round) {
    const std::size_t n = 30 + static_cast<std::size_t>(hfm::uniform01(gen) * 60);
    std::vector<std::vector<double>> feats(n, std::vector<double>(2));
    std::vector<std::vector<int>> sens(n, std::vector<int>(1));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      feats[i] = {std::floor(hfm::uniform01(gen) * 3.0) / 2.0,
                  std::floor(hfm::uniform01(gen) * 3.0) / 2.0};
      sens[i][0] = i < 2 ? static_cast<int>(i) + 1
                         : 1 + static_cast<int>(hfm::uniform01(gen) * 2);
      labels[i] = static_cast<int>(i % 2);
    }
    feats[0] = {0.0, 0.0};
    feats[1] = {1.0, 1.0};
    const Dataset ds = build_dataset(feats, sens, labels);

    ApproxParams params;
    params.m1 = 2;
    params.m2 = static_cast<int>(n);
    params.master_seed = gen();
    const auto exact = hfm::exact_attr_distance(ds, 0, LabelChannel::TrueLabels);
    const auto approx = hfm::approx_attr_distance(ds, 0, LabelChannel::TrueLabels, params);
    CHECK(approx.d_max == exact.d_max);
    CHECK_THAT(approx.d_avg, Catch::Matchers::WithinRel(exact.d_avg, 1e-12));

    // tight m2 still overestimates under ties
    params.m2 = 1;
    const auto tight = hfm::approx_attr_distance(ds, 0, LabelChannel::TrueLabels, params);
    CHECK(tight.d_max >= exact.d_max - 1e-12);
    CHECK(tight.d_avg >= exact.d_avg - 1e-12);
  }
}

TEST_CASE("approximate d_max dominates approximate d_avg") {
  auto gen = hfm::make_stream(909, 0, 0);
  for (int round = 0; round < 10; ++round) {
    const Dataset ds = hfm::random_dataset(oracle::random_spec(gen), gen());
    ApproxParams params;
    params.m1 = 4;
    params.m2 = 3;
    params.master_seed = gen();
    const auto report = hfm::approx_all_attrs(ds, LabelChannel::TrueLabels, params);
    for (const auto& a : report.per_attribute) CHECK(a.d_max >= a.d_avg);
    CHECK(report.aggregate_max >= report.aggregate_avg);
  }
}
