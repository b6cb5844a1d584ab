#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hfm/dataset.hpp"
#include "hfm/numeric.hpp"
#include "hfm/parallel.hpp"

namespace hfm {

/// Per-point minimum distances to the complement group: entry i is the
/// distance from point i to its nearest point with a different code of
/// the examined attribute. Retained because the approximation tests need
/// the per-point oracle minima, not just the two summaries.
struct PerPointMins {
  std::vector<double> values;
};

/// Standard Euclidean metric on distance vectors.
inline double euclidean(const PointView& p, const PointView& q) {
  if (p.vector.size() != q.vector.size())
    throw_data("euclidean: vector lengths differ");
  return euclidean(std::span<const double>(p.vector), std::span<const double>(q.vector));
}

struct ExactAttrResult {
  double d_max = 0.0;
  double d_avg = 0.0;
  PerPointMins per_point;
};

namespace detail {

// Fills per_point[i] = min over rows j with codes[j] != codes[i] of the
// Euclidean distance between distance-vectors i and j. Plain O(n^2)
// scan; each entry is independent, so chunking rows across workers is
// bit-identical to the sequential run.
inline void per_point_complement_mins(std::span<const double> matrix, std::size_t dim,
                                      std::span<const int> codes,
                                      std::vector<double>& per_point, int workers) {
  const std::size_t n = codes.size();
  per_point.assign(n, std::numeric_limits<double>::infinity());
  run_chunked(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::span<const double> pi{matrix.data() + i * dim, dim};
      double best_sq = std::numeric_limits<double>::infinity();
      const int own = codes[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (codes[j] == own) continue;
        std::span<const double> pj{matrix.data() + j * dim, dim};
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = pi[k] - pj[k];
          s += diff * diff;
        }
        if (s < best_sq) best_sq = s;
      }
      per_point[i] = std::sqrt(best_sq);
    }
  });
}

inline std::vector<int> attribute_column(const Dataset& ds, std::size_t attr) {
  std::vector<int> codes(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) codes[i] = ds.attribute(i, attr);
  return codes;
}

}  // namespace detail

/// Exact per-attribute distances: d_max is the largest per-point minimum
/// over the complement group, d_avg their mean. This is the O(n^2)
/// ground-truth path the approximation is checked against.
inline ExactAttrResult exact_attr_distance(const Dataset& ds, std::size_t attr,
                                           LabelChannel channel, int workers = 1) {
  if (attr >= ds.attribute_count()) throw_data("attribute index out of range");
  const std::size_t dim = 1 + ds.feature_count();
  const std::vector<double> matrix = distance_matrix(ds, channel);
  const std::vector<int> codes = detail::attribute_column(ds, attr);

  ExactAttrResult res;
  detail::per_point_complement_mins(matrix, dim, codes, res.per_point.values, workers);

  double d_max = 0.0;
  for (double v : res.per_point.values) d_max = std::max(d_max, v);
  res.d_max = d_max;
  res.d_avg = pairwise_sum(res.per_point.values) / static_cast<double>(ds.rows());
  return res;
}

/// Aggregates exact distances over all attributes: max of the per-attribute
/// maxima, mean of the per-attribute averages.
inline DistanceReport exact_all_attrs(const Dataset& ds, LabelChannel channel,
                                      int workers = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  DistanceReport report;
  report.method = DistanceMethod::Exact;
  report.channel = channel;

  std::vector<double> avgs;
  for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
    ExactAttrResult r = exact_attr_distance(ds, a, channel, workers);
    report.per_attribute.push_back({a, r.d_max, r.d_avg});
    report.aggregate_max = std::max(report.aggregate_max, r.d_max);
    avgs.push_back(r.d_avg);
    // n * (n - |own group|) pair evaluations, summed over groups
    std::vector<std::uint64_t> group_sizes(ds.attr_cardinality(a) + 1, 0);
    for (std::size_t i = 0; i < ds.rows(); ++i) ++group_sizes[ds.attribute(i, a)];
    std::uint64_t evals = static_cast<std::uint64_t>(ds.rows()) * ds.rows();
    for (std::uint64_t g : group_sizes) evals -= g * g;
    report.distance_evaluations += evals;
  }
  report.aggregate_avg = pairwise_sum(avgs) / static_cast<double>(avgs.size());
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Symmetric two-set max-min distance for a binary attribute; equals
/// exact_attr_distance(...).d_max and exists as the independent
/// cross-check route for that reduction.
inline double hausdorff_two_sets(const Dataset& ds, std::size_t attr,
                                 LabelChannel channel) {
  if (attr >= ds.attribute_count()) throw_data("attribute index out of range");
  if (ds.attr_cardinality(attr) != 2)
    throw_data("hausdorff_two_sets requires a binary attribute");

  const std::size_t n = ds.rows();
  const std::size_t dim = 1 + ds.feature_count();
  const std::vector<double> matrix = distance_matrix(ds, channel);

  std::vector<std::size_t> side1, side2;
  for (std::size_t i = 0; i < n; ++i)
    (ds.attribute(i, attr) == 1 ? side1 : side2).push_back(i);

  auto directed = [&](const std::vector<std::size_t>& from,
                      const std::vector<std::size_t>& to) {
    double worst = 0.0;
    for (std::size_t i : from) {
      std::span<const double> pi{matrix.data() + i * dim, dim};
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j : to) {
        std::span<const double> pj{matrix.data() + j * dim, dim};
        best = std::min(best, euclidean(pi, pj));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };

  return std::max(directed(side1, side2), directed(side2, side1));
}

}  // namespace hfm
