#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hfm/dataset.hpp"
#include "hfm/numeric.hpp"
#include "hfm/parallel.hpp"
#include "hfm/rng.hpp"

namespace hfm {

/// Hyper-parameters of the randomized-projection approximation: m1 is
/// the number of repetitions (orthogonal direction pairs), m2 the number
/// of qualifying neighbors compared on each side of an anchor.
struct ApproxParams {
  int m1 = 25;
  int m2 = 1;  // callers usually resolve "auto" to ceil(2*log10(n))
  std::uint64_t master_seed = 0;
};

inline int auto_m2(std::size_t n) {
  return static_cast<int>(std::ceil(2.0 * std::log10(static_cast<double>(n))));
}

/// One repetition's pair of direction vectors plus the identity of the
/// RNG stream that produced them. w1 is empty in the one-dimensional
/// fallback, where only a single direction is usable.
struct ProjectionTask {
  std::vector<double> w0;
  std::vector<double> w1;
  int repetition_index = 0;
  std::uint64_t stream_seed = 0;
};

/// Draws a direction pair for one repetition: w0 uniform in the
/// [-1,1]^dim box (resampled while its norm is below 1e-12), w1 sampled
/// the same way, orthogonalized against w0, resampled while the residual
/// is negligible, then rescaled by 1/max-abs back into the box.
inline ProjectionTask sample_orthogonal_pair(std::mt19937_64& gen, std::size_t dim) {
  auto sample_box = [&] {
    std::vector<double> w(dim);
    do {
      for (auto& x : w) x = uniform_pm1(gen);
    } while (norm(w) < 1e-12);
    return w;
  };

  ProjectionTask task;
  task.w0 = sample_box();
  if (dim == 1) return task;  // single-direction fallback

  while (true) {
    std::vector<double> w1 = sample_box();
    const double coef = dot(w1, task.w0) / squared_norm(task.w0);
    for (std::size_t k = 0; k < dim; ++k) w1[k] -= coef * task.w0[k];
    if (norm(w1) >= 1e-12) {
      const double inv = 1.0 / max_abs(w1);
      for (auto& x : w1) x *= inv;
      task.w1 = std::move(w1);
      return task;
    }
  }
}

inline ProjectionTask make_projection_task(std::uint64_t master_seed, std::size_t attr,
                                           int repetition, std::size_t dim) {
  auto gen = make_stream(master_seed, attr, static_cast<std::uint64_t>(repetition));
  ProjectionTask task = sample_orthogonal_pair(gen, dim);
  task.repetition_index = repetition;
  task.stream_seed = derive_stream_seed(master_seed, attr, static_cast<std::uint64_t>(repetition));
  return task;
}

/// Projects one distance vector onto direction w.
inline double project(const PointView& p, std::span<const double> w) {
  return dot(p.vector, w);
}

struct ScanResult {
  double t_max = 0.0;   // max over anchors of the per-anchor minimum
  double t_sum = 0.0;   // sum over anchors of the per-anchor minimum
  std::uint64_t distance_evaluations = 0;
};

/// Single-direction scan: sorts all points by their 1-D projection and,
/// for each anchor, compares against up to m2 qualifying neighbors
/// (different attribute code) strictly before and strictly after it in
/// the sorted order. The per-anchor minimum never undershoots the true
/// minimum over the full complement, because it is a minimum over a
/// subset of it. `per_anchor_out`, when given, receives the per-row
/// minima (indexed by original row).
inline ScanResult projection_scan(std::span<const double> matrix, std::size_t dim,
                                  std::span<const int> codes,
                                  std::span<const double> w, int m2,
                                  std::vector<double>* per_anchor_out = nullptr) {
  const std::size_t n = codes.size();
  std::vector<double> projected(n);
  for (std::size_t i = 0; i < n; ++i)
    projected[i] = dot(std::span<const double>{matrix.data() + i * dim, dim}, w);

  // Total order (projection, row) makes the scan deterministic and keeps
  // ties from being visited twice or the anchor from seeing itself.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (projected[a] != projected[b]) return projected[a] < projected[b];
    return a < b;
  });

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> per_anchor(n, kInf);
  std::uint64_t evals = 0;

  auto sq_dist = [&](std::size_t i, std::size_t j) {
    const double* pi = matrix.data() + i * dim;
    const double* pj = matrix.data() + j * dim;
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = pi[k] - pj[k];
      s += diff * diff;
    }
    return s;
  };

  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    const int own = codes[i];

    double left_sq = kInf;
    int found = 0;
    for (std::size_t q = p; q-- > 0 && found < m2;) {
      const std::size_t j = order[q];
      if (codes[j] == own) continue;
      left_sq = std::min(left_sq, sq_dist(i, j));
      ++evals;
      ++found;
    }

    double right_sq = kInf;
    found = 0;
    for (std::size_t q = p + 1; q < n && found < m2; ++q) {
      const std::size_t j = order[q];
      if (codes[j] == own) continue;
      right_sq = std::min(right_sq, sq_dist(i, j));
      ++evals;
      ++found;
    }

    // The complement is non-empty, so at least one side found a candidate.
    per_anchor[i] = std::sqrt(std::min(left_sq, right_sq));
  }

  ScanResult res;
  for (double v : per_anchor) res.t_max = std::max(res.t_max, v);
  res.t_sum = pairwise_sum(per_anchor);
  res.distance_evaluations = evals;
  if (per_anchor_out) *per_anchor_out = std::move(per_anchor);
  return res;
}

struct ApproxAttrResult {
  double d_max = 0.0;
  double d_avg = 0.0;
  std::uint64_t distance_evaluations = 0;
};

namespace detail {

struct RepetitionOutcome {
  double d_max = std::numeric_limits<double>::infinity();
  double d_sum = std::numeric_limits<double>::infinity();
  std::uint64_t evals = 0;
};

// One repetition: draw the orthogonal pair from the (seed, attr, rep)
// stream, scan with each direction, keep the smaller t_max and the
// smaller t_sum independently.
inline RepetitionOutcome run_repetition(std::span<const double> matrix, std::size_t dim,
                                        std::span<const int> codes,
                                        std::uint64_t master_seed, std::size_t attr,
                                        int rep, int m2) {
  const ProjectionTask task = make_projection_task(master_seed, attr, rep, dim);
  RepetitionOutcome out;
  ScanResult s0 = projection_scan(matrix, dim, codes, task.w0, m2);
  out.d_max = s0.t_max;
  out.d_sum = s0.t_sum;
  out.evals = s0.distance_evaluations;
  if (!task.w1.empty()) {
    ScanResult s1 = projection_scan(matrix, dim, codes, task.w1, m2);
    out.d_max = std::min(out.d_max, s1.t_max);
    out.d_sum = std::min(out.d_sum, s1.t_sum);
    out.evals += s1.distance_evaluations;
  }
  return out;
}

}  // namespace detail

/// Approximates one attribute's (d_max, d_avg) with m1 repetitions of
/// the projection scan over orthogonal direction pairs, taking the
/// minimum across repetitions. Every repetition overestimates, so the
/// result still never undershoots the exact values. Deterministic for a
/// fixed master_seed regardless of worker count or scheduling.
inline ApproxAttrResult approx_attr_distance(const Dataset& ds, std::size_t attr,
                                             LabelChannel channel,
                                             const ApproxParams& params,
                                             int workers = 1) {
  if (attr >= ds.attribute_count()) throw_data("attribute index out of range");
  if (params.m1 < 1 || params.m2 < 1) throw_data("m1 and m2 must be positive");

  const std::size_t dim = 1 + ds.feature_count();
  const std::vector<double> matrix = distance_matrix(ds, channel);
  const std::vector<int> codes = [&] {
    std::vector<int> c(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) c[i] = ds.attribute(i, attr);
    return c;
  }();

  std::vector<detail::RepetitionOutcome> outcomes(static_cast<std::size_t>(params.m1));
  run_tasks(outcomes.size(), workers, [&](std::size_t rep) {
    outcomes[rep] = detail::run_repetition(matrix, dim, codes, params.master_seed, attr,
                                           static_cast<int>(rep), params.m2);
  });

  ApproxAttrResult res;
  double best_max = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    best_max = std::min(best_max, o.d_max);
    best_sum = std::min(best_sum, o.d_sum);
    res.distance_evaluations += o.evals;
  }
  res.d_max = best_max;
  res.d_avg = best_sum / static_cast<double>(ds.rows());
  return res;
}

/// Approximate counterpart of exact_all_attrs: runs the per-attribute
/// approximation for every sensitive attribute and aggregates by max
/// (maximal measure) and mean (average measure). The (attr, repetition)
/// tasks form one flat pool, so attribute order and parallel schedule
/// cannot change the outcome.
inline DistanceReport approx_all_attrs(const Dataset& ds, LabelChannel channel,
                                       const ApproxParams& params, int workers = 1) {
  if (params.m1 < 1 || params.m2 < 1) throw_data("m1 and m2 must be positive");
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t n_a = ds.attribute_count();
  const std::size_t dim = 1 + ds.feature_count();
  const std::vector<double> matrix = distance_matrix(ds, channel);

  std::vector<std::vector<int>> codes(n_a);
  for (std::size_t a = 0; a < n_a; ++a) {
    codes[a].resize(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) codes[a][i] = ds.attribute(i, a);
  }

  const std::size_t reps = static_cast<std::size_t>(params.m1);
  std::vector<detail::RepetitionOutcome> outcomes(n_a * reps);
  run_tasks(outcomes.size(), workers, [&](std::size_t t) {
    const std::size_t a = t / reps;
    const int rep = static_cast<int>(t % reps);
    outcomes[t] = detail::run_repetition(matrix, dim, codes[a], params.master_seed, a,
                                         rep, params.m2);
  });

  DistanceReport report;
  report.method = DistanceMethod::Approx;
  report.channel = channel;
  report.seed = params.master_seed;
  report.m1 = params.m1;
  report.m2 = params.m2;

  std::vector<double> avgs;
  for (std::size_t a = 0; a < n_a; ++a) {
    double best_max = std::numeric_limits<double>::infinity();
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& o = outcomes[a * reps + rep];
      best_max = std::min(best_max, o.d_max);
      best_sum = std::min(best_sum, o.d_sum);
      report.distance_evaluations += o.evals;
    }
    const double d_avg = best_sum / static_cast<double>(ds.rows());
    report.per_attribute.push_back({a, best_max, d_avg});
    report.aggregate_max = std::max(report.aggregate_max, best_max);
    avgs.push_back(d_avg);
  }
  report.aggregate_avg = pairwise_sum(avgs) / static_cast<double>(avgs.size());
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace hfm
