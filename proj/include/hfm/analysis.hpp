#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hfm/approx.hpp"
#include "hfm/dataset.hpp"
#include "hfm/exact.hpp"
#include "hfm/numeric.hpp"
#include "hfm/parallel.hpp"
#include "hfm/rng.hpp"
#include "hfm/synth.hpp"

namespace hfm {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Volume of the unit ball in `dim` dimensions: pi^(dim/2) / Gamma(dim/2 + 1).
inline double unit_ball_volume(int dim) {
  return std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

/// One Monte-Carlo check of the projection-ordering probability: the
/// chance that a uniform random direction ranks the shorter of two fixed
/// vectors (lengths r1 <= r2, angle phi) at least as long after
/// projection. The closed form exact_p together with analytic lower and
/// upper envelopes is returned alongside the sampled estimate.
struct Lemma1Case {
  double r1 = 0.0, r2 = 0.0, phi = 0.0;
  long samples = 0;
  double estimated_p = 0.0;
  double exact_p = 0.0;      // theta / pi
  double lower_bound = 0.0;  // sin(phi)/pi * r1/r2
  double upper_bound = 0.0;  // (1 + r1^2/r2^2)^(-1/2) * r1/r2
};

inline Lemma1Case lemma1_estimate(double r1, double r2, double phi, long samples,
                                  std::uint64_t seed, int dim = 2) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || r1 > r2 || phi < 0.0 || phi > kPi || dim < 2)
    throw_config("invalid geometry: need 0 < r1 <= r2, phi in [0, pi], dim >= 2");
  if (samples < 1) throw_config("samples must be positive");

  std::vector<double> v1(dim, 0.0), v2(dim, 0.0);
  v1[0] = r1;
  v2[0] = r2 * std::cos(phi);
  v2[1] = r2 * std::sin(phi);

  std::vector<double> diff(dim), sum(dim);
  for (int k = 0; k < dim; ++k) {
    diff[k] = v2[k] - v1[k];
    sum[k] = v1[k] + v2[k];
  }
  if (norm(diff) < 1e-12 * r2 || norm(sum) < 1e-12 * r2)
    throw_config("invalid geometry: v1 and v2 are (anti)parallel with equal length");

  // Acute angle between the two separating hyperplane normals.
  const double cosang =
      std::fabs(dot(diff, sum)) / (norm(diff) * norm(sum));
  const double theta = std::acos(std::min(1.0, std::max(-1.0, cosang)));

  Lemma1Case c;
  c.r1 = r1;
  c.r2 = r2;
  c.phi = phi;
  c.samples = samples;
  c.exact_p = theta / kPi;
  c.lower_bound = std::sin(phi) / kPi * (r1 / r2);
  c.upper_bound = 1.0 / std::sqrt(1.0 + (r1 * r1) / (r2 * r2)) * (r1 / r2);

  auto gen = make_stream(seed, 0x4c454d31u, 0);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    const std::vector<double> w = random_unit_vector(gen, dim);
    if (std::fabs(dot(w, v1)) >= std::fabs(dot(w, v2))) ++hits;
  }
  c.estimated_p = static_cast<double>(hits) / static_cast<double>(samples);
  return c;
}

/// Inputs of the success-probability lower bound for the randomized
/// projection search: dataset size n, feature dimension k+1, scaled
/// density mu, approximation ratio alpha, and the two hyper-parameters.
struct Prop1Inputs {
  double n = 0.0;
  int k = 0;  // k + 1 = feature dimension
  double mu = 1.0;
  double alpha = 1.0;
  int m1 = 25;
  int m2 = 1;
};

/// Success-probability lower bound 1 - base^m1 with
///   base = pi*mu / (m2 * Vol(B1)) * ((1 + n/mu)^(1/(k+1)) - alpha),
/// base clamped into [0,1] so the result stays a probability. The
/// integral_form flag switches to the sharper variant
///   base = pi*mu / (m2 * Vol(B1)) * (sqrt((1+n/mu)^(2/(k+1)) + 1) - sqrt(alpha^2 + 1)).
inline double prop1_bound(const Prop1Inputs& in, bool integral_form = false) {
  if (!(in.n > 0.0) || !(in.mu > 0.0) || in.alpha < 1.0 || in.m1 < 1 || in.m2 < 1 || in.k < 0)
    throw_config("invalid bound inputs: need n, mu > 0, alpha >= 1, m1, m2 >= 1, k >= 0");
  const int dim = in.k + 1;
  const double vol = unit_ball_volume(dim);
  const double lead = kPi * in.mu / (static_cast<double>(in.m2) * vol);
  const double growth = 1.0 + in.n / in.mu;
  double base;
  if (integral_form) {
    base = lead * (std::sqrt(std::pow(growth, 2.0 / dim) + 1.0) -
                   std::sqrt(in.alpha * in.alpha + 1.0));
  } else {
    base = lead * (std::pow(growth, 1.0 / dim) - in.alpha);
  }
  base = std::min(1.0, std::max(0.0, base));
  return 1.0 - std::pow(base, static_cast<double>(in.m1));
}

/// Order-of-magnitude advisor for the hyper-parameters:
/// lambda = m1 * (lg m2 - lg(n)/(k+1)); the failure mass scales like
/// 10^-lambda, so larger is safer. Also suggests the default
/// m2 = ceil(2*lg n).
struct LambdaAdvice {
  double lambda = 0.0;
  int suggested_m2 = 1;
};

inline LambdaAdvice lambda_advisor(double n, int k, int m1, int m2) {
  if (!(n > 0.0) || k < 0 || m1 < 1 || m2 < 2)
    throw_config("invalid advisor inputs: need n > 0, k >= 0, m1 >= 1, m2 >= 2");
  LambdaAdvice a;
  a.lambda = static_cast<double>(m1) *
             (std::log10(static_cast<double>(m2)) - std::log10(n) / (k + 1));
  a.suggested_m2 = auto_m2(static_cast<std::size_t>(n));
  return a;
}

/// Empirical counterpart of the success bound: uniform two-group clouds
/// in dimension k+1 with a planted close pair; success means the
/// approximate maximal distance stays within alpha times the exact one.
/// Reported side by side with prop1_bound, not asserted against it.
inline double prop1_empirical(std::size_t n, int k, double alpha, int m1, int m2,
                              int trials, std::uint64_t seed, int workers = 1) {
  if (n < 4 || n > 5000) throw_config("empirical harness expects 4 <= n <= 5000");
  if (trials < 1) throw_config("trials must be positive");
  if (alpha < 1.0) throw_config("alpha must be >= 1");

  std::vector<int> successes(static_cast<std::size_t>(trials), 0);
  run_tasks(successes.size(), workers, [&](std::size_t t) {
    auto gen = make_stream(seed, 0x50524f50u, t);

    const std::size_t dim = static_cast<std::size_t>(k) + 1;
    std::vector<std::vector<double>> features(n, std::vector<double>(dim));
    std::vector<std::vector<int>> sensitive(n, std::vector<int>(1));
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) features[i][d] = uniform01(gen);
      sensitive[i][0] = uniform01(gen) < 0.5 ? 1 : 2;
    }
    sensitive[0][0] = 1;
    sensitive[1][0] = 2;
    // Planted close pair across the two groups.
    for (std::size_t d = 0; d < dim; ++d) {
      const double offset = 0.01 * uniform_pm1(gen);
      features[1][d] = std::min(1.0, std::max(0.0, features[0][d] + offset));
    }

    const Dataset ds = build_dataset(features, sensitive, labels);
    const ExactAttrResult exact = exact_attr_distance(ds, 0, LabelChannel::TrueLabels);
    ApproxParams params;
    params.m1 = m1;
    params.m2 = m2;
    params.master_seed = derive_stream_seed(seed, 0x41505052u, t);
    const ApproxAttrResult approx =
        approx_attr_distance(ds, 0, LabelChannel::TrueLabels, params);
    successes[t] = approx.d_max <= alpha * exact.d_max + 1e-12 ? 1 : 0;
  });

  long total = 0;
  for (int s : successes) total += s;
  return static_cast<double>(total) / static_cast<double>(trials);
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw_data("pearson needs two equal-length series of at least 2 values");
  const double n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw_data("pearson undefined for zero-variance series");
  return sxy / std::sqrt(sxx * syy);
}

/// One timing/measurement row of the benchmark table.
struct BenchRow {
  std::string dataset;
  long n = 0;
  std::string method;
  std::string channel;
  double seconds = 0.0;
  double d_max = 0.0;
  double d_avg = 0.0;
};

/// Times exact and approximate all-attribute runs on every available
/// channel, `repeats` times each, and returns plot-ready rows.
inline std::vector<BenchRow> bench(const Dataset& ds, const std::string& label,
                                   const ApproxParams& params, int repeats,
                                   int workers = 1) {
  if (repeats < 1) throw_config("repeats must be positive");
  std::vector<LabelChannel> channels = {LabelChannel::TrueLabels};
  if (ds.has_predictions()) channels.push_back(LabelChannel::Predictions);

  std::vector<BenchRow> rows;
  for (int rep = 0; rep < repeats; ++rep) {
    for (LabelChannel ch : channels) {
      {
        const auto t0 = std::chrono::steady_clock::now();
        const DistanceReport r = exact_all_attrs(ds, ch, workers);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({label, static_cast<long>(ds.rows()), "exact", channel_name(ch),
                        secs, r.aggregate_max, r.aggregate_avg});
      }
      {
        const auto t0 = std::chrono::steady_clock::now();
        const DistanceReport r = approx_all_attrs(ds, ch, params, workers);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({label, static_cast<long>(ds.rows()), "approx", channel_name(ch),
                        secs, r.aggregate_max, r.aggregate_avg});
      }
    }
  }
  return rows;
}

}  // namespace hfm
