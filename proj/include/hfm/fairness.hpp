#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "hfm/approx.hpp"
#include "hfm/dataset.hpp"
#include "hfm/exact.hpp"

namespace hfm {

/// Harmonic fairness degree: log10 of the ratio of the model-channel
/// distance to the data-channel distance. Zero means the classifier adds
/// no bias beyond what the data carries; positive means extra bias.
inline double hfm_degree(double d_data, double d_model) {
  if (!(d_data > 0.0) || !(d_model > 0.0))
    throw_data("zero distance: hfm degree undefined for non-positive distances");
  return std::log10(d_model / d_data);
}

/// Ratio-minus-one variant (the earlier form of the measure); defined as
/// long as the data distance is positive.
inline double hfm_prev(double d_data, double d_model) {
  if (!(d_data > 0.0)) throw_data("zero distance: ratio undefined");
  return d_model / d_data - 1.0;
}

/// Group fairness rates for one attribute, binarized as privileged code
/// vs. all other codes. A metric whose conditioning set is empty is left
/// unset rather than silently reported as 0.
struct GroupRates {
  std::optional<double> dp;   // |P[f=+ | priv] - P[f=+ | marg]|
  std::optional<double> eo;   // same, conditioned on y=+
  std::optional<double> pqp;  // |P[y=+ | priv, f=+] - P[y=+ | marg, f=+]|
};

inline GroupRates group_fairness(const Dataset& ds, std::size_t attr,
                                 int privileged_code = 1, int positive_label = 1) {
  if (!ds.has_predictions()) throw_data("group fairness requires predictions");
  if (attr >= ds.attribute_count()) throw_data("attribute index out of range");
  if (privileged_code < 1 || privileged_code > ds.attr_cardinality(attr))
    throw_config("privileged code outside the attribute's value set");

  // counts[side] with side 1 = privileged, 0 = marginalised
  long n_side[2] = {0, 0};
  long pred_pos[2] = {0, 0};
  long actual_pos[2] = {0, 0};
  long both_pos[2] = {0, 0};

  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const int side = ds.attribute(i, attr) == privileged_code ? 1 : 0;
    const bool fpos = ds.prediction(i) == positive_label;
    const bool ypos = ds.label(i) == positive_label;
    ++n_side[side];
    if (fpos) ++pred_pos[side];
    if (ypos) ++actual_pos[side];
    if (ypos && fpos) ++both_pos[side];
  }

  auto rate_diff = [](long num1, long den1, long num0, long den0) -> std::optional<double> {
    if (den1 == 0 || den0 == 0) return std::nullopt;
    return std::fabs(static_cast<double>(num1) / static_cast<double>(den1) -
                     static_cast<double>(num0) / static_cast<double>(den0));
  };

  GroupRates r;
  r.dp = rate_diff(pred_pos[1], n_side[1], pred_pos[0], n_side[0]);
  r.eo = rate_diff(both_pos[1], actual_pos[1], both_pos[0], actual_pos[0]);
  r.pqp = rate_diff(both_pos[1], pred_pos[1], both_pos[0], pred_pos[0]);
  return r;
}

/// Fraction of rows whose prediction flips under the sensitive-attribute
/// perturbation (normalized Hamming distance between the two sequences).
inline double discriminative_risk(std::span<const int> predictions,
                                  std::span<const int> perturbed_predictions) {
  if (predictions.size() != perturbed_predictions.size() || predictions.empty())
    throw_data("discriminative risk needs two equal-length non-empty sequences");
  long flips = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] != perturbed_predictions[i]) ++flips;
  return static_cast<double>(flips) / static_cast<double>(predictions.size());
}

struct AttrFairness {
  std::size_t attr = 0;
  std::optional<double> df;       // log10(D_pred(a) / D_true(a)), max variant
  std::optional<double> df_avg;   // same on the average variant
  std::optional<double> df_prev;  // ratio-minus-one on the max variant
  std::optional<double> dp, eo, pqp, dr;
};

/// HFM values and baselines, with the two distance reports they came
/// from embedded for provenance.
struct FairnessReport {
  std::optional<double> df;
  std::optional<double> df_avg;
  std::optional<double> df_prev;
  std::vector<AttrFairness> per_attribute;
  std::optional<double> dr_avg;
  DistanceReport data_distance;   // channel TrueLabels
  DistanceReport model_distance;  // channel Predictions
};

struct BaselineConfig {
  bool group_metrics = true;
  int privileged_code = 1;
  int positive_label = 1;
  // One perturbed-prediction sequence per attribute; empty disables DR.
  std::vector<std::vector<int>> perturbed_predictions;
};

namespace detail {

inline std::optional<double> try_hfm(double d_data, double d_model) {
  if (d_data > 0.0 && d_model > 0.0) return std::log10(d_model / d_data);
  return std::nullopt;
}

inline std::optional<double> try_prev(double d_data, double d_model) {
  if (d_data > 0.0) return d_model / d_data - 1.0;
  return std::nullopt;
}

}  // namespace detail

/// Computes distances on the TrueLabels and Predictions channels with
/// the same method (and, for Approx, the same seed and parameters), then
/// derives HFM degrees and the requested baselines.
inline FairnessReport fairness_report(const Dataset& ds, DistanceMethod method,
                                      const ApproxParams& params = {},
                                      const BaselineConfig& baselines = {},
                                      int workers = 1) {
  if (!ds.has_predictions()) throw_data("fairness report requires predictions");
  if (!baselines.perturbed_predictions.empty() &&
      baselines.perturbed_predictions.size() != ds.attribute_count())
    throw_config("need one perturbed prediction sequence per attribute");

  FairnessReport report;
  if (method == DistanceMethod::Exact) {
    report.data_distance = exact_all_attrs(ds, LabelChannel::TrueLabels, workers);
    report.model_distance = exact_all_attrs(ds, LabelChannel::Predictions, workers);
  } else {
    report.data_distance = approx_all_attrs(ds, LabelChannel::TrueLabels, params, workers);
    report.model_distance = approx_all_attrs(ds, LabelChannel::Predictions, params, workers);
  }

  report.df = detail::try_hfm(report.data_distance.aggregate_max,
                              report.model_distance.aggregate_max);
  report.df_avg = detail::try_hfm(report.data_distance.aggregate_avg,
                                  report.model_distance.aggregate_avg);
  report.df_prev = detail::try_prev(report.data_distance.aggregate_max,
                                    report.model_distance.aggregate_max);

  std::vector<double> drs;
  for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
    AttrFairness af;
    af.attr = a;
    const auto& da = report.data_distance.per_attribute[a];
    const auto& ma = report.model_distance.per_attribute[a];
    af.df = detail::try_hfm(da.d_max, ma.d_max);
    af.df_avg = detail::try_hfm(da.d_avg, ma.d_avg);
    af.df_prev = detail::try_prev(da.d_max, ma.d_max);

    if (baselines.group_metrics) {
      GroupRates rates =
          group_fairness(ds, a, baselines.privileged_code, baselines.positive_label);
      af.dp = rates.dp;
      af.eo = rates.eo;
      af.pqp = rates.pqp;
    }
    if (!baselines.perturbed_predictions.empty()) {
      af.dr = discriminative_risk(ds.predictions(), baselines.perturbed_predictions[a]);
      drs.push_back(*af.dr);
    }
    report.per_attribute.push_back(std::move(af));
  }
  if (!drs.empty())
    report.dr_avg = pairwise_sum(drs) / static_cast<double>(drs.size());
  return report;
}

}  // namespace hfm
