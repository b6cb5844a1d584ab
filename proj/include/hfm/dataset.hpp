#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfm/error.hpp"

namespace hfm {

// Which label sequence feeds the distance vectors: the ground-truth
// labels of the dataset or a classifier's predictions.
enum class LabelChannel { TrueLabels, Predictions };

inline const char* channel_name(LabelChannel c) {
  return c == LabelChannel::TrueLabels ? "true" : "pred";
}

/// Immutable, validated in-memory table shared by every other module.
///
/// Features are min-max scaled to [0,1] per column; sensitive attribute
/// columns hold small positive codes 1..card(i) with code 1 reserved for
/// the privileged group; labels (and optional predictions) are class
/// codes 0..n_classes-1. Construction goes through build_dataset, which
/// enforces every invariant, so downstream code can treat instances as
/// plain read-only data and share them freely across threads.
class Dataset {
 public:
  // An empty dataset; only build_dataset produces a usable one.
  Dataset() = default;

  std::size_t rows() const { return n_; }
  std::size_t feature_count() const { return n_x_; }
  std::size_t attribute_count() const { return n_a_; }
  int class_count() const { return n_c_; }

  double feature(std::size_t row, std::size_t col) const {
    return features_[row * n_x_ + col];
  }
  std::span<const double> feature_row(std::size_t row) const {
    return {features_.data() + row * n_x_, n_x_};
  }
  int attribute(std::size_t row, std::size_t attr) const {
    return sensitive_[row * n_a_ + attr];
  }
  int label(std::size_t row) const { return labels_[row]; }

  bool has_predictions() const { return predictions_.has_value(); }
  int prediction(std::size_t row) const { return (*predictions_)[row]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& predictions() const { return *predictions_; }

  // Number of distinct codes of attribute `attr` (codes are 1..card).
  int attr_cardinality(std::size_t attr) const { return attr_cards_[attr]; }
  const std::vector<int>& attr_cardinalities() const { return attr_cards_; }

  int label_value(std::size_t row, LabelChannel channel) const {
    if (channel == LabelChannel::Predictions) {
      if (!predictions_) throw_data("predictions channel requested but no predictions present");
      return (*predictions_)[row];
    }
    return labels_[row];
  }

  /// Returns a new dataset identical to this one plus a prediction
  /// column (the only sanctioned way to attach predictions later).
  Dataset with_predictions(std::vector<int> predictions) const;

 private:
  friend Dataset build_dataset(const std::vector<std::vector<double>>&,
                               const std::vector<std::vector<int>>&,
                               const std::vector<int>&,
                               const std::optional<std::vector<int>>&);

  std::size_t n_ = 0, n_x_ = 0, n_a_ = 0;
  int n_c_ = 2;
  std::vector<double> features_;   // row-major n x n_x
  std::vector<int> sensitive_;     // row-major n x n_a
  std::vector<int> labels_;
  std::optional<std::vector<int>> predictions_;
  std::vector<int> attr_cards_;
};

/// One row as the operand of the distance measures: [label-or-prediction,
/// scaled features...]. Sensitive attribute codes never appear inside
/// `vector`; `group` carries the code of the examined attribute instead.
struct PointView {
  std::vector<double> vector;  // length 1 + n_x
  int group = 0;
  std::size_t row = 0;
};

namespace detail {

inline void validate_class_codes(const std::vector<int>& codes, int n_c,
                                 const char* what) {
  for (int c : codes) {
    if (c < 0 || c >= n_c)
      throw_data(std::string(what) + " contains class code " + std::to_string(c) +
                 " outside [0, " + std::to_string(n_c) + ")");
  }
}

}  // namespace detail

/// Builds a validated Dataset from raw columns.
///
/// Features are min-max scaled per column to [0,1] (constant columns map
/// to all-zeros, and building from an already-scaled matrix is a
/// bit-identical no-op). Attribute cardinalities are inferred as observed
/// maxima; every code in 1..max must occur at least once, and an
/// attribute with a single distinct value is rejected because its
/// complement sets would be empty.
inline Dataset build_dataset(const std::vector<std::vector<double>>& features,
                             const std::vector<std::vector<int>>& sensitive,
                             const std::vector<int>& labels,
                             const std::optional<std::vector<int>>& predictions = std::nullopt) {
  const std::size_t n = features.size();
  if (n < 2) throw_data("dataset needs at least 2 rows");
  if (sensitive.size() != n || labels.size() != n)
    throw_data("row counts of features, sensitive and labels disagree");
  if (predictions && predictions->size() != n)
    throw_data("predictions length does not match row count");

  const std::size_t n_x = features[0].size();
  const std::size_t n_a = sensitive[0].size();
  if (n_x < 1) throw_data("dataset needs at least one unprotected feature");
  if (n_a < 1) throw_data("dataset needs at least one sensitive attribute");

  Dataset ds;
  ds.n_ = n;
  ds.n_x_ = n_x;
  ds.n_a_ = n_a;
  ds.features_.resize(n * n_x);
  ds.sensitive_.resize(n * n_a);
  ds.labels_ = labels;

  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != n_x) throw_data("ragged feature matrix");
    if (sensitive[i].size() != n_a) throw_data("ragged sensitive matrix");
    for (std::size_t k = 0; k < n_x; ++k) {
      const double v = features[i][k];
      if (!std::isfinite(v)) throw_data("non-finite feature value");
      ds.features_[i * n_x + k] = v;
    }
    for (std::size_t a = 0; a < n_a; ++a) {
      const int code = sensitive[i][a];
      if (code < 1) throw_data("sensitive codes must be positive (1-based)");
      ds.sensitive_[i * n_a + a] = code;
    }
  }

  // Per-column min-max scaling to [0,1]; constant columns become zeros.
  for (std::size_t k = 0; k < n_x; ++k) {
    double lo = ds.features_[k], hi = ds.features_[k];
    for (std::size_t i = 1; i < n; ++i) {
      const double v = ds.features_[i * n_x + k];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double range = hi - lo;
    if (range == 0.0) {
      for (std::size_t i = 0; i < n; ++i) ds.features_[i * n_x + k] = 0.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double& v = ds.features_[i * n_x + k];
        v = (v - lo) / range;
      }
    }
  }

  // Cardinalities: observed maxima; each declared code must occur.
  ds.attr_cards_.resize(n_a);
  for (std::size_t a = 0; a < n_a; ++a) {
    int max_code = 0;
    for (std::size_t i = 0; i < n; ++i)
      max_code = std::max(max_code, ds.sensitive_[i * n_a + a]);
    std::vector<bool> seen(static_cast<std::size_t>(max_code) + 1, false);
    for (std::size_t i = 0; i < n; ++i) seen[ds.sensitive_[i * n_a + a]] = true;
    const long distinct = std::count(seen.begin(), seen.end(), true);
    if (distinct < 2)
      throw_degenerate("degenerate attribute: sensitive attribute " + std::to_string(a) +
                       " has a single distinct value");
    for (int c = 1; c <= max_code; ++c) {
      if (!seen[c])
        throw_data("sensitive attribute " + std::to_string(a) + " declares value " +
                   std::to_string(c) + " that never occurs");
    }
    ds.attr_cards_[a] = max_code;
  }

  int max_label = 1;
  for (int y : labels) {
    if (y < 0) throw_data("class codes must be non-negative");
    max_label = std::max(max_label, y);
  }
  ds.n_c_ = max_label + 1;
  if (predictions) {
    detail::validate_class_codes(*predictions, ds.n_c_, "predictions");
    ds.predictions_ = *predictions;
  }
  return ds;
}

inline Dataset Dataset::with_predictions(std::vector<int> predictions) const {
  if (predictions.size() != n_) throw_data("predictions length does not match row count");
  detail::validate_class_codes(predictions, n_c_, "predictions");
  Dataset copy = *this;
  copy.predictions_ = std::move(predictions);
  return copy;
}

/// Assembles the distance-vector of one row: [label-or-prediction, x...].
inline PointView point_view(const Dataset& ds, std::size_t row, LabelChannel channel,
                            std::optional<std::size_t> attr = std::nullopt) {
  if (row >= ds.rows()) throw_data("row index out of range");
  PointView pv;
  pv.row = row;
  pv.vector.resize(1 + ds.feature_count());
  pv.vector[0] = static_cast<double>(ds.label_value(row, channel));
  for (std::size_t k = 0; k < ds.feature_count(); ++k)
    pv.vector[k + 1] = ds.feature(row, k);
  if (attr) pv.group = ds.attribute(row, *attr);
  return pv;
}

// Flattened n x (1 + n_x) matrix of all distance vectors for one channel.
// Built once per run and shared read-only by the distance kernels.
inline std::vector<double> distance_matrix(const Dataset& ds, LabelChannel channel) {
  const std::size_t n = ds.rows();
  const std::size_t dim = 1 + ds.feature_count();
  std::vector<double> m(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    m[i * dim] = static_cast<double>(ds.label_value(i, channel));
    for (std::size_t k = 0; k < ds.feature_count(); ++k)
      m[i * dim + k + 1] = ds.feature(i, k);
  }
  return m;
}

/// Distance computation method recorded in reports.
enum class DistanceMethod { Exact, Approx };

inline const char* method_name(DistanceMethod m) {
  return m == DistanceMethod::Exact ? "exact" : "approx";
}

struct AttrDistance {
  std::size_t attr = 0;
  double d_max = 0.0;
  double d_avg = 0.0;
};

/// Per-attribute and aggregated set distances plus provenance.
struct DistanceReport {
  std::vector<AttrDistance> per_attribute;
  double aggregate_max = 0.0;   // max over per-attribute d_max
  double aggregate_avg = 0.0;   // mean over per-attribute d_avg
  DistanceMethod method = DistanceMethod::Exact;
  LabelChannel channel = LabelChannel::TrueLabels;
  std::optional<std::uint64_t> seed;
  std::optional<int> m1;
  std::optional<int> m2;
  std::uint64_t distance_evaluations = 0;
  double wall_time_seconds = 0.0;
};

}  // namespace hfm
