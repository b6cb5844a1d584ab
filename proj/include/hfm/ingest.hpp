#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfm/csv.hpp"
#include "hfm/dataset.hpp"
#include "hfm/error.hpp"

namespace hfm {

enum class NaPolicy { DropRows, Error };

/// Declarative description of one sensitive column: the ordered raw
/// values that become codes 1..card (privileged always maps to code 1),
/// plus an optional numeric threshold that first bins the column into
/// "ge"/"lt".
struct SensitiveSpec {
  std::string column;
  std::vector<std::string> values;
  std::string privileged;
  std::optional<double> threshold_gte;
};

/// Declarative description of a CSV dataset.
struct Manifest {
  std::filesystem::path csv_path;
  std::string label_column;
  std::string positive_label;
  std::vector<SensitiveSpec> sensitive;
  std::optional<std::vector<std::string>> feature_columns;  // nullopt = all remaining
  std::vector<std::string> categorical_columns;
  NaPolicy na_policy = NaPolicy::DropRows;
  std::vector<std::string> na_values = {"", "?", "NA"};
};

/// Statistics of a loaded dataset, matching the shape of the usual
/// dataset summary tables (instance count, raw/processed feature counts,
/// privileged group sizes, joint privileged membership).
struct DatasetStats {
  long n_instances = 0;
  int n_features_raw = 0;
  int n_features_processed = 0;
  std::vector<std::pair<std::string, long>> privileged_counts;
  std::optional<long> joint_both;    // privileged in both of the first two attributes
  std::optional<long> joint_either;  // privileged in at least one of them
};

inline Manifest parse_manifest(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {}) {
  Manifest m;
  try {
    m.csv_path = j.at("csv_path").get<std::string>();
    if (m.csv_path.is_relative() && !base_dir.empty()) m.csv_path = base_dir / m.csv_path;
    m.label_column = j.at("label_column").get<std::string>();
    m.positive_label = j.at("positive_label").get<std::string>();
    for (const auto& s : j.at("sensitive")) {
      SensitiveSpec spec;
      spec.column = s.at("column").get<std::string>();
      spec.privileged = s.at("privileged").get<std::string>();
      for (const auto& v : s.at("values")) spec.values.push_back(v.get<std::string>());
      if (s.contains("threshold_gte")) spec.threshold_gte = s["threshold_gte"].get<double>();
      m.sensitive.push_back(std::move(spec));
    }
    if (j.contains("feature_columns") && !j["feature_columns"].is_string())
      m.feature_columns = j["feature_columns"].get<std::vector<std::string>>();
    if (j.contains("categorical_columns"))
      m.categorical_columns = j["categorical_columns"].get<std::vector<std::string>>();
    if (j.contains("na_policy")) {
      const std::string p = j["na_policy"].get<std::string>();
      if (p == "drop_rows") m.na_policy = NaPolicy::DropRows;
      else if (p == "error") m.na_policy = NaPolicy::Error;
      else throw_config("unknown na_policy: " + p);
    }
    if (j.contains("na_values"))
      m.na_values = j["na_values"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw_config(std::string("invalid manifest: ") + e.what());
  }

  if (m.sensitive.empty()) throw_config("manifest declares no sensitive attributes");
  for (const auto& s : m.sensitive) {
    if (s.values.empty()) throw_config("sensitive column " + s.column + " declares no values");
    if (std::find(s.values.begin(), s.values.end(), s.privileged) == s.values.end())
      throw_config("privileged value of " + s.column + " not in its value list");
  }
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_config("manifest is not valid JSON: " + std::string(e.what()));
  }
  return parse_manifest(j, path.parent_path());
}

struct LoadResult {
  Dataset dataset;
  DatasetStats stats;
  std::vector<std::string> label_values;  // raw label of each class code
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Loads a CSV under a manifest: applies the NA policy, bins thresholded
/// sensitive columns, maps sensitive raw values to codes (privileged ->
/// 1, remaining declared values in order), maps labels to class codes
/// (positive_label -> 1 for binary tasks), one-hot encodes declared
/// categoricals with lexicographic level order, and min-max scales
/// features through build_dataset.
inline LoadResult load(const Manifest& manifest) {
  std::ifstream in(manifest.csv_path);
  if (!in) throw_data("cannot open CSV: " + manifest.csv_path.string());
  auto rows = read_csv(in);
  if (rows.size() < 2) throw_data("CSV has no data rows");

  const std::vector<std::string> header = rows.front();
  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (detail::trim(header[c]) == name) return c;
    throw_data("column not found in CSV: " + name);
  };

  const std::size_t label_col = column_index(manifest.label_column);
  std::vector<std::size_t> sensitive_cols;
  for (const auto& s : manifest.sensitive) sensitive_cols.push_back(column_index(s.column));

  // Feature columns: explicit list, or everything that is neither the
  // label nor a sensitive column, in CSV order.
  std::vector<std::size_t> feature_cols;
  if (manifest.feature_columns) {
    for (const auto& name : *manifest.feature_columns) {
      const std::size_t c = column_index(name);
      if (c == label_col) throw_config("label column listed as feature");
      if (std::find(sensitive_cols.begin(), sensitive_cols.end(), c) != sensitive_cols.end())
        throw_config("sensitive column listed as feature: " + name);
      feature_cols.push_back(c);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == label_col) continue;
      if (std::find(sensitive_cols.begin(), sensitive_cols.end(), c) != sensitive_cols.end())
        continue;
      feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) throw_config("no feature columns remain");

  std::set<std::string> categorical(manifest.categorical_columns.begin(),
                                    manifest.categorical_columns.end());
  auto is_na = [&](const std::string& v) {
    const std::string t = detail::trim(v);
    return std::find(manifest.na_values.begin(), manifest.na_values.end(), t) !=
           manifest.na_values.end();
  };

  // Pass 1: row filtering under the NA policy.
  std::vector<std::size_t> kept;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;  // trailing blank line
    if (rows[r].size() != header.size())
      throw_data("CSV row " + std::to_string(r + 1) + " has " +
                 std::to_string(rows[r].size()) + " fields, expected " +
                 std::to_string(header.size()));
    bool has_na = false;
    for (const std::string& v : rows[r]) {
      if (is_na(v)) {
        has_na = true;
        break;
      }
    }
    if (has_na) {
      if (manifest.na_policy == NaPolicy::Error)
        throw_data("missing value in CSV row " + std::to_string(r + 1));
      continue;
    }
    kept.push_back(r);
  }
  if (kept.empty()) throw_data("no rows remain after NA filtering");

  // Sensitive raw value of a row, after optional threshold binning.
  auto sensitive_raw = [&](std::size_t r, std::size_t ai) -> std::string {
    const std::string v = detail::trim(rows[r][sensitive_cols[ai]]);
    const auto& spec = manifest.sensitive[ai];
    if (spec.threshold_gte) {
      double x;
      if (!detail::parse_double(v, x))
        throw_data("non-numeric value '" + v + "' in thresholded column " + spec.column);
      return x >= *spec.threshold_gte ? "ge" : "lt";
    }
    return v;
  };

  // Sensitive codes: privileged -> 1, remaining declared values in order.
  std::vector<std::map<std::string, int>> sens_code(manifest.sensitive.size());
  for (std::size_t ai = 0; ai < manifest.sensitive.size(); ++ai) {
    const auto& spec = manifest.sensitive[ai];
    int next = 2;
    sens_code[ai][spec.privileged] = 1;
    for (const auto& v : spec.values)
      if (v != spec.privileged) sens_code[ai][v] = next++;
  }

  // Label mapping: binary tasks put the positive label at code 1; more
  // classes are coded by sorted raw value.
  std::set<std::string> label_set;
  for (std::size_t r : kept) label_set.insert(detail::trim(rows[r][label_col]));
  if (label_set.size() < 2) throw_data("label column has a single distinct value");
  std::map<std::string, int> label_code;
  std::vector<std::string> label_values;
  if (label_set.size() == 2) {
    if (!label_set.count(manifest.positive_label))
      throw_config("positive_label '" + manifest.positive_label + "' not present in data");
    for (const auto& v : label_set)
      if (v != manifest.positive_label) label_values.push_back(v);
    label_values.push_back(manifest.positive_label);  // -> code 1
  } else {
    label_values.assign(label_set.begin(), label_set.end());
  }
  for (std::size_t c = 0; c < label_values.size(); ++c) label_code[label_values[c]] = static_cast<int>(c);

  // One-hot levels per categorical feature column, lexicographic so the
  // processed feature count is stable across runs.
  std::map<std::size_t, std::vector<std::string>> levels;
  for (std::size_t c : feature_cols) {
    if (!categorical.count(detail::trim(header[c]))) continue;
    std::set<std::string> vals;
    for (std::size_t r : kept) vals.insert(detail::trim(rows[r][c]));
    levels[c].assign(vals.begin(), vals.end());
  }

  const std::size_t n = kept.size();
  std::vector<std::vector<double>> features(n);
  std::vector<std::vector<int>> sensitive(n);
  std::vector<int> labels(n);

  for (std::size_t out = 0; out < n; ++out) {
    const std::size_t r = kept[out];
    auto& frow = features[out];
    for (std::size_t c : feature_cols) {
      auto lev = levels.find(c);
      if (lev != levels.end()) {
        const std::string v = detail::trim(rows[r][c]);
        for (const auto& level : lev->second) frow.push_back(v == level ? 1.0 : 0.0);
      } else {
        double x;
        const std::string v = detail::trim(rows[r][c]);
        if (!detail::parse_double(v, x))
          throw_data("non-numeric value '" + v + "' in numeric column '" +
                     detail::trim(header[c]) + "' (declare it categorical?)");
        frow.push_back(x);
      }
    }
    auto& srow = sensitive[out];
    for (std::size_t ai = 0; ai < manifest.sensitive.size(); ++ai) {
      const std::string v = sensitive_raw(r, ai);
      auto it = sens_code[ai].find(v);
      if (it == sens_code[ai].end())
        throw_data("unknown raw sensitive value '" + v + "' in column " +
                   manifest.sensitive[ai].column);
      srow.push_back(it->second);
    }
    labels[out] = label_code.at(detail::trim(rows[r][label_col]));
  }

  LoadResult result;
  result.dataset = build_dataset(features, sensitive, labels);
  result.label_values = label_values;

  DatasetStats& stats = result.stats;
  stats.n_instances = static_cast<long>(n);
  stats.n_features_raw = static_cast<int>(feature_cols.size());
  stats.n_features_processed = static_cast<int>(result.dataset.feature_count());
  for (std::size_t ai = 0; ai < manifest.sensitive.size(); ++ai) {
    long count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (sensitive[i][ai] == 1) ++count;
    stats.privileged_counts.emplace_back(manifest.sensitive[ai].column, count);
  }
  if (manifest.sensitive.size() >= 2) {
    long both = 0, either = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool p0 = sensitive[i][0] == 1;
      const bool p1 = sensitive[i][1] == 1;
      if (p0 && p1) ++both;
      if (p0 || p1) ++either;
    }
    stats.joint_both = both;
    stats.joint_either = either;
  }
  return result;
}

/// Reads one class code per line, aligned positionally with the CSV rows
/// that survived loading.
inline std::vector<int> load_predictions(const std::filesystem::path& path,
                                         std::size_t expected_n, int n_classes) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open predictions file: " + path.string());
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw_data("predictions file contains non-integer line: '" + t + "'");
    if (value < 0 || value >= n_classes)
      throw_data("prediction value " + std::to_string(value) + " outside [0, " +
                 std::to_string(n_classes) + ")");
    out.push_back(value);
  }
  if (out.size() != expected_n)
    throw_data("predictions file has " + std::to_string(out.size()) + " values, expected " +
               std::to_string(expected_n));
  return out;
}

/// Recomputes the loadable statistics from a built dataset (round-trip
/// check support): privileged counts and joint membership use code 1.
inline DatasetStats stats_from_dataset(const Dataset& ds,
                                       const std::vector<std::string>& attr_names = {}) {
  DatasetStats stats;
  stats.n_instances = static_cast<long>(ds.rows());
  stats.n_features_processed = static_cast<int>(ds.feature_count());
  stats.n_features_raw = 0;  // unknown without the manifest
  for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
    long count = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (ds.attribute(i, a) == 1) ++count;
    const std::string name =
        a < attr_names.size() ? attr_names[a] : "attr" + std::to_string(a);
    stats.privileged_counts.emplace_back(name, count);
  }
  if (ds.attribute_count() >= 2) {
    long both = 0, either = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      const bool p0 = ds.attribute(i, 0) == 1;
      const bool p1 = ds.attribute(i, 1) == 1;
      if (p0 && p1) ++both;
      if (p0 || p1) ++either;
    }
    stats.joint_both = both;
    stats.joint_either = either;
  }
  return stats;
}

}  // namespace hfm
