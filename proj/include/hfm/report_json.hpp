#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hfm/analysis.hpp"
#include "hfm/dataset.hpp"
#include "hfm/fairness.hpp"
#include "hfm/ingest.hpp"
#include "hfm/version.hpp"

namespace hfm {

using json = nlohmann::ordered_json;

namespace detail {

inline json opt(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace detail

inline json to_json(const DistanceReport& r) {
  json per = json::array();
  for (const auto& a : r.per_attribute)
    per.push_back({{"attr", a.attr}, {"d_max", a.d_max}, {"d_avg", a.d_avg}});
  json j{
      {"method", method_name(r.method)},
      {"channel", channel_name(r.channel)},
      {"per_attribute", per},
      {"aggregate_max", r.aggregate_max},
      {"aggregate_avg", r.aggregate_avg},
      {"distance_evaluations", r.distance_evaluations},
      {"wall_time_seconds", r.wall_time_seconds},
  };
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["m1"] = r.m1 ? json(*r.m1) : json(nullptr);
  j["m2"] = r.m2 ? json(*r.m2) : json(nullptr);
  return j;
}

inline json to_json(const FairnessReport& r) {
  json per = json::array();
  for (const auto& a : r.per_attribute) {
    per.push_back({{"attr", a.attr},
                   {"df", detail::opt(a.df)},
                   {"df_avg", detail::opt(a.df_avg)},
                   {"df_prev", detail::opt(a.df_prev)},
                   {"dp", detail::opt(a.dp)},
                   {"eo", detail::opt(a.eo)},
                   {"pqp", detail::opt(a.pqp)},
                   {"dr", detail::opt(a.dr)}});
  }
  return json{
      {"df", detail::opt(r.df)},
      {"df_avg", detail::opt(r.df_avg)},
      {"df_prev", detail::opt(r.df_prev)},
      {"log_base", 10},
      {"per_attribute", per},
      {"dr_avg", detail::opt(r.dr_avg)},
      {"data_distance", to_json(r.data_distance)},
      {"model_distance", to_json(r.model_distance)},
  };
}

inline json to_json(const DatasetStats& s) {
  json priv = json::array();
  for (const auto& [name, count] : s.privileged_counts)
    priv.push_back({{"column", name}, {"privileged_count", count}});
  json j{
      {"n_instances", s.n_instances},
      {"n_features_raw", s.n_features_raw},
      {"n_features_processed", s.n_features_processed},
      {"privileged", priv},
  };
  j["joint_both"] = s.joint_both ? json(*s.joint_both) : json(nullptr);
  j["joint_either"] = s.joint_either ? json(*s.joint_either) : json(nullptr);
  return j;
}

inline json to_json(const Lemma1Case& c) {
  return json{
      {"r1", c.r1},
      {"r2", c.r2},
      {"phi", c.phi},
      {"samples", c.samples},
      {"estimated_p", c.estimated_p},
      {"exact_p", c.exact_p},
      {"lower_bound", c.lower_bound},
      {"upper_bound", c.upper_bound},
  };
}

inline json to_json(const BenchRow& r) {
  return json{
      {"dataset", r.dataset}, {"n", r.n},     {"method", r.method},
      {"channel", r.channel}, {"seconds", r.seconds}, {"d_max", r.d_max},
      {"d_avg", r.d_avg},
  };
}

/// Wraps a command-specific body in the versioned report envelope.
inline json make_report(const std::string& command, json config, json body) {
  return json{
      {"report_version", kReportVersion},
      {"tool", "hfm"},
      {"tool_version", kToolVersion},
      {"command", command},
      {"config", std::move(config)},
      {"result", std::move(body)},
  };
}

inline json make_error(const Error& e) {
  return json{
      {"report_version", kReportVersion},
      {"tool", "hfm"},
      {"tool_version", kToolVersion},
      {"error", {{"code", e.code_string()}, {"message", e.what()}}},
  };
}

}  // namespace hfm
