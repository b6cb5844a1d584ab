// Command-line front end: loads manifest-described CSV datasets, computes
// exact or approximate set distances, HFM degrees, baseline fairness
// measures, and runs the benchmark / validation harnesses. Emits
// versioned JSON reports (or CSV rows) suitable for downstream plotting.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hfm/hfm.hpp"

namespace {

using hfm::json;

struct CommonOpts {
  std::string manifest_path;
  std::string predictions_path;
  std::vector<std::string> perturbed_paths;
  int m1 = 25;
  std::string m2 = "auto";
  std::uint64_t seed = 0;
  int workers = 3;
  std::string channel = "true";
  std::string out;
  std::string format = "json";
};

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "Write the report to this path instead of stdout");
  cmd->add_option("--format", o.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_dataset_flags(CLI::App* cmd, CommonOpts& o, bool predictions_required) {
  cmd->add_option("--manifest", o.manifest_path, "Dataset manifest (JSON)")->required();
  auto* pred = cmd->add_option("--predictions", o.predictions_path,
                               "Predictions file, one class code per line");
  if (predictions_required) pred->required();
  cmd->add_option("--workers", o.workers, "Worker threads (scheduling only, never results)")
      ->check(CLI::PositiveNumber);
}

void add_approx_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--m1", o.m1, "Repetitions (direction pairs)")->check(CLI::PositiveNumber);
  cmd->add_option("--m2", o.m2, "Neighbors compared per side, or 'auto' = ceil(2*lg n)");
  cmd->add_option("--seed", o.seed, "Master seed for the projection streams");
}

hfm::LabelChannel parse_channel(const std::string& s) {
  if (s == "true") return hfm::LabelChannel::TrueLabels;
  if (s == "pred") return hfm::LabelChannel::Predictions;
  hfm::throw_config("channel must be 'true' or 'pred'");
}

int resolve_m2(const std::string& m2, std::size_t n) {
  if (m2 == "auto") return hfm::auto_m2(n);
  int value = 0;
  std::stringstream ss(m2);
  if (!(ss >> value) || !ss.eof() || value < 1)
    hfm::throw_config("--m2 must be a positive integer or 'auto'");
  return value;
}

hfm::Dataset load_dataset(const CommonOpts& o, hfm::DatasetStats* stats_out = nullptr) {
  hfm::Manifest manifest = hfm::load_manifest(o.manifest_path);
  hfm::LoadResult loaded = hfm::load(manifest);
  if (stats_out) *stats_out = loaded.stats;
  if (!o.predictions_path.empty()) {
    auto preds = hfm::load_predictions(o.predictions_path, loaded.dataset.rows(),
                                       loaded.dataset.class_count());
    return loaded.dataset.with_predictions(std::move(preds));
  }
  return loaded.dataset;
}

void emit(const CommonOpts& o, const json& report,
          const std::vector<std::vector<std::string>>& csv_rows) {
  std::ostringstream buffer;
  if (o.format == "csv") {
    for (const auto& row : csv_rows) hfm::write_csv_row(buffer, row);
  } else {
    buffer << report.dump(2) << "\n";
  }
  if (o.out.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) hfm::throw_config("cannot open output path: " + o.out);
    f << buffer.str();
  }
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

json distance_config(const CommonOpts& o, const hfm::DistanceReport& r) {
  json cfg{{"manifest", o.manifest_path},
           {"channel", hfm::channel_name(r.channel)},
           {"workers", o.workers},
           {"method", hfm::method_name(r.method)}};
  if (!o.predictions_path.empty()) cfg["predictions"] = o.predictions_path;
  if (r.method == hfm::DistanceMethod::Approx) {
    cfg["m1"] = *r.m1;
    cfg["m2"] = *r.m2;
    cfg["seed"] = *r.seed;
  }
  return cfg;
}

std::vector<std::vector<std::string>> distance_csv(const hfm::DistanceReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"attr", "d_max", "d_avg"});
  for (const auto& a : r.per_attribute)
    rows.push_back({std::to_string(a.attr), fmt(a.d_max), fmt(a.d_avg)});
  rows.push_back({"aggregate", fmt(r.aggregate_max), fmt(r.aggregate_avg)});
  return rows;
}

int run_distance(const CommonOpts& o, hfm::DistanceMethod method) {
  const hfm::LabelChannel channel = parse_channel(o.channel);
  if (channel == hfm::LabelChannel::Predictions && o.predictions_path.empty())
    hfm::throw_config("--channel pred requires --predictions");
  const hfm::Dataset ds = load_dataset(o);

  hfm::DistanceReport report;
  if (method == hfm::DistanceMethod::Exact) {
    report = hfm::exact_all_attrs(ds, channel, o.workers);
  } else {
    hfm::ApproxParams params;
    params.m1 = o.m1;
    params.m2 = resolve_m2(o.m2, ds.rows());
    params.master_seed = o.seed;
    report = hfm::approx_all_attrs(ds, channel, params, o.workers);
  }

  const std::string command = method == hfm::DistanceMethod::Exact ? "exact" : "approx";
  emit(o, hfm::make_report(command, distance_config(o, report), hfm::to_json(report)),
       distance_csv(report));
  return 0;
}

int run_hfm(const CommonOpts& o, const std::string& method_name) {
  const hfm::Dataset ds = load_dataset(o);

  const hfm::DistanceMethod method = method_name == "approx"
                                         ? hfm::DistanceMethod::Approx
                                         : hfm::DistanceMethod::Exact;
  hfm::ApproxParams params;
  params.m1 = o.m1;
  params.m2 = resolve_m2(o.m2, ds.rows());
  params.master_seed = o.seed;

  hfm::BaselineConfig baselines;
  baselines.group_metrics = false;
  const hfm::FairnessReport report =
      hfm::fairness_report(ds, method, params, baselines, o.workers);

  json cfg{{"manifest", o.manifest_path},
           {"predictions", o.predictions_path},
           {"method", method_name},
           {"workers", o.workers}};
  if (method == hfm::DistanceMethod::Approx) {
    cfg["m1"] = params.m1;
    cfg["m2"] = params.m2;
    cfg["seed"] = params.master_seed;
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"attr", "df", "df_avg", "df_prev"});
  for (const auto& a : report.per_attribute)
    rows.push_back({std::to_string(a.attr), fmt_opt(a.df), fmt_opt(a.df_avg),
                    fmt_opt(a.df_prev)});
  rows.push_back({"aggregate", fmt_opt(report.df), fmt_opt(report.df_avg),
                  fmt_opt(report.df_prev)});

  emit(o, hfm::make_report("hfm", cfg, hfm::to_json(report)), rows);
  return 0;
}

int run_baselines(const CommonOpts& o) {
  const hfm::Dataset ds = load_dataset(o);
  if (!o.perturbed_paths.empty() && o.perturbed_paths.size() != ds.attribute_count())
    hfm::throw_config("--perturbed must be given once per sensitive attribute (" +
                      std::to_string(ds.attribute_count()) + ")");

  std::vector<std::vector<int>> perturbed;
  for (const auto& path : o.perturbed_paths)
    perturbed.push_back(hfm::load_predictions(path, ds.rows(), ds.class_count()));

  json per = json::array();
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"attr", "dp", "eo", "pqp", "dr"});
  std::vector<double> drs;
  for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
    const hfm::GroupRates rates = hfm::group_fairness(ds, a);
    std::optional<double> dr;
    if (!perturbed.empty()) {
      dr = hfm::discriminative_risk(ds.predictions(), perturbed[a]);
      drs.push_back(*dr);
    }
    per.push_back({{"attr", a},
                   {"dp", rates.dp ? json(*rates.dp) : json(nullptr)},
                   {"eo", rates.eo ? json(*rates.eo) : json(nullptr)},
                   {"pqp", rates.pqp ? json(*rates.pqp) : json(nullptr)},
                   {"dr", dr ? json(*dr) : json(nullptr)}});
    rows.push_back({std::to_string(a), fmt_opt(rates.dp), fmt_opt(rates.eo),
                    fmt_opt(rates.pqp), fmt_opt(dr)});
  }
  json body{{"per_attribute", per}};
  body["dr_avg"] = drs.empty()
                       ? json(nullptr)
                       : json(hfm::pairwise_sum(drs) / static_cast<double>(drs.size()));

  json cfg{{"manifest", o.manifest_path}, {"predictions", o.predictions_path}};
  if (!o.perturbed_paths.empty()) cfg["perturbed"] = o.perturbed_paths;
  emit(o, hfm::make_report("baselines", cfg, body), rows);
  return 0;
}

int run_stats(const CommonOpts& o) {
  hfm::DatasetStats stats;
  const hfm::Dataset ds = load_dataset(o, &stats);
  json cfg{{"manifest", o.manifest_path}};
  json body = hfm::to_json(stats);
  body["n_attributes"] = ds.attribute_count();
  body["attr_cardinalities"] = ds.attr_cardinalities();
  body["n_classes"] = ds.class_count();

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"key", "value"});
  rows.push_back({"n_instances", std::to_string(stats.n_instances)});
  rows.push_back({"n_features_raw", std::to_string(stats.n_features_raw)});
  rows.push_back({"n_features_processed", std::to_string(stats.n_features_processed)});
  for (const auto& [name, count] : stats.privileged_counts)
    rows.push_back({"privileged_" + name, std::to_string(count)});
  if (stats.joint_both) rows.push_back({"joint_both", std::to_string(*stats.joint_both)});
  if (stats.joint_either)
    rows.push_back({"joint_either", std::to_string(*stats.joint_either)});

  emit(o, hfm::make_report("stats", cfg, body), rows);
  return 0;
}

int run_bench(const CommonOpts& o, int repeats) {
  const hfm::Dataset ds = load_dataset(o);
  hfm::ApproxParams params;
  params.m1 = o.m1;
  params.m2 = resolve_m2(o.m2, ds.rows());
  params.master_seed = o.seed;

  std::string label = std::filesystem::path(o.manifest_path).stem().string();
  if (label.ends_with(".manifest")) label.resize(label.size() - 9);
  const std::vector<hfm::BenchRow> table = hfm::bench(ds, label, params, repeats, o.workers);

  json body = json::array();
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"dataset", "n", "method", "channel", "seconds", "d_max", "d_avg"});
  for (const auto& r : table) {
    body.push_back(hfm::to_json(r));
    rows.push_back({r.dataset, std::to_string(r.n), r.method, r.channel, fmt(r.seconds),
                    fmt(r.d_max), fmt(r.d_avg)});
  }
  json cfg{{"manifest", o.manifest_path},
           {"m1", params.m1},
           {"m2", params.m2},
           {"seed", params.master_seed},
           {"repeats", repeats},
           {"workers", o.workers}};
  emit(o, hfm::make_report("bench", cfg, body), rows);
  return 0;
}

struct Lemma1Opts {
  double r1 = 0.0, r2 = 0.0, phi = 0.0;
  int cases = 50;
  long samples = 100000;
  std::uint64_t seed = 0;
};

int run_lemma1(const CommonOpts& o, const Lemma1Opts& l, bool single_case) {
  std::vector<hfm::Lemma1Case> cases;
  if (single_case) {
    cases.push_back(hfm::lemma1_estimate(l.r1, l.r2, l.phi, l.samples, l.seed));
  } else {
    auto gen = hfm::make_stream(l.seed, 0x434153u, 0);
    for (int c = 0; c < l.cases; ++c) {
      const double r2 = 0.5 + hfm::uniform01(gen) * 2.0;
      const double r1 = r2 * (0.05 + 0.95 * hfm::uniform01(gen));
      const double phi = 0.05 + hfm::uniform01(gen) * (hfm::kPi - 0.1);
      cases.push_back(
          hfm::lemma1_estimate(r1, r2, phi, l.samples, hfm::splitmix64(l.seed + c)));
    }
  }

  json body = json::array();
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"r1", "r2", "phi", "samples", "estimated_p", "exact_p", "lower_bound",
                  "upper_bound", "within_bounds"});
  bool all_within = true;
  for (const auto& c : cases) {
    const bool within = c.lower_bound <= c.exact_p && c.exact_p <= c.upper_bound;
    all_within = all_within && within;
    json j = hfm::to_json(c);
    j["within_bounds"] = within;
    body.push_back(j);
    rows.push_back({fmt(c.r1), fmt(c.r2), fmt(c.phi), std::to_string(c.samples),
                    fmt(c.estimated_p), fmt(c.exact_p), fmt(c.lower_bound),
                    fmt(c.upper_bound), within ? "1" : "0"});
  }
  json cfg{{"samples", l.samples}, {"seed", l.seed}};
  if (!single_case) cfg["cases"] = l.cases;
  json wrapped{{"cases", body}, {"all_within_bounds", all_within}};
  emit(o, hfm::make_report("validate-lemma1", cfg, wrapped), rows);
  return 0;
}

struct Prop1Opts {
  double n = 1000;
  int k = 2;
  double mu = 1.0;
  double alpha = 1.5;
  int m1 = 25;
  int m2 = 6;
  bool integral_form = false;
  bool empirical = false;
  int trials = 0;
  std::uint64_t seed = 0;
};

int run_prop1(const CommonOpts& o, const Prop1Opts& p) {
  hfm::Prop1Inputs in;
  in.n = p.n;
  in.k = p.k;
  in.mu = p.mu;
  in.alpha = p.alpha;
  in.m1 = p.m1;
  in.m2 = p.m2;
  const double bound = hfm::prop1_bound(in, p.integral_form);

  json body{{"bound", bound},
            {"unit_ball_volume", hfm::unit_ball_volume(p.k + 1)},
            {"integral_form", p.integral_form}};
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"key", "value"});
  rows.push_back({"bound", fmt(bound)});
  if (p.empirical) {
    const double rate = hfm::prop1_empirical(static_cast<std::size_t>(p.n), p.k, p.alpha,
                                             p.m1, p.m2, p.trials, p.seed, o.workers);
    body["empirical_success_rate"] = rate;
    body["trials"] = p.trials;
    rows.push_back({"empirical_success_rate", fmt(rate)});
  }
  json cfg{{"n", p.n},   {"k", p.k},   {"mu", p.mu},     {"alpha", p.alpha},
           {"m1", p.m1}, {"m2", p.m2}, {"seed", p.seed}, {"workers", o.workers}};
  emit(o, hfm::make_report("prop1", cfg, body), rows);
  return 0;
}

int run_advise(const CommonOpts& o, double n, int k, int m1, int m2) {
  const hfm::LambdaAdvice advice = hfm::lambda_advisor(n, k, m1, m2);
  json body{{"lambda", advice.lambda}, {"suggested_m2", advice.suggested_m2}};
  json cfg{{"n", n}, {"k", k}, {"m1", m1}, {"m2", m2}};
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"key", "value"});
  rows.push_back({"lambda", fmt(advice.lambda)});
  rows.push_back({"suggested_m2", std::to_string(advice.suggested_m2)});
  emit(o, hfm::make_report("advise-params", cfg, body), rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HFM: distance-based fairness measurement for datasets and classifiers"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* exact = app.add_subcommand("exact", "Exact set distances (O(n^2) ground truth)");
  add_dataset_flags(exact, o, false);
  exact->add_option("--channel", o.channel, "Label channel: true or pred")
      ->check(CLI::IsMember({"true", "pred"}));
  add_output_flags(exact, o);

  auto* approx = app.add_subcommand("approx", "Approximate set distances (randomized projections)");
  add_dataset_flags(approx, o, false);
  approx->add_option("--channel", o.channel, "Label channel: true or pred")
      ->check(CLI::IsMember({"true", "pred"}));
  add_approx_flags(approx, o);
  add_output_flags(approx, o);

  std::string hfm_method = "exact";
  auto* hfm_cmd = app.add_subcommand("hfm", "HFM fairness degrees (df, df_avg, df_prev)");
  add_dataset_flags(hfm_cmd, o, true);
  hfm_cmd->add_option("--method", hfm_method, "Distance method: exact or approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  add_approx_flags(hfm_cmd, o);
  add_output_flags(hfm_cmd, o);

  auto* baselines = app.add_subcommand("baselines", "DP / EO / PQP and discriminative risk");
  add_dataset_flags(baselines, o, true);
  baselines->add_option("--perturbed", o.perturbed_paths,
                        "Perturbed-prediction file, once per sensitive attribute");
  add_output_flags(baselines, o);

  int repeats = 3;
  auto* bench = app.add_subcommand("bench", "Time exact vs approximate computation");
  add_dataset_flags(bench, o, false);
  add_approx_flags(bench, o);
  bench->add_option("--repeats", repeats, "Repetitions per cell")->check(CLI::PositiveNumber);
  add_output_flags(bench, o);

  Lemma1Opts lemma;
  auto* lemma_cmd = app.add_subcommand("validate-lemma1",
                                       "Monte-Carlo check of the projection-ordering bounds");
  auto* r1_opt = lemma_cmd->add_option("--r1", lemma.r1, "Length of the shorter vector");
  lemma_cmd->add_option("--r2", lemma.r2, "Length of the longer vector");
  lemma_cmd->add_option("--phi", lemma.phi, "Angle between the vectors (radians)");
  lemma_cmd->add_option("--cases", lemma.cases, "Random cases when no geometry is given");
  lemma_cmd->add_option("--samples", lemma.samples, "Monte-Carlo samples per case");
  lemma_cmd->add_option("--seed", lemma.seed, "Seed");
  add_output_flags(lemma_cmd, o);

  Prop1Opts prop;
  auto* prop_cmd = app.add_subcommand("prop1", "Success-probability lower bound calculator");
  prop_cmd->add_option("--n", prop.n, "Dataset size")->required();
  prop_cmd->add_option("--k", prop.k, "k, with k+1 the feature dimension")->required();
  prop_cmd->add_option("--mu", prop.mu, "Scaled density");
  prop_cmd->add_option("--alpha", prop.alpha, "Approximation ratio (>= 1)");
  prop_cmd->add_option("--m1", prop.m1, "Repetitions");
  prop_cmd->add_option("--m2", prop.m2, "Neighbors per side");
  prop_cmd->add_flag("--alt", prop.integral_form, "Use the sharper integral-form bound");
  prop_cmd->add_flag("--empirical", prop.empirical, "Also run the empirical harness");
  prop_cmd->add_option("--trials", prop.trials, "Empirical trials");
  prop_cmd->add_option("--seed", prop.seed, "Seed for the empirical harness");
  prop_cmd->add_option("--workers", o.workers, "Worker threads");
  add_output_flags(prop_cmd, o);

  double adv_n = 0;
  int adv_k = 0, adv_m1 = 25, adv_m2 = 2;
  auto* adv = app.add_subcommand("advise-params", "Hyper-parameter magnitude advisor");
  adv->add_option("--n", adv_n, "Dataset size")->required();
  adv->add_option("--k", adv_k, "k, with k+1 the feature dimension")->required();
  adv->add_option("--m1", adv_m1, "Repetitions");
  adv->add_option("--m2", adv_m2, "Neighbors per side");
  add_output_flags(adv, o);

  auto* stats = app.add_subcommand("stats", "Dataset statistics under a manifest");
  add_dataset_flags(stats, o, false);
  add_output_flags(stats, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << std::endl;
    std::cout << hfm::make_error(hfm::Error(hfm::ErrorCode::ConfigError, e.what())).dump(2)
              << std::endl;
    return 2;
  }

  try {
    if (app.got_subcommand(exact)) return run_distance(o, hfm::DistanceMethod::Exact);
    if (app.got_subcommand(approx)) return run_distance(o, hfm::DistanceMethod::Approx);
    if (app.got_subcommand(hfm_cmd)) return run_hfm(o, hfm_method);
    if (app.got_subcommand(baselines)) return run_baselines(o);
    if (app.got_subcommand(bench)) return run_bench(o, repeats);
    if (app.got_subcommand(lemma_cmd)) return run_lemma1(o, lemma, r1_opt->count() > 0);
    if (app.got_subcommand(prop_cmd)) {
      if (prop.empirical && prop.trials < 1)
        hfm::throw_config("--empirical requires --trials >= 1");
      return run_prop1(o, prop);
    }
    if (app.got_subcommand(adv)) return run_advise(o, adv_n, adv_k, adv_m1, adv_m2);
    if (app.got_subcommand(stats)) return run_stats(o);
  } catch (const hfm::Error& e) {
    std::cout << hfm::make_error(e).dump(2) << std::endl;
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cout << hfm::make_error(hfm::Error(hfm::ErrorCode::DataError, e.what())).dump(2)
              << std::endl;
    return 3;
  }
  return 0;
}
