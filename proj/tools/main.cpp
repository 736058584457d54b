// weakiv: command-line front end for the IV estimation library.
//
// Exit codes: 0 success, 1 usage error, 2 data or numeric error.
// Results go to --output (or standard output); everything else that is not
// a result, including progress notes and error messages, goes to standard
// error. All emitted numbers use 6 significant digits.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "weakiv/diagnostics.hpp"
#include "weakiv/estimators.hpp"
#include "weakiv/ingestion.hpp"
#include "weakiv/report.hpp"
#include "weakiv/rng.hpp"
#include "weakiv/simulation.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numbers in JSON documents carry the same 6-significant-digit precision as
// the CSV tables, so the two formats agree cell for cell.
double round6(double x) {
  return std::strtod(weakiv::fmt6(x).c_str(), nullptr);
}

json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  return round6(x);
}

std::vector<weakiv::Estimator> parse_estimators(
    const std::vector<std::string>& names, bool allow_kclass) {
  if (names.empty()) throw UsageError("--estimators must not be empty");
  std::vector<weakiv::Estimator> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    const auto e = weakiv::estimator_from_name(n);
    if (!e) throw UsageError("unknown estimator '" + n + "'");
    if (*e == weakiv::Estimator::KClass && !allow_kclass) {
      throw UsageError("estimator 'kclass' is not available for this verb");
    }
    out.push_back(*e);
  }
  return out;
}

weakiv::ColumnSpec load_schema(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw weakiv::FileNotFound("cannot open schema '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw weakiv::SchemaMismatch("schema '" + path + "' is not valid JSON: " +
                                 e.what());
  }
  weakiv::ColumnSpec spec;
  try {
    spec.outcome = j.at("outcome").get<std::string>();
    spec.endogenous = j.at("endogenous").get<std::vector<std::string>>();
    if (j.contains("control_categoricals")) {
      spec.control_categoricals =
          j["control_categoricals"].get<std::vector<std::string>>();
    }
    if (j.contains("instrument_categoricals")) {
      spec.instrument_categoricals =
          j["instrument_categoricals"].get<std::vector<std::string>>();
    }
    if (j.contains("interactions")) {
      for (const auto& pair : j["interactions"]) {
        if (!pair.is_array() || pair.size() != 2) {
          throw weakiv::SchemaMismatch(
              "each interaction must be a two-element array");
        }
        spec.interactions.emplace_back(pair[0].get<std::string>(),
                                       pair[1].get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw weakiv::SchemaMismatch("schema '" + path +
                                 "' missing or mistyped field: " + e.what());
  }
  return spec;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw weakiv::Error("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw weakiv::Error("failed writing output file '" + path + "'");
}

std::string csv_cell(const std::optional<double>& v) {
  return v ? weakiv::fmt6(*v) : std::string();
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string input;
  std::string schema;
  std::vector<std::string> estimators{"ols", "2sls", "liml", "jive"};
  double kappa = -1.0;  // negative = not given
  std::string format = "csv";
  std::string output;
};

int run_estimate(const EstimateArgs& a) {
  const auto ests = parse_estimators(a.estimators, true);
  const bool wants_kclass =
      std::find(ests.begin(), ests.end(), weakiv::Estimator::KClass) !=
      ests.end();
  if (wants_kclass && a.kappa < 0.0) {
    throw UsageError("estimator 'kclass' requires --kappa >= 0");
  }

  const weakiv::ColumnSpec spec = load_schema(a.schema);
  const weakiv::RawTable table = weakiv::read_csv(a.input, spec);
  const weakiv::BuiltDesign design = weakiv::build_design(table, spec);
  const weakiv::IVDataset& d = design.dataset;
  std::cerr << "estimate: " << d.n() << " rows, " << d.n_regressors()
            << " regressors, " << design.n_excluded
            << " excluded instrument column(s)\n";

  const std::string term =
      d.x_names()[static_cast<std::size_t>(design.coef_index)];

  struct Line {
    weakiv::Estimator est;
    double estimate;
    double std_error;
    std::optional<double> kappa;
  };
  std::vector<Line> lines;
  lines.reserve(ests.size());
  for (const auto e : ests) {
    const weakiv::EstimateResult r =
        e == weakiv::Estimator::KClass
            ? weakiv::fit_kclass(d, {a.kappa})
            : weakiv::fit(d, e);
    lines.push_back({e, r.beta(design.coef_index),
                     r.std_errors(design.coef_index), r.kappa});
  }

  std::optional<weakiv::DiagnosticsReport> fs;
  if (d.n_endog() == 1 && design.n_excluded >= 1) {
    fs = weakiv::first_stage_f(d);
  }

  if (a.format == "json") {
    json out;
    out["term"] = term;
    out["n_obs"] = d.n();
    out["n_excluded"] = design.n_excluded;
    out["estimates"] = json::array();
    for (const auto& l : lines) {
      json row;
      row["estimator"] = std::string(weakiv::estimator_name(l.est));
      row["estimate"] = json_number(l.estimate);
      row["std_error"] = json_number(l.std_error);
      row["kappa"] = l.kappa ? json_number(*l.kappa) : json(nullptr);
      out["estimates"].push_back(row);
    }
    if (fs) {
      out["first_stage"]["f_stat"] = json_number(fs->f_stat);
      out["first_stage"]["r2"] = json_number(fs->r2);
      out["first_stage"]["verdict"] = weakiv::verdict_name(fs->verdict);
    }
    write_output(out.dump(2) + "\n", a.output);
  } else {
    std::string out = "term,estimator,estimate,std_error,kappa,n_obs,n_excluded\n";
    for (const auto& l : lines) {
      out += term;
      out += ',';
      out += weakiv::estimator_name(l.est);
      out += ',' + weakiv::fmt6(l.estimate);
      out += ',' + weakiv::fmt6(l.std_error);
      out += ',' + csv_cell(l.kappa);
      out += ',' + std::to_string(d.n());
      out += ',' + std::to_string(design.n_excluded) + '\n';
    }
    write_output(out, a.output);
  }
  return 0;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string input;
  std::string schema;
  bool no_rule_of_thumb = false;
  std::string format = "csv";
  std::string output;
};

const char* threshold_source_name(weakiv::ThresholdSource s) {
  switch (s) {
    case weakiv::ThresholdSource::Table:
      return "table";
    case weakiv::ThresholdSource::RuleOfThumb:
      return "rule_of_thumb";
    case weakiv::ThresholdSource::None:
      return "none";
  }
  return "none";
}

int run_diagnose(const DiagnoseArgs& a) {
  const weakiv::ColumnSpec spec = load_schema(a.schema);
  const weakiv::RawTable table = weakiv::read_csv(a.input, spec);
  const weakiv::BuiltDesign design = weakiv::build_design(table, spec);

  weakiv::FirstStageOptions opt;
  opt.use_rule_of_thumb = !a.no_rule_of_thumb;
  const weakiv::DiagnosticsReport rep =
      weakiv::first_stage_f(design.dataset, opt);
  const auto row = weakiv::critical_value_lookup(rep.k_excluded);

  if (a.format == "json") {
    json out;
    out["f_stat"] = json_number(rep.f_stat);
    out["r2"] = json_number(rep.r2);
    out["adj_r2"] = json_number(rep.adj_r2);
    out["mu2_over_k_hat"] = json_number(rep.mu2_over_k_hat);
    out["k_excluded"] = rep.k_excluded;
    out["verdict"] = weakiv::verdict_name(rep.verdict);
    out["threshold_source"] = threshold_source_name(rep.threshold_source);
    out["threshold"] =
        rep.threshold_used ? json_number(*rep.threshold_used) : json(nullptr);
    if (row) {
      out["table_row"]["mu2_per_k_threshold"] =
          json_number(row->mu2_per_k_threshold);
      out["table_row"]["f_critical"] = json_number(row->f_critical);
      out["table_row"]["relative_bias_target"] =
          json_number(row->relative_bias_target);
    } else {
      out["table_row"] = nullptr;
    }
    write_output(out.dump(2) + "\n", a.output);
  } else {
    std::string out =
        "f_stat,r2,adj_r2,mu2_over_k_hat,k_excluded,verdict,"
        "threshold_source,threshold,table_mu2_per_k,table_relative_bias\n";
    out += weakiv::fmt6(rep.f_stat);
    out += ',' + weakiv::fmt6(rep.r2);
    out += ',' + weakiv::fmt6(rep.adj_r2);
    out += ',' + weakiv::fmt6(rep.mu2_over_k_hat);
    out += ',' + std::to_string(rep.k_excluded);
    out += ',';
    out += weakiv::verdict_name(rep.verdict);
    out += ',';
    out += threshold_source_name(rep.threshold_source);
    out += ',' + csv_cell(rep.threshold_used);
    out += ',' +
           csv_cell(row ? std::optional<double>(row->mu2_per_k_threshold)
                        : std::nullopt);
    out += ',' +
           csv_cell(row ? std::optional<double>(row->relative_bias_target)
                        : std::nullopt);
    out += '\n';
    write_output(out, a.output);
  }
  return 0;
}

// ------------------------------------------------------------------- ar-ci

struct ArCiArgs {
  std::string input;
  std::string schema;
  double level = 0.05;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  double grid_step = 0.0;
  bool grid_given = false;
  std::string format = "csv";
  std::string output;
};

int run_ar_ci(const ArCiArgs& a) {
  const weakiv::ColumnSpec spec = load_schema(a.schema);
  const weakiv::RawTable table = weakiv::read_csv(a.input, spec);
  const weakiv::BuiltDesign design = weakiv::build_design(table, spec);
  const weakiv::IVDataset& d = design.dataset;

  const weakiv::GridSpec grid =
      a.grid_given ? weakiv::GridSpec{a.grid_lo, a.grid_hi, a.grid_step}
                   : weakiv::default_ar_grid(d);
  std::cerr << "ar-ci: grid [" << weakiv::fmt6(grid.lo) << ", "
            << weakiv::fmt6(grid.hi) << "] step " << weakiv::fmt6(grid.step)
            << "\n";
  const weakiv::ArConfidenceSet set =
      weakiv::ar_confidence_set(d, a.level, grid);

  if (a.format == "json") {
    json out;
    out["level"] = json_number(set.level);
    out["critical_value"] = json_number(set.critical_value);
    out["df1"] = set.df1;
    out["df2"] = set.df2;
    out["grid"] = {{"lo", json_number(grid.lo)},
                   {"hi", json_number(grid.hi)},
                   {"step", json_number(grid.step)}};
    out["contains_grid_lo"] = set.contains_grid_lo;
    out["contains_grid_hi"] = set.contains_grid_hi;
    out["unbounded"] = set.unbounded();
    out["intervals"] = json::array();
    for (const auto& [lo, hi] : set.intervals) {
      out["intervals"].push_back({json_number(lo), json_number(hi)});
    }
    write_output(out.dump(2) + "\n", a.output);
  } else {
    std::string out =
        "interval,lo,hi,level,critical_value,df1,df2,"
        "touches_grid_lo,touches_grid_hi\n";
    for (std::size_t i = 0; i < set.intervals.size(); ++i) {
      const bool first = i == 0;
      const bool last = i + 1 == set.intervals.size();
      out += std::to_string(i + 1);
      out += ',' + weakiv::fmt6(set.intervals[i].first);
      out += ',' + weakiv::fmt6(set.intervals[i].second);
      out += ',' + weakiv::fmt6(set.level);
      out += ',' + weakiv::fmt6(set.critical_value);
      out += ',' + std::to_string(set.df1);
      out += ',' + std::to_string(set.df2);
      out += ',' + std::to_string(first && set.contains_grid_lo ? 1 : 0);
      out += ',' + std::to_string(last && set.contains_grid_hi ? 1 : 0);
      out += '\n';
    }
    write_output(out, a.output);
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int model = 0;
  long long n = 0;  // 0 = preset default
  int reps = 5000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> estimators{"ols", "2sls", "liml", "jive"};
  std::string dist = "normal";
  std::string records;
  std::string format = "csv";
  std::string output;
};

json summary_json(const weakiv::MCSummary& s, const std::string& label) {
  json out;
  out["model"] = label;
  out["n"] = s.n;
  out["reps"] = s.reps;
  out["seed"] = s.master_seed;
  out["estimators"] = json::array();
  static const char* qnames[5] = {"q000", "q025", "q050", "q075", "q100"};
  for (const auto& es : s.estimators) {
    json row;
    row["estimator"] = std::string(weakiv::estimator_name(es.estimator));
    row["n_success"] = es.n_success;
    row["n_failed"] = es.n_failed;
    for (int q = 0; q < 5; ++q) row[qnames[q]] = json_number(es.quantiles[q]);
    row["median_bias"] = json_number(es.median_bias);
    row["coverage95"] = json_number(es.coverage95);
    out["estimators"].push_back(row);
  }
  return out;
}

weakiv::DGPConfig configure_model(int model, long long n,
                                  const std::string& dist) {
  weakiv::DGPConfig cfg = weakiv::model_preset(model);
  if (n > 0) cfg.n = static_cast<Eigen::Index>(n);
  if (dist == "uniform") {
    cfg.instrument_dist = weakiv::InstrumentDist::Uniform;
  } else if (dist != "normal") {
    throw UsageError("--dist must be 'normal' or 'uniform'");
  }
  return cfg;
}

int run_simulate(const SimulateArgs& a) {
  const auto ests = parse_estimators(a.estimators, false);
  const weakiv::DGPConfig cfg = configure_model(a.model, a.n, a.dist);
  const std::string label = "model" + std::to_string(a.model);
  std::cerr << "simulate: " << label << ", n=" << cfg.n << ", reps=" << a.reps
            << ", seed=" << a.seed << ", workers=" << a.workers << "\n";

  std::vector<weakiv::ReplicationRecord> records;
  const weakiv::MCSummary s =
      weakiv::run_mc(cfg, a.reps, ests, a.seed, a.workers,
                     a.records.empty() ? nullptr : &records);

  if (!a.records.empty()) {
    write_output(weakiv::records_csv(records), a.records);
  }
  if (a.format == "json") {
    write_output(summary_json(s, label).dump(2) + "\n", a.output);
  } else {
    write_output(weakiv::mc_summary_csv(s, label), a.output);
  }
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string axis;
  std::vector<double> values;
  std::vector<long long> sizes{25, 50, 100, 200, 400, 800};
  int reps = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> estimators{"ols", "2sls", "liml", "jive"};
  std::string format = "csv";
  std::string output;
};

std::vector<double> default_sweep_values(weakiv::SweepAxis axis) {
  switch (axis) {
    case weakiv::SweepAxis::Rho:
      return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    case weakiv::SweepAxis::R2:
      return {0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
    case weakiv::SweepAxis::K:
      return {2, 3, 4, 5, 7, 10, 13, 16};
  }
  return {};
}

int run_sweep(const SweepArgs& a) {
  const auto ests = parse_estimators(a.estimators, false);
  const auto axis = weakiv::sweep_axis_from_name(a.axis);
  if (!axis) throw UsageError("--axis must be one of rho, r2, k");
  const std::vector<double> values =
      a.values.empty() ? default_sweep_values(*axis) : a.values;
  std::vector<Eigen::Index> sizes;
  sizes.reserve(a.sizes.size());
  for (long long s : a.sizes) sizes.push_back(static_cast<Eigen::Index>(s));

  std::cerr << "sweep: axis=" << a.axis << ", " << values.size()
            << " values x " << sizes.size() << " sizes, reps=" << a.reps
            << ", seed=" << a.seed << ", workers=" << a.workers << "\n";
  const auto rows = weakiv::run_sweep(*axis, values, weakiv::SweepBase{},
                                      sizes, a.reps, ests, a.seed, a.workers);

  if (a.format == "json") {
    json out;
    out["axis"] = a.axis;
    out["reps"] = a.reps;
    out["seed"] = a.seed;
    out["rows"] = json::array();
    for (const auto& r : rows) {
      json row;
      row["value"] = json_number(r.value);
      row["n"] = r.n;
      row["estimator"] = std::string(weakiv::estimator_name(r.estimator));
      row["n_success"] = r.n_success;
      row["n_failed"] = r.n_failed;
      row["median_bias"] = json_number(r.median_bias);
      out["rows"].push_back(row);
    }
    write_output(out.dump(2) + "\n", a.output);
  } else {
    write_output(weakiv::sweep_csv(rows, a.reps, a.seed), a.output);
  }
  return 0;
}

// --------------------------------------------------------------- replicate

struct ReplicateArgs {
  int reps = 5000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::string> estimators{"ols", "2sls", "liml", "jive"};
  std::string format = "csv";
  std::string output;
};

int run_replicate(const ReplicateArgs& a) {
  const auto ests = parse_estimators(a.estimators, false);
  std::string csv;
  json jmodels = json::array();
  for (int model = 1; model <= 4; ++model) {
    const weakiv::DGPConfig cfg = weakiv::model_preset(model);
    const std::uint64_t model_seed =
        weakiv::derive_seed(a.seed, static_cast<std::uint64_t>(model));
    std::cerr << "replicate: model " << model << ", reps=" << a.reps
              << ", seed=" << model_seed << "\n";
    const weakiv::MCSummary s =
        weakiv::run_mc(cfg, a.reps, ests, model_seed, a.workers);
    const std::string label = "model" + std::to_string(model);
    const std::string part = weakiv::mc_summary_csv(s, label);
    if (model == 1) {
      csv = part;
    } else {
      csv += part.substr(part.find('\n') + 1);  // drop the repeated header
    }
    jmodels.push_back(summary_json(s, label));
  }
  if (a.format == "json") {
    json out;
    out["reps"] = a.reps;
    out["seed"] = a.seed;
    out["models"] = jmodels;
    write_output(out.dump(2) + "\n", a.output);
  } else {
    write_output(csv, a.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakiv: IV estimation, weak-instrument diagnostics, and "
               "Monte-Carlo studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "weakiv 1.0.0");
  // Values come from flags first, then the config file, then defaults.
  app.set_config("--config", "", "INI/TOML config file; flags take precedence");

  const auto add_format = [](CLI::App* cmd, std::string& target) {
    cmd->add_option("--format", target, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "fit estimators to a CSV file");
  c_est->add_option("--input", est.input, "data CSV path")->required();
  c_est->add_option("--schema", est.schema, "column-role JSON path")->required();
  c_est->add_option("--estimators", est.estimators,
                    "comma-separated list: ols,2sls,liml,jive,kclass")
      ->delimiter(',')
      ->capture_default_str();
  c_est->add_option("--kappa", est.kappa, "k-class kappa (with 'kclass')");
  add_format(c_est, est.format);
  c_est->add_option("--output", est.output, "write results here, not stdout");

  DiagnoseArgs dia;
  auto* c_dia = app.add_subcommand("diagnose", "first-stage diagnostics");
  c_dia->add_option("--input", dia.input, "data CSV path")->required();
  c_dia->add_option("--schema", dia.schema, "column-role JSON path")->required();
  c_dia->add_flag("--no-rule-of-thumb", dia.no_rule_of_thumb,
                  "report 'indeterminate' instead of the F>10 rule when the "
                  "critical-value table has no row");
  add_format(c_dia, dia.format);
  c_dia->add_option("--output", dia.output, "write results here, not stdout");

  ArCiArgs ar;
  auto* c_ar = app.add_subcommand("ar-ci",
                                  "Anderson-Rubin confidence set by grid "
                                  "inversion");
  c_ar->add_option("--input", ar.input, "data CSV path")->required();
  c_ar->add_option("--schema", ar.schema, "column-role JSON path")->required();
  c_ar->add_option("--level", ar.level, "test size (0.05 gives a 95% set)")
      ->capture_default_str();
  auto* glo = c_ar->add_option("--grid-lo", ar.grid_lo, "grid lower bound");
  auto* ghi = c_ar->add_option("--grid-hi", ar.grid_hi, "grid upper bound");
  auto* gst = c_ar->add_option("--grid-step", ar.grid_step, "grid step");
  glo->needs(ghi, gst);
  ghi->needs(glo, gst);
  gst->needs(glo, ghi);
  add_format(c_ar, ar.format);
  c_ar->add_option("--output", ar.output, "write results here, not stdout");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate",
                                   "Monte-Carlo study of a canned design");
  c_sim->add_option("--model", sim.model, "design preset 1..4")
      ->required()
      ->check(CLI::Range(1, 4));
  c_sim->add_option("--n", sim.n, "sample size override (preset default 200)");
  c_sim->add_option("--reps", sim.reps, "replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "64-bit master seed")
      ->capture_default_str();
  c_sim->add_option("--workers", sim.workers, "worker threads (same results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_sim->add_option("--estimators", sim.estimators, "comma-separated list")
      ->delimiter(',')
      ->capture_default_str();
  c_sim->add_option("--dist", sim.dist, "instrument distribution")
      ->check(CLI::IsMember({"normal", "uniform"}))
      ->capture_default_str();
  c_sim->add_option("--records", sim.records,
                    "also dump per-replication estimates (CSV) to this file");
  add_format(c_sim, sim.format);
  c_sim->add_option("--output", sim.output, "write results here, not stdout");

  SweepArgs swp;
  auto* c_swp = app.add_subcommand("sweep",
                                   "median-bias grid over a design axis");
  c_swp->add_option("--axis", swp.axis, "rho, r2, or k")->required();
  c_swp->add_option("--values", swp.values,
                    "axis values (default: a documented per-axis grid)")
      ->delimiter(',');
  c_swp->add_option("--sizes", swp.sizes, "sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  c_swp->add_option("--reps", swp.reps, "replications per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_swp->add_option("--seed", swp.seed, "64-bit master seed")
      ->capture_default_str();
  c_swp->add_option("--workers", swp.workers, "worker threads (same results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_swp->add_option("--estimators", swp.estimators, "comma-separated list")
      ->delimiter(',')
      ->capture_default_str();
  add_format(c_swp, swp.format);
  c_swp->add_option("--output", swp.output, "write results here, not stdout");

  ReplicateArgs rep;
  auto* c_rep = app.add_subcommand(
      "replicate", "run all four model presets and emit one summary table");
  c_rep->add_option("--reps", rep.reps, "replications per model")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_rep->add_option("--seed", rep.seed, "64-bit master seed")
      ->capture_default_str();
  c_rep->add_option("--workers", rep.workers, "worker threads (same results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_rep->add_option("--estimators", rep.estimators, "comma-separated list")
      ->delimiter(',')
      ->capture_default_str();
  add_format(c_rep, rep.format);
  c_rep->add_option("--output", rep.output, "write results here, not stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_est->parsed()) return run_estimate(est);
    if (c_dia->parsed()) return run_diagnose(dia);
    if (c_ar->parsed()) return run_ar_ci(ar);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_swp->parsed()) return run_sweep(swp);
    if (c_rep->parsed()) return run_replicate(rep);
    std::cerr << "error: no verb given\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const weakiv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
