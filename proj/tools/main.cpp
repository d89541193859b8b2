// attkit command-line tool: estimation, sensitivity and simulation pipelines
// over attrition-masked treatment/outcome CSVs.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attkit/crossfit.hpp"
#include "attkit/dataset.hpp"
#include "attkit/estimators.hpp"
#include "attkit/learners.hpp"
#include "attkit/rng.hpp"
#include "attkit/sensitivity.hpp"
#include "attkit/sim.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct CommonOpts {
  std::string input;
  std::string treatment = "treatment";
  std::string outcome = "outcome";
  std::string followup = "followup";
  std::string group_col;
  std::string id_col;
  bool lenient = false;
  int folds = 10;
  std::uint64_t seed = 1;
  std::string learners = "logistic";
  double eps = 0.01;
  std::vector<std::string> filters;
  std::string output;
  std::string surface_out;
  unsigned threads = 1;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--input", o->input, "input CSV path")->required();
  cmd->add_option("--treatment", o->treatment, "treatment column (default: treatment)");
  cmd->add_option("--outcome", o->outcome, "outcome column (default: outcome)");
  cmd->add_option("--followup", o->followup, "follow-up indicator column (default: followup)");
  cmd->add_option("--group", o->group_col, "optional subgroup label column");
  cmd->add_option("--id", o->id_col, "optional row identifier column");
  cmd->add_flag("--lenient", o->lenient,
                "mask treatment/outcome values present on followup=0 rows instead of failing");
  cmd->add_option("--folds", o->folds, "cross-fitting folds (default: 10)");
  cmd->add_option("--seed", o->seed, "random seed (default: 1)");
  cmd->add_option("--learners", o->learners,
                  "learner list, e.g. logistic or logistic,forest(trees=100)");
  cmd->add_option("--eps", o->eps, "propensity/missingness clip bound (default: 0.01)");
  cmd->add_option("--filter", o->filters,
                  "row filter like col=value, col<=value (repeatable, all must hold)");
  cmd->add_option("--output", o->output, "result JSON path (default: stdout)");
  cmd->add_option("--surface-out", o->surface_out, "write per-row nuisance estimates CSV");
  cmd->add_option("--threads", o->threads, "worker threads for cross-fitting (default: 1)");
  cmd->add_flag("--print-config", o->print_config, "print the resolved config and exit");
}

attkit::FilterPredicate parse_filter(const std::string& text) {
  static const std::pair<const char*, attkit::FilterOp> ops[] = {
      {"==", attkit::FilterOp::Eq}, {"!=", attkit::FilterOp::Ne}, {"<=", attkit::FilterOp::Le},
      {">=", attkit::FilterOp::Ge}, {"<", attkit::FilterOp::Lt},  {">", attkit::FilterOp::Gt},
      {"=", attkit::FilterOp::Eq}};
  std::size_t best = std::string::npos;
  std::size_t best_len = 0;
  attkit::FilterOp best_op = attkit::FilterOp::Eq;
  for (const auto& [tok, op] : ops) {
    const std::size_t pos = text.find(tok);
    if (pos == std::string::npos) continue;
    if (pos < best || (pos == best && std::string(tok).size() > best_len)) {
      best = pos;
      best_len = std::string(tok).size();
      best_op = op;
    }
  }
  if (best == std::string::npos || best == 0)
    throw attkit::ConfigError("cannot parse filter '" + text +
                              "' (expected column<op>value with op in = != < <= > >=)");
  attkit::FilterPredicate pred;
  pred.column = text.substr(0, best);
  pred.op = best_op;
  pred.value = text.substr(best + best_len);
  while (!pred.column.empty() && pred.column.back() == ' ') pred.column.pop_back();
  while (!pred.value.empty() && pred.value.front() == ' ') pred.value.erase(pred.value.begin());
  if (pred.column.empty() || pred.value.empty())
    throw attkit::ConfigError("cannot parse filter '" + text + "'");
  return pred;
}

attkit::RoleMap make_roles(const CommonOpts& o) {
  attkit::RoleMap roles;
  roles.treatment = o.treatment;
  roles.outcome = o.outcome;
  roles.followup = o.followup;
  roles.group = o.group_col;
  roles.id = o.id_col;
  roles.lenient = o.lenient;
  return roles;
}

json common_config(const CommonOpts& o) {
  json cfg;
  cfg["input"] = o.input;
  cfg["roles"] = {{"treatment", o.treatment}, {"outcome", o.outcome},
                  {"followup", o.followup},   {"group", o.group_col},
                  {"id", o.id_col},           {"lenient", o.lenient}};
  cfg["folds"] = o.folds;
  cfg["seed"] = o.seed;
  cfg["learners"] = attkit::describe_learners(attkit::parse_learners(o.learners));
  cfg["eps"] = o.eps;
  cfg["filters"] = o.filters;
  cfg["threads"] = o.threads;
  return cfg;
}

void emit(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw attkit::DataError("cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw attkit::DataError("failed while writing " + path);
}

void report_warnings(const attkit::Warnings& warnings) {
  for (const auto& msg : warnings.messages) std::cerr << "warning: " << msg << '\n';
}

struct Pipeline {
  attkit::CausalDataset raw;  // filtered + imputed, before encoding
  attkit::CausalDataset ds;   // encoded
  attkit::NuisanceSurface surface;
  attkit::Warnings warnings;
};

/// load -> filter -> impute -> encode -> cross-fit. Filters run before fold
/// assignment so restricted reanalyses re-estimate everything on the subset.
Pipeline run_pipeline(const CommonOpts& o, bool want_mu_y) {
  const attkit::LearnerSpec spec = attkit::parse_learners(o.learners);
  spec.validate();
  if (o.folds < 2) throw attkit::ConfigError("need at least 2 folds");
  if (!(o.eps > 0.0 && o.eps < 0.5)) throw attkit::ConfigError("eps must lie in (0, 0.5)");
  std::vector<attkit::FilterPredicate> predicates;
  for (const auto& text : o.filters) predicates.push_back(parse_filter(text));

  Pipeline p;
  const attkit::RoleMap roles = make_roles(o);
  const attkit::CovariateSchema schema = attkit::infer_schema(o.input, roles);
  attkit::CausalDataset ds = attkit::load_csv(o.input, schema, roles, &p.warnings);
  if (!predicates.empty()) ds = attkit::filter_rows(ds, roles, predicates);
  p.raw = attkit::impute_covariates(ds, &p.warnings);
  p.ds = attkit::encode(p.raw, &p.warnings);

  const attkit::FoldAssignment folds = attkit::assign_folds(p.ds.n(), o.folds, o.seed);
  p.surface = attkit::fit_nuisances(p.ds, spec, folds, o.eps, want_mu_y, o.threads, &p.warnings);
  if (!o.surface_out.empty()) attkit::export_surface_csv(p.surface, p.ds.ids, o.surface_out);
  return p;
}

json att_json(const attkit::AttEstimate& est) {
  json out;
  out["psi_att"] = est.psi_att;
  out["ci_low"] = est.ci_low;
  out["ci_high"] = est.ci_high;
  out["sigma2"] = est.sigma2;
  out["psi_ay1"] = est.psi_ay1;
  out["psi_ay0"] = est.psi_ay0;
  out["psi_a"] = est.psi_a;
  out["n"] = est.n;
  out["relative_reduction"] = est.relative_reduction;
  out["rr_ci_low"] = est.rr_ci_low;
  out["rr_ci_high"] = est.rr_ci_high;
  return out;
}

json envelope(const std::string& command, json config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  doc["config"] = std::move(config);
  return doc;
}

// ---- subcommands ----------------------------------------------------------

int cmd_estimate(const CommonOpts& o) {
  json doc = envelope("estimate", common_config(o));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  Pipeline p = run_pipeline(o, false);
  const attkit::AttEstimate est =
      attkit::estimate_att(attkit::influence_values(p.ds, p.surface), o.eps);
  doc["result"] = att_json(est);
  doc["result"]["clipped"] = {{"omega", p.surface.omega_clipped}, {"pi", p.surface.pi_clipped}};
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

int cmd_otr(const CommonOpts& o, double delta_add, bool has_delta_add) {
  json cfg = common_config(o);
  if (has_delta_add) cfg["delta_add"] = delta_add;
  json doc = envelope("otr", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  Pipeline p = run_pipeline(o, true);
  const attkit::OtrEstimate est = attkit::estimate_otr(p.ds, p.surface);
  json result;
  result["psi_otr"] = est.psi_otr;
  result["ci_low"] = est.ci_low;
  result["ci_high"] = est.ci_high;
  result["sigma2"] = est.sigma2;
  result["psi_y"] = est.psi_y;
  result["psi_y0"] = est.psi_y0;
  result["n"] = est.n;
  if (has_delta_add) {
    const attkit::OtrBounds bounds = attkit::otr_additive_bounds(p.ds, p.surface, delta_add, o.eps);
    result["bounds"] = {{"delta_add", bounds.delta_add},
                        {"lower", bounds.lower},
                        {"lower_ci_low", bounds.lower_ci_low},
                        {"lower_ci_high", bounds.lower_ci_high},
                        {"upper", bounds.upper},
                        {"upper_ci_low", bounds.upper_ci_low},
                        {"upper_ci_high", bounds.upper_ci_high}};
  }
  doc["result"] = std::move(result);
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

int cmd_heterogeneity(const CommonOpts& o, const std::string& age_column, int pool_low,
                      int pool_high, Eigen::Index min_count) {
  json cfg = common_config(o);
  cfg["by_age"] = age_column;
  if (!age_column.empty()) {
    cfg["pool_low"] = pool_low;
    cfg["pool_high"] = pool_high;
  }
  cfg["min_count"] = min_count;
  json doc = envelope("heterogeneity", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  if (age_column.empty() && o.group_col.empty())
    throw attkit::ConfigError("heterogeneity needs --group or --by-age");
  if (!age_column.empty() && !o.group_col.empty())
    throw attkit::ConfigError("choose one of --group and --by-age");

  Pipeline p = run_pipeline(o, false);
  // Partitions read raw covariate values, so build them before encoding.
  const attkit::SubgroupPartition partition =
      age_column.empty() ? attkit::partition_by_group(p.raw)
                         : attkit::partition_by_age(p.raw, age_column, pool_low, pool_high);
  const std::vector<attkit::InfluenceRecord> records = attkit::influence_values(p.ds, p.surface);
  const std::vector<attkit::GroupAtt> groups =
      attkit::subgroup_estimates(records, partition, o.eps, min_count, &p.warnings);
  if (groups.size() < 2)
    throw attkit::DataError(
        "fewer than 2 groups survive the size floor; no heterogeneity test possible");
  const attkit::HomogeneityTest test = attkit::homogeneity_test(groups);

  json result;
  result["groups"] = json::array();
  for (const auto& g : groups) {
    json item = att_json(g.estimate);
    item["label"] = g.label;
    item["count"] = g.count;
    result["groups"].push_back(std::move(item));
  }
  result["excluded_rows"] = partition.excluded;
  result["test"] = {{"t_n", test.t_n}, {"df", test.df}, {"p_value", test.p_value}};
  doc["result"] = std::move(result);
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

int cmd_sensitivity(const CommonOpts& o, double delta_min, double delta_max, double delta_step,
                    const std::string& curve_out) {
  if (!(delta_min >= 1.0) || !(delta_max >= delta_min) || !(delta_step > 0.0))
    throw attkit::ConfigError("delta grid needs 1 <= delta-min <= delta-max and delta-step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double d = delta_min + i * delta_step;
    if (d > delta_max + 1e-9 * delta_step) break;
    grid.push_back(d);
  }

  json cfg = common_config(o);
  cfg["delta_min"] = delta_min;
  cfg["delta_max"] = delta_max;
  cfg["delta_step"] = delta_step;
  cfg["curve_out"] = curve_out;
  json doc = envelope("sensitivity", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }

  Pipeline p = run_pipeline(o, false);
  const std::vector<attkit::InfluenceRecord> records = attkit::influence_values(p.ds, p.surface);
  const attkit::SensitivityCurve curve = attkit::sensitivity_curve(records, grid, o.eps);
  if (!curve_out.empty()) attkit::export_curve_csv(curve, curve_out);

  json points = json::array();
  for (const auto& pt : curve.points)
    points.push_back({{"delta", pt.delta},
                      {"lower", pt.lower},
                      {"lower_ci_lo", pt.lower_ci_low},
                      {"lower_ci_hi", pt.lower_ci_high},
                      {"upper", pt.upper},
                      {"upper_ci_lo", pt.upper_ci_low},
                      {"upper_ci_hi", pt.upper_ci_high}});
  doc["result"] = {{"points", std::move(points)}};
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

int cmd_calibrate(const CommonOpts& o, const std::vector<std::string>& subsets) {
  json cfg = common_config(o);
  cfg["subsets"] = subsets;
  json doc = envelope("calibrate", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  if (subsets.empty()) throw attkit::ConfigError("calibrate needs at least one --subset");

  Pipeline p = run_pipeline(o, false);
  const attkit::LearnerSpec spec = attkit::parse_learners(o.learners);
  json results = json::array();
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    std::vector<std::string> names;
    std::stringstream ss(subsets[s]);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) names.push_back(item);
    }
    const attkit::DeltaCalibration cal = attkit::calibrate_delta(
        p.ds, p.surface, names, spec, attkit::derive_seed(o.seed, "subset", s), &p.warnings);
    results.push_back({{"subset", cal.subset},
                       {"size", cal.subset_size},
                       {"delta_hat", cal.delta_hat},
                       {"delta_max", cal.delta_max},
                       {"strata", cal.strata}});
  }
  doc["result"] = std::move(results);
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

int cmd_overlap(const CommonOpts& o, double threshold) {
  json cfg = common_config(o);
  cfg["threshold"] = threshold;
  json doc = envelope("overlap", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  Pipeline p = run_pipeline(o, false);
  const attkit::OverlapDiagnostic diag = attkit::overlap_diagnostic(p.surface, threshold);
  doc["result"] = {{"edges", diag.edges},       {"counts", diag.counts},
                   {"threshold", diag.threshold}, {"low_count", diag.low_count},
                   {"low_fraction", diag.low_fraction}, {"n", diag.n}};
  emit(doc, o.output);
  report_warnings(p.warnings);
  return 0;
}

struct SimulateOpts {
  std::string mode = "experiment";  // experiment | convergence | generate
  std::string dgp = "reference";    // reference | confounded | omitted | smooth | grouped
  double effect0 = 0.1, effect1 = 0.1;
  Eigen::Index n = 2000;
  int reps = 100;
  int folds = 10;
  double eps = 0.01;
  std::string learners = "logistic";
  bool break_omega = false, break_pi = false, break_mu0 = false, break_mu1 = false;
  std::string mechanism = "constant";  // constant | drop
  std::vector<int> drop_cols;
  bool plug_true = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::vector<Eigen::Index> n_grid;
  std::string output;
  std::string table_out;
  bool print_config = false;
};

attkit::Dgp make_dgp(const SimulateOpts& o) {
  if (o.dgp == "reference") return attkit::reference_dgp();
  if (o.dgp == "confounded") return attkit::confounded_dgp();
  if (o.dgp == "omitted") return attkit::omitted_confounder_dgp();
  if (o.dgp == "smooth") return attkit::smooth_dgp();
  if (o.dgp == "grouped") return attkit::grouped_dgp(o.effect0, o.effect1);
  throw attkit::ConfigError("unknown dgp '" + o.dgp +
                            "' (expected reference|confounded|omitted|smooth|grouped)");
}

attkit::ExperimentConfig make_experiment(const SimulateOpts& o) {
  attkit::ExperimentConfig config;
  config.n = o.n;
  config.reps = o.reps;
  config.folds = o.folds;
  config.eps = o.eps;
  config.learners = attkit::parse_learners(o.learners);
  config.flags.break_omega = o.break_omega;
  config.flags.break_pi = o.break_pi;
  config.flags.break_mu0 = o.break_mu0;
  config.flags.break_mu1 = o.break_mu1;
  if (o.mechanism == "constant")
    config.flags.mechanism = attkit::MisspecFlags::Mechanism::ConstantFit;
  else if (o.mechanism == "drop")
    config.flags.mechanism = attkit::MisspecFlags::Mechanism::DropCovariates;
  else
    throw attkit::ConfigError("unknown mechanism '" + o.mechanism + "' (expected constant|drop)");
  config.flags.drop_cols = o.drop_cols;
  config.plug_true_nuisances = o.plug_true;
  config.seed = o.seed;
  config.threads = o.threads;
  return config;
}

int cmd_simulate(const SimulateOpts& o) {
  json cfg;
  cfg["mode"] = o.mode;
  cfg["dgp"] = o.dgp;
  if (o.dgp == "grouped") {
    cfg["effect0"] = o.effect0;
    cfg["effect1"] = o.effect1;
  }
  cfg["n"] = o.n;
  cfg["reps"] = o.reps;
  cfg["folds"] = o.folds;
  cfg["eps"] = o.eps;
  cfg["learners"] = attkit::describe_learners(attkit::parse_learners(o.learners));
  cfg["flags"] = {{"break_omega", o.break_omega},
                  {"break_pi", o.break_pi},
                  {"break_mu0", o.break_mu0},
                  {"break_mu1", o.break_mu1},
                  {"mechanism", o.mechanism},
                  {"drop_cols", o.drop_cols}};
  cfg["plug_true_nuisances"] = o.plug_true;
  cfg["seed"] = o.seed;
  cfg["threads"] = o.threads;
  cfg["n_grid"] = o.n_grid;
  json doc = envelope("simulate", std::move(cfg));
  if (o.print_config) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }

  const attkit::Dgp dgp = make_dgp(o);

  if (o.mode == "generate") {
    if (o.output.empty()) throw attkit::ConfigError("generate mode needs --output");
    const attkit::CausalDataset ds = attkit::generate(dgp, o.n, o.seed);
    attkit::RoleMap roles;
    roles.treatment = "treatment";
    roles.outcome = "outcome";
    roles.followup = "followup";
    if (!ds.group.empty()) roles.group = "group";
    attkit::save_csv(ds, roles, o.output);
    std::cerr << "wrote " << ds.n() << " rows to " << o.output << '\n';
    return 0;
  }

  if (o.mode == "experiment") {
    const attkit::ExperimentReport report = run_experiment(dgp, make_experiment(o));
    doc["result"] = {{"n", report.n},
                     {"reps", report.reps},
                     {"oracle", report.oracle},
                     {"mean_estimate", report.mean_estimate},
                     {"bias", report.bias},
                     {"rmse", report.rmse},
                     {"coverage", report.coverage},
                     {"mean_ci_width", report.mean_ci_width},
                     {"failures", report.failures}};
    emit(doc, o.output);
    std::cerr << "wall time: " << report.wall_time_seconds << " s\n";
    return 0;
  }

  if (o.mode == "convergence") {
    if (o.n_grid.empty()) throw attkit::ConfigError("convergence mode needs --n-grid");
    const attkit::ConvergenceTable table = convergence_study(dgp, o.n_grid, make_experiment(o));
    json points = json::array();
    for (const auto& pt : table.points)
      points.push_back({{"n", pt.n}, {"rmse", pt.rmse}, {"bias", pt.bias}});
    doc["result"] = {{"points", std::move(points)}, {"slope", table.slope}, {"reps", table.reps}};
    if (!o.table_out.empty()) {
      std::ofstream out(o.table_out);
      if (!out) throw attkit::DataError("cannot open " + o.table_out + " for writing");
      out.precision(17);
      out << "n,rmse\n";
      for (const auto& pt : table.points) out << pt.n << ',' << pt.rmse << '\n';
      out << "slope," << table.slope << '\n';
    }
    emit(doc, o.output);
    return 0;
  }

  throw attkit::ConfigError("unknown mode '" + o.mode +
                            "' (expected experiment|convergence|generate)");
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"doubly robust treatment-effect estimation under outcome attrition"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with one [subcommand] section per command, key = long option name");

  CommonOpts est_opts;
  CLI::App* est = app.add_subcommand("estimate", "cross-fitted one-step ATT estimate");
  add_common(est, &est_opts);

  CommonOpts otr_opts;
  double delta_add = 0.0;
  CLI::App* otr = app.add_subcommand("otr", "treatment-removal effect E[Y] - E[Y0]");
  add_common(otr, &otr_opts);
  CLI::Option* delta_add_opt =
      otr->add_option("--delta-add", delta_add, "additive sensitivity bound for the removal effect");

  CommonOpts het_opts;
  std::string age_column;
  int pool_low = 12, pool_high = 19;
  Eigen::Index min_count = 30;
  CLI::App* het = app.add_subcommand("heterogeneity", "per-group ATTs and a homogeneity test");
  add_common(het, &het_opts);
  het->add_option("--by-age", age_column, "partition by an integer age column");
  het->add_option("--pool-low", pool_low, "pool ages <= this into one group (default: 12)");
  het->add_option("--pool-high", pool_high, "pool ages >= this into one group (default: 19)");
  het->add_option("--min-count", min_count, "drop groups smaller than this (default: 30)");

  CommonOpts sen_opts;
  double delta_min = 1.0, delta_max = 2.0, delta_step = 0.01;
  std::string curve_out;
  CLI::App* sen = app.add_subcommand("sensitivity", "bound curve over a grid of ratio deltas");
  add_common(sen, &sen_opts);
  sen->add_option("--delta-min", delta_min, "grid start (default: 1.0)");
  sen->add_option("--delta-max", delta_max, "grid end (default: 2.0)");
  sen->add_option("--delta-step", delta_step, "grid step (default: 0.01)");
  sen->add_option("--curve-out", curve_out, "write the curve as CSV");

  CommonOpts cal_opts;
  std::vector<std::string> subsets;
  CLI::App* cal = app.add_subcommand("calibrate", "sensitivity-ratio calibration from covariate subsets");
  add_common(cal, &cal_opts);
  cal->add_option("--subset", subsets, "comma-separated covariate names (repeatable)");

  CommonOpts ovl_opts;
  double threshold = 0.02;
  CLI::App* ovl = app.add_subcommand("overlap", "propensity histogram and low-overlap fraction");
  add_common(ovl, &ovl_opts);
  ovl->add_option("--threshold", threshold, "low-propensity threshold (default: 0.02)");

  SimulateOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "synthetic-data experiments with known truth");
  sim->add_option("--mode", sim_opts.mode, "experiment | convergence | generate");
  sim->add_option("--dgp", sim_opts.dgp, "reference | confounded | omitted | smooth | grouped");
  sim->add_option("--effect0", sim_opts.effect0, "grouped dgp: effect in group g0");
  sim->add_option("--effect1", sim_opts.effect1, "grouped dgp: effect in group g1");
  sim->add_option("--n", sim_opts.n, "sample size per replication (default: 2000)");
  sim->add_option("--reps", sim_opts.reps, "replications (default: 100)");
  sim->add_option("--folds", sim_opts.folds, "cross-fitting folds (default: 10)");
  sim->add_option("--eps", sim_opts.eps, "clip bound (default: 0.01)");
  sim->add_option("--learners", sim_opts.learners, "learner list for every nuisance");
  sim->add_flag("--break-omega", sim_opts.break_omega, "misspecify the missingness model");
  sim->add_flag("--break-pi", sim_opts.break_pi, "misspecify the propensity model");
  sim->add_flag("--break-mu0", sim_opts.break_mu0, "misspecify the untreated outcome model");
  sim->add_flag("--break-mu1", sim_opts.break_mu1, "misspecify the treated outcome model");
  sim->add_option("--mechanism", sim_opts.mechanism, "constant | drop (default: constant)");
  sim->add_option("--drop-cols", sim_opts.drop_cols, "column indices stripped by drop mechanism");
  sim->add_flag("--plug-true", sim_opts.plug_true, "plug in the exact nuisance maps (no learning)");
  sim->add_option("--seed", sim_opts.seed, "random seed (default: 1)");
  sim->add_option("--threads", sim_opts.threads, "worker threads over replications (default: 1)");
  sim->add_option("--n-grid", sim_opts.n_grid, "sample sizes for convergence mode");
  sim->add_option("--output", sim_opts.output, "result JSON path or generated CSV path");
  sim->add_option("--table-out", sim_opts.table_out, "convergence mode: write (n, rmse) CSV");
  sim->add_flag("--print-config", sim_opts.print_config, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int rc = 0;
  try {
    if (est->parsed()) rc = cmd_estimate(est_opts);
    else if (otr->parsed()) rc = cmd_otr(otr_opts, delta_add, delta_add_opt->count() > 0);
    else if (het->parsed())
      rc = cmd_heterogeneity(het_opts, age_column, pool_low, pool_high, min_count);
    else if (sen->parsed()) rc = cmd_sensitivity(sen_opts, delta_min, delta_max, delta_step, curve_out);
    else if (cal->parsed()) rc = cmd_calibrate(cal_opts, subsets);
    else if (ovl->parsed()) rc = cmd_overlap(ovl_opts, threshold);
    else if (sim->parsed()) rc = cmd_simulate(sim_opts);
  } catch (const attkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const attkit::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const attkit::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "wall time: "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            << " s\n";
  return rc;
}
