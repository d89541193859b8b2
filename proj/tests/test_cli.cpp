#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end checks through the installed binary: every invocation here goes
// through main(), CLI parsing, the pipeline and the JSON emitters.

using json = nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;

  json parsed() const { return json::parse(out); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(++counter);
  const std::string out_path = "cli_stdout_" + tag;
  const std::string err_path = "cli_stderr_" + tag;
  const std::string command =
      std::string(ATTKIT_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(command.c_str());
  CliResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

/// Shared 20k-row draw from the reference process, generated once per run.
const std::string& ref_csv() {
  static const std::string path = [] {
    const std::string p = "cli_ref.csv";
    const CliResult r = run_cli(
        "simulate --mode generate --dgp reference --n 20000 --seed 5 --output " + p);
    REQUIRE(r.code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("generate then estimate recovers the reference effect") {
  const CliResult r = run_cli("estimate --input " + ref_csv() + " --folds 5 --seed 2");
  REQUIRE(r.code == 0);
  const json doc = r.parsed();
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "estimate");
  CHECK(doc["config"]["folds"] == 5);
  CHECK(doc["config"]["learners"] == "logistic(lambda=0.0001)");

  const json res = doc["result"];
  const double psi = res["psi_att"];
  const double se = std::sqrt(res["sigma2"].get<double>() / res["n"].get<double>());
  CHECK(res["n"] == 20000);
  CHECK(std::abs(psi - 0.1) < 3.0 * se);
  CHECK(res["ci_low"].get<double>() < psi);
  CHECK(res["ci_high"].get<double>() > psi);
  CHECK(res["relative_reduction"].get<double>() > 0.0);
  CHECK(res.contains("clipped"));

  // stdout is a pure function of the arguments; timing goes to stderr
  const CliResult again = run_cli("estimate --input " + ref_csv() + " --folds 5 --seed 2");
  CHECK(again.out == r.out);
  CHECK(r.err.find("wall time") != std::string::npos);
}

TEST_CASE("print-config echoes the resolved options without running") {
  const CliResult r = run_cli("estimate --input does_not_exist.csv --folds 7 --print-config");
  REQUIRE(r.code == 0);
  const json doc = r.parsed();
  CHECK(doc["command"] == "estimate");
  CHECK(doc["config"]["input"] == "does_not_exist.csv");
  CHECK(doc["config"]["folds"] == 7);
  CHECK(!doc.contains("result"));
}

TEST_CASE("a config file supplies defaults that flags override") {
  {
    std::ofstream ini("cli_opts.ini");
    ini << "[estimate]\nfolds=4\nseed=9\n";
  }
  const CliResult base =
      run_cli("--config cli_opts.ini estimate --input x.csv --print-config");
  REQUIRE(base.code == 0);
  CHECK(base.parsed()["config"]["folds"] == 4);
  CHECK(base.parsed()["config"]["seed"] == 9);

  const CliResult override_run =
      run_cli("--config cli_opts.ini estimate --folds 6 --input x.csv --print-config");
  REQUIRE(override_run.code == 0);
  CHECK(override_run.parsed()["config"]["folds"] == 6);
  std::remove("cli_opts.ini");
}

TEST_CASE("exit codes separate config, data and numeric failures") {
  CHECK(run_cli("estimate").code == 2);                       // missing required --input
  CHECK(run_cli("nonsense").code == 2);                       // unknown subcommand
  CHECK(run_cli("estimate --input x.csv --bogus-flag").code == 2);

  CliResult r = run_cli("estimate --input " + ref_csv() + " --folds 1");
  CHECK(r.code == 2);
  CHECK(r.err.find("config error:") != std::string::npos);

  CHECK(run_cli("estimate --input " + ref_csv() + " --learners 'mystery'").code == 2);
  CHECK(run_cli("estimate --input " + ref_csv() + " --eps 0.7").code == 2);
  CHECK(run_cli("sensitivity --input " + ref_csv() + " --delta-min 0.5").code == 2);
  CHECK(run_cli("heterogeneity --input " + ref_csv()).code == 2);

  r = run_cli("estimate --input cli_missing_file.csv");
  CHECK(r.code == 3);
  CHECK(r.err.find("data error:") != std::string::npos);

  // attrition-free controls with outcome identically zero: the calibration
  // denominator vanishes and the run must stop with a numeric error
  {
    std::ofstream csv("cli_zero.csv");
    csv << "x1,followup,treatment,outcome\n";
    for (int i = 0; i < 60; ++i)
      csv << i % 2 << ",1," << (i / 2) % 2 << ',' << (i / 2) % 2 << '\n';
  }
  r = run_cli(
      "calibrate --input cli_zero.csv --subset x1 --folds 2 "
      "--learners 'forest(trees=10,max_depth=2,min_leaf=1)'");
  CHECK(r.code == 4);
  CHECK(r.err.find("numeric error:") != std::string::npos);
  CHECK(r.err.find("ratio undefined on subset") != std::string::npos);
  std::remove("cli_zero.csv");
}

TEST_CASE("filters restrict the working sample before anything is fit") {
  const CliResult full = run_cli("estimate --input " + ref_csv() + " --folds 5");
  REQUIRE(full.code == 0);
  const CliResult half =
      run_cli("estimate --input " + ref_csv() + " --folds 5 --filter x1==1");
  REQUIRE(half.code == 0);
  const double n_full = full.parsed()["result"]["n"].get<double>();
  const double n_half = half.parsed()["result"]["n"].get<double>();
  CHECK(n_half < n_full);
  CHECK(std::abs(n_half / n_full - 0.5) < 0.02);  // x1 is a fair coin

  CHECK(run_cli("estimate --input " + ref_csv() + " --filter nope==1").code == 2);
  CHECK(run_cli("estimate --input " + ref_csv() + " --filter x1~1").code == 2);
}

TEST_CASE("the sensitivity curve agrees with the plain estimate at delta one") {
  const CliResult est = run_cli("estimate --input " + ref_csv() + " --folds 5 --seed 2");
  REQUIRE(est.code == 0);
  const CliResult sen = run_cli(
      "sensitivity --input " + ref_csv() +
      " --folds 5 --seed 2 --delta-min 1.0 --delta-max 1.2 --delta-step 0.1 "
      "--curve-out cli_curve.csv");
  REQUIRE(sen.code == 0);

  const json points = sen.parsed()["result"]["points"];
  REQUIRE(points.size() == 3);
  CHECK(points[0]["delta"] == 1.0);
  CHECK(points[0]["lower"] == est.parsed()["result"]["psi_att"]);
  CHECK(points[0]["upper"] == points[0]["lower"]);
  CHECK(points[2]["lower"].get<double>() < points[0]["lower"].get<double>());
  CHECK(points[2]["upper"].get<double>() > points[0]["upper"].get<double>());

  std::ifstream curve("cli_curve.csv");
  std::string header;
  REQUIRE(std::getline(curve, header));
  CHECK(header == "delta,lower,lower_ci_lo,lower_ci_hi,upper,upper_ci_lo,upper_ci_hi");
  std::size_t rows = 0;
  for (std::string line; std::getline(curve, line);) ++rows;
  CHECK(rows == 3);
  std::remove("cli_curve.csv");
}

TEST_CASE("per-row nuisance estimates can be exported") {
  const CliResult r = run_cli("estimate --input " + ref_csv() +
                              " --folds 5 --surface-out cli_surface.csv");
  REQUIRE(r.code == 0);
  std::ifstream in("cli_surface.csv");
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "id,fold,omega,pi,mu0,mu1");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 20000);
  std::remove("cli_surface.csv");
}

TEST_CASE("calibration against the only covariate is neutral on reference data") {
  const CliResult r = run_cli("calibrate --input " + ref_csv() + " --folds 5 --subset x1");
  REQUIRE(r.code == 0);
  const json results = r.parsed()["result"];
  REQUIRE(results.size() == 1);
  CHECK(results[0]["subset"] == json::array({"x1"}));
  CHECK(results[0]["delta_hat"] == 1.0);
  CHECK(results[0]["strata"] == 2);
}

TEST_CASE("overlap histogram counts every propensity value") {
  const CliResult r = run_cli("overlap --input " + ref_csv() + " --folds 5 --threshold 0.5");
  REQUIRE(r.code == 0);
  const json res = r.parsed()["result"];
  CHECK(res["n"] == 20000);
  double total = 0.0;
  for (const auto& c : res["counts"]) total += c.get<double>();
  CHECK(total == 20000.0);
  // pi concentrates near 0.3 and 0.7 on a fair-coin covariate
  CHECK(std::abs(res["low_fraction"].get<double>() - 0.5) < 0.05);
}

TEST_CASE("treatment-removal effect with optional additive bounds") {
  const CliResult plain = run_cli("otr --input " + ref_csv() + " --folds 5");
  REQUIRE(plain.code == 0);
  const json res = plain.parsed()["result"];
  const double psi = res["psi_otr"];
  const double se = std::sqrt(res["sigma2"].get<double>() / res["n"].get<double>());
  CHECK(std::abs(psi - 0.05) < 3.0 * se);
  CHECK(!res.contains("bounds"));

  const CliResult bounded = run_cli("otr --input " + ref_csv() + " --folds 5 --delta-add 0.1");
  REQUIRE(bounded.code == 0);
  const json bounds = bounded.parsed()["result"]["bounds"];
  CHECK(bounds["delta_add"] == 0.1);
  CHECK(bounds["lower"].get<double>() < psi);
  CHECK(bounds["upper"].get<double>() > psi);
}

TEST_CASE("grouped data round-trips into the heterogeneity report") {
  const CliResult gen = run_cli(
      "simulate --mode generate --dgp grouped --effect0 0.1 --effect1 0.1 "
      "--n 8000 --seed 7 --output cli_grouped.csv");
  REQUIRE(gen.code == 0);

  std::ifstream in("cli_grouped.csv");
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "x1,x2,x3,followup,treatment,outcome,group");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 8000);

  const CliResult het = run_cli(
      "heterogeneity --input cli_grouped.csv --group group --folds 4 --min-count 100");
  REQUIRE(het.code == 0);
  const json res = het.parsed()["result"];
  REQUIRE(res["groups"].size() == 2);
  CHECK(res["groups"][0]["label"] == "g0");
  CHECK(res["groups"][1]["label"] == "g1");
  CHECK(res["test"]["df"] == 1);
  const double p = res["test"]["p_value"];
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);

  // a binary column pooled through the age partition leaves one group: refused
  const CliResult pooled = run_cli(
      "heterogeneity --input cli_grouped.csv --by-age x1 --folds 4 --min-count 10");
  CHECK(pooled.code == 3);
  CHECK(pooled.err.find("fewer than 2 groups") != std::string::npos);
  std::remove("cli_grouped.csv");
}

TEST_CASE("simulation experiments report oracle comparisons") {
  const std::string args =
      "simulate --mode experiment --dgp reference --plug-true --n 1000 --reps 20 --seed 3";
  const CliResult r = run_cli(args);
  REQUIRE(r.code == 0);
  const json res = r.parsed()["result"];
  CHECK(std::abs(res["oracle"].get<double>() - 0.1) < 1e-12);
  CHECK(res["failures"] == 0);
  CHECK(std::abs(res["bias"].get<double>()) < 0.05);
  CHECK(res["reps"] == 20);

  const CliResult again = run_cli(args);
  CHECK(again.out == r.out);
}

TEST_CASE("convergence mode writes the rate table") {
  const CliResult r = run_cli(
      "simulate --mode convergence --dgp reference --plug-true --reps 20 "
      "--n-grid 500 --n-grid 2000 --table-out cli_table.csv --seed 3");
  REQUIRE(r.code == 0);
  const json res = r.parsed()["result"];
  REQUIRE(res["points"].size() == 2);
  CHECK(res["slope"].get<double>() < 0.0);

  std::ifstream in("cli_table.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "n,rmse");
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("500,", 0) == 0);
  std::remove("cli_table.csv");

  CHECK(run_cli("simulate --mode convergence --dgp reference --reps 5").code == 2);
  CHECK(run_cli("simulate --mode experiment --dgp unknown").code == 2);
  CHECK(run_cli("simulate --mode unknown").code == 2);
}
