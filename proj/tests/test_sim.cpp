#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "attkit/estimators.hpp"
#include "attkit/sim.hpp"
#include "oracle_helpers.hpp"

using namespace attkit;

namespace {

DiscreteDgp one_cell(double pi, double omega, double m0, double m1) {
  DiscreteDgp d;
  d.cells.resize(1, 1);
  d.cells(0, 0) = 0.0;
  d.prob = Eigen::VectorXd::Ones(1);
  d.pi = Eigen::VectorXd::Constant(1, pi);
  d.omega = Eigen::VectorXd::Constant(1, omega);
  d.m0 = Eigen::VectorXd::Constant(1, m0);
  d.m1 = Eigen::VectorXd::Constant(1, m1);
  return d;
}

}  // namespace

TEST_CASE("process validation rejects inconsistent specifications") {
  DiscreteDgp ok = reference_dgp();
  ok.validate();

  DiscreteDgp bad = ok;
  bad.prob[0] = 0.7;  // total 1.2
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.pi[0] = 0.99;  // outside the enforced [0.05, 0.95] interior
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.m0.resize(3);
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = ok;
  bad.observed_dim = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.observed_dim = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = omitted_confounder_dgp();
  bad.group_col = 1;  // the hidden column cannot label groups
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  SmoothDgp s = smooth_dgp();
  s.validate();
  s.dim = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = smooth_dgp();
  s.pi_coef.resize(2);
  CHECK_THROWS_AS(s.validate(), ConfigError);

  // maps in range but the implied treated outcome mean mu1 / pi exceeds 1
  SmoothDgp ratio;
  ratio.dim = 1;
  ratio.omega_coef = Eigen::Vector2d(0.0, 0.0);
  ratio.pi_coef = Eigen::Vector2d(std::log(0.1 / 0.9), 0.0);
  ratio.mu0_coef = Eigen::Vector2d(0.0, 0.0);
  ratio.mu1_coef = Eigen::Vector2d(std::log(0.9 / 0.1), 0.0);
  CHECK_THROWS_AS(ratio.validate(), ConfigError);
}

TEST_CASE("discrete oracles agree with exhaustive enumeration") {
  const DiscreteDgp ref = reference_dgp();
  double se = -1.0;
  CHECK(std::abs(oracle_att(ref, &se) - 0.1) < 1e-12);
  CHECK(se == 0.0);  // enumeration, no Monte Carlo error
  CHECK(std::abs(oracle_att(ref) - oracle::enum_att(ref)) < 1e-12);
  CHECK(std::abs(oracle_otr(ref) - 0.05) < 1e-12);
  CHECK(std::abs(oracle_otr(ref) - oracle::enum_otr(ref)) < 1e-12);

  const DiscreteDgp conf = confounded_dgp();
  CHECK(std::abs(oracle_att(conf) - oracle::enum_att(conf)) < 1e-12);
  CHECK(std::abs(oracle_otr(conf) - oracle::enum_otr(conf)) < 1e-12);

  // the hidden-confounder process still adds 0.1 in every cell
  CHECK(std::abs(oracle_att(omitted_confounder_dgp()) - 0.1) < 1e-12);

  const DiscreteDgp grouped = grouped_dgp(0.0, 0.1);
  CHECK(std::abs(oracle_att(grouped) - oracle::enum_att(grouped)) < 1e-12);
}

TEST_CASE("smooth oracles are seeded Monte Carlo with reported error") {
  const SmoothDgp s = smooth_dgp();
  double se = 0.0;
  const double att = oracle_att(s, &se);
  CHECK(se > 0.0);
  CHECK(se < 0.005);
  CHECK(std::abs(att - 0.29587417722416853) < 6.0 * se + 1e-4);
  CHECK(oracle_att(s) == att);  // internally seeded, so repeatable

  double se_otr = 0.0;
  const double otr = oracle_otr(s, &se_otr);
  CHECK(se_otr > 0.0);
  CHECK(std::abs(otr - 0.12062) < 6.0 * se_otr + 2e-4);
}

TEST_CASE("generation is deterministic, masked and binary") {
  const DiscreteDgp ref = reference_dgp();
  const CausalDataset ds = generate(ref, 800, 11);
  const CausalDataset again = generate(ref, 800, 11);
  REQUIRE(ds.n() == 800);
  CHECK(ds.x == again.x);
  CHECK(ds.r == again.r);
  CHECK(ds.y_binary);
  CHECK(ds.ids.front() == "1");
  CHECK(ds.ids.back() == "800");
  REQUIRE(ds.schema.columns.size() == 1);
  CHECK(ds.schema.columns[0].name == "x1");
  CHECK(ds.schema.columns[0].kind == ColumnKind::Binary);

  Eigen::Index masked = 0;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    CHECK((ds.r[i] == 0.0 || ds.r[i] == 1.0));
    if (ds.r[i] == 0.0) {
      CHECK(std::isnan(ds.a[i]));
      CHECK(std::isnan(ds.y[i]));
      CHECK(std::isnan(again.a[i]));
      ++masked;
    } else {
      CHECK((ds.a[i] == 0.0 || ds.a[i] == 1.0));
      CHECK((ds.y[i] == 0.0 || ds.y[i] == 1.0));
      CHECK(ds.a[i] == again.a[i]);
      CHECK(ds.y[i] == again.y[i]);
    }
  }
  CHECK(masked > 0);

  const CausalDataset other = generate(ref, 800, 12);
  bool differs = other.r != ds.r;
  for (Eigen::Index i = 0; i < ds.n() && !differs; ++i)
    differs = ds.x(i, 0) != other.x(i, 0);
  CHECK(differs);

  ds.validate();
}

TEST_CASE("a one-cell process hits its marginal rates") {
  const DiscreteDgp d = one_cell(0.3, 0.8, 0.2, 0.3);
  const Eigen::Index n = 20000;
  const CausalDataset ds = generate(d, n, 21);

  Eigen::Index observed = 0, treated = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ds.r[i] == 1.0) {
      ++observed;
      if (ds.a[i] == 1.0) ++treated;
    }
  }
  const double obs_rate = static_cast<double>(observed) / static_cast<double>(n);
  CHECK(std::abs(obs_rate - 0.8) < 4.0 * std::sqrt(0.8 * 0.2 / static_cast<double>(n)));
  const double treat_rate = static_cast<double>(treated) / static_cast<double>(observed);
  CHECK(std::abs(treat_rate - 0.3) <
        4.0 * std::sqrt(0.3 * 0.7 / static_cast<double>(observed)));
}

TEST_CASE("potential outcomes are independent of arm and follow-up given the cell") {
  const DiscreteDgp conf = confounded_dgp();  // strong confounding across cells
  const Eigen::Index n = 20000;
  Eigen::VectorXd y0, y1;
  const CausalDataset ds = generate(conf, n, 23, &y0, &y1);
  REQUIRE(y0.size() == n);
  REQUIRE(y1.size() == n);

  // consistency: the revealed outcome is the potential outcome of the drawn arm
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ds.r[i] != 1.0) continue;
    CHECK(ds.y[i] == (ds.a[i] == 1.0 ? y1[i] : y0[i]));
  }

  // within the x = 1 cell, Y0 has the same mean whether treated, untreated,
  // observed or lost; confounding lives across cells only
  const double m0_cell = conf.m0[1];
  double sum_t = 0, n_t = 0, sum_u = 0, n_u = 0, sum_lost = 0, n_lost = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ds.x(i, 0) != 1.0) continue;
    if (ds.r[i] == 0.0) {
      sum_lost += y0[i];
      ++n_lost;
    } else if (ds.a[i] == 1.0) {
      sum_t += y0[i];
      ++n_t;
    } else {
      sum_u += y0[i];
      ++n_u;
    }
  }
  const auto band = [](double p, double m) { return 4.0 * std::sqrt(p * (1 - p) / m); };
  CHECK(std::abs(sum_t / n_t - m0_cell) < band(m0_cell, n_t));
  CHECK(std::abs(sum_u / n_u - m0_cell) < band(m0_cell, n_u));
  CHECK(std::abs(sum_lost / n_lost - m0_cell) < band(m0_cell, n_lost));
}

TEST_CASE("the true surface reproduces the cell maps") {
  const DiscreteDgp ref = reference_dgp();
  const CausalDataset ds = generate(ref, 300, 31);
  const NuisanceSurface surface = true_nuisance_surface(ref, ds, 0.01, /*want_mu_y=*/true);
  REQUIRE(surface.mu_y.size() == 300);
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    const Eigen::Index cell = ds.x(i, 0) == 0.0 ? 0 : 1;
    CHECK(surface.omega[i] == ref.omega[cell]);
    CHECK(std::abs(surface.pi[i] - ref.pi[cell]) < 1e-15);
    CHECK(std::abs(surface.mu0[i] - ref.m0[cell]) < 1e-15);
    CHECK(std::abs(surface.mu1[i] - ref.pi[cell] * ref.m1[cell]) < 1e-15);
    const double mu_y = ref.pi[cell] * ref.m1[cell] + (1.0 - ref.pi[cell]) * ref.m0[cell];
    CHECK(std::abs(surface.mu_y[i] - mu_y) < 1e-15);
  }
  CHECK(surface.pi_clipped == 0);

  // a tighter clip bound bites: pi in {0.3, 0.7} against [0.35, 0.65]
  const NuisanceSurface clipped = true_nuisance_surface(ref, ds, 0.35);
  CHECK(clipped.pi_clipped == ds.n());
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    CHECK((clipped.pi[i] == 0.35 || clipped.pi[i] == 0.65));
  }

  CHECK_THROWS_AS(true_nuisance_surface(smooth_dgp(), ds, 0.01), ConfigError);
  CausalDataset poked = ds;
  poked.x(0, 0) = 5.0;
  CHECK_THROWS_AS(true_nuisance_surface(ref, poked, 0.01), DataError);
}

TEST_CASE("hidden columns are marginalized into observable-implied maps") {
  const DiscreteDgp d = omitted_confounder_dgp();
  const int d_obs = d.effective_observed_dim();
  REQUIRE(d_obs == 1);
  const CausalDataset ds = generate(d, 400, 37);
  REQUIRE(ds.d() == 1);
  const NuisanceSurface surface = true_nuisance_surface(d, ds);

  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    // recompute the mixture over hidden cells sharing this observed value
    double pw = 0, pwo = 0, pwopi = 0, pwo1mpi = 0, pwopim1 = 0, pwo1mpim0 = 0;
    for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
      if (d.cells(c, 0) != ds.x(i, 0)) continue;
      pw += d.prob[c];
      pwo += d.prob[c] * d.omega[c];
      pwopi += d.prob[c] * d.omega[c] * d.pi[c];
      pwo1mpi += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]);
      pwopim1 += d.prob[c] * d.omega[c] * d.pi[c] * d.m1[c];
      pwo1mpim0 += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]) * d.m0[c];
    }
    CHECK(std::abs(surface.omega[i] - pwo / pw) < 1e-15);
    CHECK(std::abs(surface.pi[i] - pwopi / pwo) < 1e-15);
    CHECK(std::abs(surface.mu0[i] - pwo1mpim0 / pwo1mpi) < 1e-15);
    CHECK(std::abs(surface.mu1[i] - pwopim1 / pwo) < 1e-15);
  }
}

TEST_CASE("plugging in the truth is unbiased with nominal coverage") {
  ExperimentConfig config;
  config.n = 2000;
  config.reps = 60;
  config.folds = 5;
  config.plug_true_nuisances = true;
  config.seed = 41;

  const ExperimentReport report = run_experiment(reference_dgp(), config);
  CHECK(std::abs(report.oracle - 0.1) < 1e-15);
  CHECK(report.n == 2000);
  CHECK(report.reps == 60);
  CHECK(report.failures == 0);
  CHECK(std::abs(report.bias) < 3.0 * report.rmse / std::sqrt(60.0));
  CHECK(report.coverage > 0.85);
  CHECK(report.coverage <= 1.0);
  CHECK(report.mean_ci_width > 0.0);

  const ExperimentReport again = run_experiment(reference_dgp(), config);
  CHECK(again.mean_estimate == report.mean_estimate);
  CHECK(again.rmse == report.rmse);
}

TEST_CASE("one broken nuisance is absorbed, three are not") {
  const DiscreteDgp conf = confounded_dgp();
  ExperimentConfig config;
  config.n = 4000;
  config.reps = 40;
  config.folds = 4;
  config.learners = LearnerSpec::logistic();  // saturated in the binary covariate
  config.seed = 43;

  config.flags.break_pi = true;
  const ExperimentReport robust = run_experiment(conf, config);
  CHECK(std::abs(robust.bias) < 0.015);

  config.flags = MisspecFlags{};
  config.flags.break_omega = true;
  config.flags.break_mu0 = true;
  config.flags.break_mu1 = true;
  const ExperimentReport broken = run_experiment(conf, config);
  const double plim =
      oracle::plim_att_constfit(conf, {/*omega=*/true, /*pi=*/false, /*mu0=*/true, /*mu1=*/true});
  CHECK(std::abs(plim - 0.047321) < 1e-5);
  CHECK(std::abs(broken.mean_estimate - plim) < 0.02);
  CHECK(std::abs(broken.mean_estimate - broken.oracle) > 0.03);
}

TEST_CASE("error decays like root n with the truth, plateaus under bias") {
  ExperimentConfig config;
  config.reps = 50;
  config.folds = 5;
  config.plug_true_nuisances = true;
  config.seed = 47;

  const std::vector<Eigen::Index> grid = {500, 2000, 8000};
  const ConvergenceTable table = convergence_study(reference_dgp(), grid, config);
  REQUIRE(table.points.size() == 3);
  CHECK(table.reps == 50);
  CHECK(table.points[0].n == 500);
  CHECK(table.points[2].n == 8000);
  CHECK(table.points[1].rmse < table.points[0].rmse);
  CHECK(table.points[2].rmse < table.points[1].rmse);
  CHECK(table.slope > -0.65);
  CHECK(table.slope < -0.35);

  ExperimentConfig flat = config;
  flat.plug_true_nuisances = false;
  flat.reps = 30;
  flat.flags.break_omega = true;
  flat.flags.break_pi = true;
  flat.flags.break_mu0 = true;
  flat.flags.break_mu1 = true;
  const ConvergenceTable stuck = convergence_study(confounded_dgp(), grid, flat);
  CHECK(stuck.slope > -0.15);

  CHECK_THROWS_AS(convergence_study(reference_dgp(), {1000}, config), ConfigError);
  CHECK_THROWS_AS(convergence_study(reference_dgp(), {1000, 500}, config), ConfigError);
}

TEST_CASE("a high replication failure rate aborts the experiment") {
  // treated fraction 0.95: tiny samples often lack an observed control in
  // some training fold, so the nuisance fit (correctly) refuses
  const DiscreteDgp d = one_cell(0.95, 0.8, 0.2, 0.3);
  ExperimentConfig config;
  config.n = 30;
  config.reps = 20;
  config.folds = 3;
  config.learners = LearnerSpec::logistic();
  config.seed = 53;
  CHECK_THROWS_AS(run_experiment(d, config), NumericError);
}

TEST_CASE("group labels ride along with generated data") {
  const DiscreteDgp d = grouped_dgp(0.0, 0.1);
  const CausalDataset ds = generate(d, 600, 59);
  REQUIRE(ds.group.size() == 600);
  for (const auto& g : ds.group) CHECK((g == "g0" || g == "g1"));
  const SubgroupPartition partition = partition_by_group(ds);
  REQUIRE(partition.labels.size() == 2);
  CHECK(partition.labels[0] == "g0");
  CHECK(partition.counts[0] + partition.counts[1] == 600);
}
