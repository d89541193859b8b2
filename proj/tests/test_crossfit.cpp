#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "attkit/crossfit.hpp"
#include "attkit/dataset.hpp"
#include "attkit/logistic.hpp"
#include "attkit/rng.hpp"

using namespace attkit;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MakeOpts {
  double r_rate = 1.0;
  bool zero_control_y = false;
  bool all_treated = false;
  bool a_from_x2 = false;
};

CausalDataset make_dataset(Eigen::Index n, std::uint64_t seed, MakeOpts opts = {}) {
  Rng rng(seed);
  CausalDataset ds;
  ds.schema.columns = {{"x1", ColumnKind::Continuous, {}}, {"x2", ColumnKind::Continuous, {}}};
  ds.x.resize(n, 2);
  ds.r.resize(n);
  ds.a.resize(n);
  ds.y.resize(n);
  ds.y_binary = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.x(i, 0) = 2.0 * rng.uniform() - 1.0;
    ds.x(i, 1) = 2.0 * rng.uniform() - 1.0;
    ds.r[i] = rng.bernoulli(opts.r_rate) ? 1.0 : 0.0;
    if (ds.r[i] == 1.0) {
      const double p_a = opts.a_from_x2 ? expit(1.5 * ds.x(i, 1)) : 0.5;
      ds.a[i] = (opts.all_treated || rng.bernoulli(p_a)) ? 1.0 : 0.0;
      double p_y = expit(0.5 * ds.x(i, 0) + 0.4 * ds.a[i]);
      ds.y[i] = rng.bernoulli(p_y) ? 1.0 : 0.0;
      if (opts.zero_control_y && ds.a[i] == 0.0) ds.y[i] = 0.0;
    } else {
      ds.a[i] = kNaN;
      ds.y[i] = kNaN;
    }
    ds.ids.push_back(std::to_string(i + 1));
  }
  ds.validate();
  return ds;
}

std::vector<Eigen::Index> fold_sizes(const FoldAssignment& folds) {
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(folds.K), 0);
  for (int f : folds.fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

}  // namespace

TEST_CASE("fold assignment partitions evenly and reproducibly") {
  SUBCASE("n equals K") {
    const FoldAssignment folds = assign_folds(10, 10, 1);
    for (Eigen::Index s : fold_sizes(folds)) CHECK(s == 1);
  }
  SUBCASE("one extra row lands in the first fold") {
    const FoldAssignment folds = assign_folds(11, 10, 1);
    const auto sizes = fold_sizes(folds);
    CHECK(sizes[0] == 2);
    for (std::size_t f = 1; f < sizes.size(); ++f) CHECK(sizes[f] == 1);
  }
  SUBCASE("sizes never differ by more than one") {
    for (Eigen::Index n : {23, 57, 100}) {
      const FoldAssignment folds = assign_folds(n, 7, 3);
      const auto sizes = fold_sizes(folds);
      Eigen::Index total = 0;
      for (Eigen::Index s : sizes) total += s;
      CHECK(total == n);
      Eigen::Index lo = sizes[0], hi = sizes[0];
      for (Eigen::Index s : sizes) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      CHECK(hi - lo <= 1);
      for (int f : folds.fold_of) {
        CHECK(f >= 0);
        CHECK(f < 7);
      }
    }
  }
  SUBCASE("same seed repeats, new seed reshuffles") {
    const FoldAssignment a = assign_folds(50, 5, 42);
    const FoldAssignment b = assign_folds(50, 5, 42);
    const FoldAssignment c = assign_folds(50, 5, 43);
    CHECK(a.fold_of == b.fold_of);
    CHECK(a.fold_of != c.fold_of);
  }
  SUBCASE("fold count bounds") {
    CHECK_THROWS_AS(assign_folds(5, 6, 1), ConfigError);
    CHECK_THROWS_AS(assign_folds(5, 1, 1), ConfigError);
  }
}

TEST_CASE("treatment propensity recovers a fair coin") {
  const CausalDataset ds = make_dataset(2000, 7);
  const FoldAssignment folds = assign_folds(ds.n(), 5, 2);
  const NuisanceSurface surface = fit_nuisances(ds, LearnerSpec::logistic(), folds);
  CHECK(std::abs(surface.pi.mean() - 0.5) < 0.05);
  CHECK(surface.pi.minCoeff() >= surface.eps);
  CHECK(surface.pi.maxCoeff() <= 1.0 - surface.eps);
}

TEST_CASE("certain followup pins omega at the clip ceiling") {
  const CausalDataset ds = make_dataset(200, 11);
  const FoldAssignment folds = assign_folds(ds.n(), 4, 3);
  const NuisanceSurface surface = fit_nuisances(ds, LearnerSpec::logistic(), folds, 0.01);
  for (Eigen::Index i = 0; i < ds.n(); ++i) CHECK(surface.omega[i] == 0.99);
  CHECK(surface.omega_clipped == ds.n());
}

TEST_CASE("all-zero control outcomes produce an exactly zero mu0") {
  MakeOpts opts;
  opts.zero_control_y = true;
  const CausalDataset ds = make_dataset(240, 13, opts);
  NuisanceLearners learners = NuisanceLearners::uniform(LearnerSpec::logistic());
  learners.mu0 = LearnerSpec::random_forest(20, 4, 2);
  const FoldAssignment folds = assign_folds(ds.n(), 4, 5);
  const NuisanceSurface surface = fit_nuisances(ds, learners, folds);
  for (Eigen::Index i = 0; i < ds.n(); ++i) CHECK(surface.mu0[i] == 0.0);
}

TEST_CASE("a fold without control rows is reported by name") {
  MakeOpts opts;
  opts.all_treated = true;
  const CausalDataset ds = make_dataset(40, 17, opts);
  const FoldAssignment folds = assign_folds(ds.n(), 4, 1);
  try {
    fit_nuisances(ds, LearnerSpec::logistic(), folds);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fold") != std::string::npos);
    CHECK(msg.find("treatment = 0") != std::string::npos);
    CHECK(msg.find("use fewer folds") != std::string::npos);
  }
}

TEST_CASE("poisoning a fold leaves its own out-of-fold predictions unchanged") {
  const CausalDataset clean = make_dataset(300, 19);
  const FoldAssignment folds = assign_folds(clean.n(), 3, 9);
  const NuisanceSurface before = fit_nuisances(clean, LearnerSpec::logistic(), folds);

  CausalDataset poisoned = clean;
  for (Eigen::Index i = 0; i < poisoned.n(); ++i)
    if (folds.fold_of[static_cast<std::size_t>(i)] == 1 && poisoned.r[i] == 1.0)
      poisoned.y[i] = 1.0 - poisoned.y[i];
  const NuisanceSurface after = fit_nuisances(poisoned, LearnerSpec::logistic(), folds);

  bool outcome_fits_moved = false;
  for (Eigen::Index i = 0; i < clean.n(); ++i) {
    if (folds.fold_of[static_cast<std::size_t>(i)] == 1) {
      // fold 1's models never saw fold 1, so the poison cannot reach these rows
      CHECK(after.omega[i] == before.omega[i]);
      CHECK(after.pi[i] == before.pi[i]);
      CHECK(after.mu0[i] == before.mu0[i]);
      CHECK(after.mu1[i] == before.mu1[i]);
    } else {
      // treatment and followup targets were untouched everywhere
      CHECK(after.pi[i] == before.pi[i]);
      CHECK(after.omega[i] == before.omega[i]);
      if (after.mu0[i] != before.mu0[i] || after.mu1[i] != before.mu1[i])
        outcome_fits_moved = true;
    }
  }
  CHECK(outcome_fits_moved);
}

TEST_CASE("surfaces are deterministic in the seed and the thread count") {
  const CausalDataset ds = make_dataset(240, 23);
  const LearnerSpec forest = LearnerSpec::random_forest(40, 5, 2);
  const FoldAssignment folds = assign_folds(ds.n(), 3, 4);
  const NuisanceSurface a = fit_nuisances(ds, forest, folds, 0.01, false, 1);
  const NuisanceSurface b = fit_nuisances(ds, forest, folds, 0.01, false, 1);
  const NuisanceSurface c = fit_nuisances(ds, forest, folds, 0.01, false, 4);
  CHECK(a.omega == b.omega);
  CHECK(a.pi == b.pi);
  CHECK(a.mu0 == b.mu0);
  CHECK(a.mu1 == b.mu1);
  CHECK(a.omega == c.omega);
  CHECK(a.pi == c.pi);
  CHECK(a.mu0 == c.mu0);
  CHECK(a.mu1 == c.mu1);

  const FoldAssignment other = assign_folds(ds.n(), 3, 5);
  const NuisanceSurface d = fit_nuisances(ds, forest, other, 0.01, false, 1);
  CHECK(a.pi != d.pi);
}

TEST_CASE("per-nuisance column restrictions change only what they should") {
  MakeOpts opts;
  opts.a_from_x2 = true;
  const CausalDataset ds = make_dataset(400, 29, opts);
  const FoldAssignment folds = assign_folds(ds.n(), 4, 6);

  NuisanceLearners full = NuisanceLearners::uniform(LearnerSpec::logistic());
  const NuisanceSurface wide = fit_nuisances(ds, full, folds);

  NuisanceLearners blinkered = full;
  blinkered.pi_cols = {0};  // hide x2 from the treatment model only
  const NuisanceSurface narrow = fit_nuisances(ds, blinkered, folds);

  CHECK(wide.pi != narrow.pi);
  CHECK(wide.omega == narrow.omega);
  CHECK(wide.mu0 == narrow.mu0);
  CHECK(wide.mu1 == narrow.mu1);

  NuisanceLearners broken = full;
  broken.mu1_cols = {5};
  CHECK_THROWS_AS(fit_nuisances(ds, broken, folds), ConfigError);
}

TEST_CASE("the outcome-only regression appears when requested") {
  const CausalDataset ds = make_dataset(160, 31);
  const FoldAssignment folds = assign_folds(ds.n(), 4, 7);
  const NuisanceSurface without = fit_nuisances(ds, LearnerSpec::logistic(), folds, 0.01, false);
  CHECK(!without.has_mu_y());
  const NuisanceSurface with_y = fit_nuisances(ds, LearnerSpec::logistic(), folds, 0.01, true);
  REQUIRE(with_y.has_mu_y());
  CHECK(with_y.mu_y.size() == ds.n());
  CHECK(with_y.mu0 == without.mu0);
}

TEST_CASE("surface export is an auditable csv") {
  const CausalDataset ds = make_dataset(30, 37);
  const FoldAssignment folds = assign_folds(ds.n(), 3, 8);
  const NuisanceSurface surface = fit_nuisances(ds, LearnerSpec::logistic(), folds, 0.01, true);
  export_surface_csv(surface, ds.ids, "cf_surface.csv");

  std::ifstream in("cf_surface.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "id,fold,omega,pi,mu0,mu1,mu_y");
  Eigen::Index rows = 0;
  std::string first_row;
  while (std::getline(in, line)) {
    if (rows == 0) first_row = line;
    ++rows;
  }
  CHECK(rows == ds.n());

  // round-trip check on the first row's omega field
  std::stringstream ss(first_row);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(field == ds.ids[0]);
  std::getline(ss, field, ',');
  CHECK(std::stoi(field) == folds.fold_of[0]);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == surface.omega[0]);

  std::vector<std::string> short_ids(ds.ids.begin(), ds.ids.end() - 1);
  CHECK_THROWS_AS(export_surface_csv(surface, short_ids, "cf_surface.csv"), ConfigError);
  CHECK_THROWS_AS(export_surface_csv(surface, ds.ids, "no_such_dir/cf.csv"), DataError);
  std::remove("cf_surface.csv");
}
