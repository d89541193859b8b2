#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "attkit/crossfit.hpp"
#include "attkit/dataset.hpp"
#include "attkit/learners.hpp"

namespace attkit {

/// Discrete-cell data generating process. Each row of `cells` is a covariate
/// pattern; per-cell maps give P(A=1|x), P(R=1|x), E[Y0|x], E[Y1|x].
/// Setting observed_dim < cells.cols() hides the trailing columns (an
/// unmeasured confounder): generated datasets carry only the leading columns
/// while treatment/missingness/outcomes still depend on the full pattern.
struct DiscreteDgp {
  Eigen::MatrixXd cells;  // C x d covariate patterns
  Eigen::VectorXd prob;   // cell probabilities, sum to 1
  Eigen::VectorXd pi;     // P(A=1 | cell)
  Eigen::VectorXd omega;  // P(R=1 | cell)
  Eigen::VectorXd m0;     // E[Y0 | cell]
  Eigen::VectorXd m1;     // E[Y1 | cell]
  int observed_dim = -1;  // -1: every column observed
  int group_col = -1;     // observed column used as a subgroup label, if any

  int effective_observed_dim() const {
    return observed_dim < 0 ? static_cast<int>(cells.cols()) : observed_dim;
  }
  void validate() const;
};

/// Smooth process on X ~ Uniform(-1, 1)^dim with logistic-linear maps.
/// Coefficient vectors are [intercept, slope_1..slope_dim] for
/// omega = P(R=1|x), pi = P(A=1|x), mu0 = E[Y0|x] and mu1 = E[AY|x, R=1];
/// the treated outcome mean is mu1/pi, kept inside (0, 1) by construction.
struct SmoothDgp {
  int dim = 2;
  Eigen::VectorXd omega_coef;
  Eigen::VectorXd pi_coef;
  Eigen::VectorXd mu0_coef;
  Eigen::VectorXd mu1_coef;

  void validate() const;
};

using Dgp = std::variant<DiscreteDgp, SmoothDgp>;

/// Which nuisances a simulation run deliberately breaks and how. Constant
/// fits replace the learner with the marginal target mean; covariate dropping
/// strips the listed columns (all of them when the list is empty) from the
/// broken nuisances' training data.
struct MisspecFlags {
  bool break_omega = false;
  bool break_pi = false;
  bool break_mu0 = false;
  bool break_mu1 = false;
  enum class Mechanism { ConstantFit, DropCovariates };
  Mechanism mechanism = Mechanism::ConstantFit;
  std::vector<int> drop_cols;

  bool any() const { return break_omega || break_pi || break_mu0 || break_mu1; }
};

struct ExperimentConfig {
  Eigen::Index n = 2000;
  int reps = 100;
  int folds = 10;
  double eps = 0.01;
  LearnerSpec learners;
  MisspecFlags flags;
  bool plug_true_nuisances = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct ExperimentReport {
  Eigen::Index n = 0;
  int reps = 0;
  double oracle = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;        // fraction of reps whose 95% CI contains the oracle
  double mean_ci_width = 0.0;
  int failures = 0;
  double wall_time_seconds = 0.0;
};

struct ConvergencePoint {
  Eigen::Index n = 0;
  double rmse = 0.0;
  double bias = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergencePoint> points;
  double slope = 0.0;  // least-squares slope of log rmse on log n
  int reps = 0;
};

/// Population ATT. Discrete processes are enumerated exactly; smooth ones use
/// 10^6 Monte Carlo draws whose standard error is reported through mc_se.
double oracle_att(const Dgp& dgp, double* mc_se = nullptr);

/// Population treatment-removal effect E[Y] - E[Y0], same evaluation scheme.
double oracle_otr(const Dgp& dgp, double* mc_se = nullptr);

/// Draws a dataset: X from the covariate law, A | X, R | X independent of
/// (Y0, Y1) given X, Y = A Y1 + (1-A) Y0, then A and Y masked where R = 0.
/// Optionally exposes the potential outcomes for audit.
CausalDataset generate(const Dgp& dgp, Eigen::Index n, std::uint64_t seed,
                       Eigen::VectorXd* y0_out = nullptr, Eigen::VectorXd* y1_out = nullptr);

/// The true nuisance maps evaluated at each row's observed covariates (for
/// hidden-confounder processes: the observable-implied maps, enumerated).
NuisanceSurface true_nuisance_surface(const Dgp& dgp, const CausalDataset& ds, double eps = 0.01,
                                      bool want_mu_y = false);

/// reps independent generate -> crossfit -> estimate runs with the configured
/// misspecification. Individual rep failures are tolerated up to 10%.
ExperimentReport run_experiment(const Dgp& dgp, const ExperimentConfig& config);

/// rmse at each n plus the log-log slope across the grid.
ConvergenceTable convergence_study(const Dgp& dgp, const std::vector<Eigen::Index>& n_grid,
                                   const ExperimentConfig& base);

/// The shared reference process: one fair binary covariate,
/// pi = (0.3, 0.7), omega = 0.8, m0 = (0.2, 0.4), m1 = m0 + 0.1. ATT = 0.1.
DiscreteDgp reference_dgp();

/// Strong-confounding variant used to demonstrate non-vanishing bias when
/// no consistency branch holds: pi = (0.15, 0.85), omega = (0.95, 0.5),
/// m0 = (0.1, 0.6), m1 = m0 + 0.1.
DiscreteDgp confounded_dgp();

/// Hidden binary confounder u (trailing cell column, not observed): the
/// calibration target delta = E[E[Y|X,A=0,R=1] | A=1, R=1] / E[Y | A=0, R=1]
/// is enumerable exactly.
DiscreteDgp omitted_confounder_dgp();

/// Logistic-linear maps on Uniform(-1,1)^2; every nuisance is exactly
/// representable by the logistic learner.
SmoothDgp smooth_dgp();

/// Two observed groups (second cell column; the third column is its
/// interaction with the first covariate, so saturated logistic fits are
/// exact). Per-group additive effects: m1 = m0 + effect_g.
DiscreteDgp grouped_dgp(double effect0, double effect1);

}  // namespace attkit
