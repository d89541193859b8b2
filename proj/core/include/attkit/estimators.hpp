#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "attkit/crossfit.hpp"
#include "attkit/dataset.hpp"
#include "attkit/errors.hpp"

namespace attkit {

/// Uncentered influence values for one observation:
///   phi_ay1 = (R/omega)(AY - mu1) + mu1
///   phi_a   = (R/omega)(A - pi) + pi
///   phi_ay0 = (R/omega)(A - pi) mu0 + (R/omega)((1-A) pi / (1-pi))(Y - mu0) + pi mu0
/// On R = 0 rows the weighted terms vanish and A, Y are never read.
struct InfluenceRecord {
  double phi_ay1 = 0.0;
  double phi_a = 0.0;
  double phi_ay0 = 0.0;
};

struct AttEstimate {
  double psi_att = 0.0;   // (psi_ay1 - psi_ay0) / psi_a
  double psi_ay1 = 0.0;
  double psi_ay0 = 0.0;
  double psi_a = 0.0;
  double sigma2 = 0.0;    // sample variance of the centered ATT influence values
  double ci_low = 0.0;    // psi_att -/+ 1.96 sqrt(sigma2 / n)
  double ci_high = 0.0;
  Eigen::Index n = 0;
  double relative_reduction = 0.0;  // 1 - psi_ay0 / psi_ay1, delta-method CI
  double rr_ci_low = 0.0;
  double rr_ci_high = 0.0;
};

/// Treatment-removal contrast E[Y] - E[Y^0] with its one-step components.
struct OtrEstimate {
  double psi_otr = 0.0;  // psi_y - psi_y0
  double psi_y = 0.0;    // one-step mean of Y
  double psi_y0 = 0.0;   // one-step mean of Y^0
  double sigma2 = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Eigen::Index n = 0;
};

/// Per-observation pieces of the removal contrast:
///   phi_y  = (R/omega)(Y - mu_y) + mu_y
///   phi_y0 = (R/omega)((1-A) pi / (1-pi))(Y - mu0) + mu0
struct OtrRecord {
  double phi_y = 0.0;
  double phi_y0 = 0.0;
};

struct GroupAtt {
  std::string label;
  int group = -1;  // index into the partition's labels
  Eigen::Index count = 0;
  AttEstimate estimate;
};

struct HomogeneityTest {
  double t_n = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::vector<GroupAtt> group_estimates;
};

struct OverlapDiagnostic {
  std::vector<double> edges;         // 51 edges over [0, 1]
  std::vector<Eigen::Index> counts;  // 50 bins
  double threshold = 0.02;
  Eigen::Index low_count = 0;
  double low_fraction = 0.0;
  Eigen::Index n = 0;
};

std::vector<InfluenceRecord> influence_values(const CausalDataset& ds,
                                              const NuisanceSurface& surface);

std::vector<OtrRecord> otr_influence_values(const CausalDataset& ds,
                                            const NuisanceSurface& surface);

/// One-step ATT from influence records. Fails when the one-step treated
/// fraction P_n[phi_a] leaves (eps, 1 - eps).
AttEstimate estimate_att(const std::vector<InfluenceRecord>& records, double eps = 0.01);

OtrEstimate estimate_otr(const CausalDataset& ds, const NuisanceSurface& surface);

/// Per-group ATT estimates over a partition. Groups smaller than min_count
/// are dropped with a warning; the homogeneity test downstream needs at
/// least two survivors, but a single-group result is fine on its own.
std::vector<GroupAtt> subgroup_estimates(const std::vector<InfluenceRecord>& records,
                                         const SubgroupPartition& partition, double eps = 0.01,
                                         Eigen::Index min_count = 30,
                                         Warnings* warnings = nullptr);

/// Wald test of equal group effects: T_n = n (C psi)' (C Sigma C')^{-1} (C psi)
/// with C the successive-difference matrix and Sigma the diagonal of
/// (n / n_g) sigma2_g (groups are disjoint samples). p = P(chi2_{K-1} >= T_n).
HomogeneityTest homogeneity_test(const std::vector<GroupAtt>& groups);

/// Upper tail of the chi-squared distribution via the regularized upper
/// incomplete gamma function Q(df/2, x/2); absolute error below 1e-8.
double chi2_sf(double x, int df);

/// Q(a, x) = Gamma(a, x) / Gamma(a): series expansion for x < a + 1,
/// continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// 50-bin histogram of the treatment propensity with the fraction below the
/// given threshold, flagging regions where an ATE would be ill-posed.
OverlapDiagnostic overlap_diagnostic(const NuisanceSurface& surface, double threshold = 0.02);

}  // namespace attkit
