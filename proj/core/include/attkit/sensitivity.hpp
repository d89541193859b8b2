#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "attkit/crossfit.hpp"
#include "attkit/dataset.hpp"
#include "attkit/estimators.hpp"

namespace attkit {

/// Ratio-sensitivity bounds at one delta:
///   L = (psi_ay1 - delta psi_ay0) / psi_a
///   U = (psi_ay1 - (1/delta) psi_ay0) / psi_a
/// CIs come from the influence function (phi_ay1 - c phi_ay0 - phi_a B) / psi_a
/// with c in {delta, 1/delta} and B the matching bound.
struct BoundEstimate {
  double delta = 1.0;
  double lower = 0.0;
  double lower_ci_low = 0.0;
  double lower_ci_high = 0.0;
  double upper = 0.0;
  double upper_ci_low = 0.0;
  double upper_ci_high = 0.0;
};

struct SensitivityCurve {
  std::vector<BoundEstimate> points;
};

/// Scalar calibration of the sensitivity ratio from a covariate subset V:
/// the mean of mu0(X) over treated observed rows divided by the mean of a
/// cross-fit regression of Y on V (untreated observed rows) over the same
/// population. delta_max is the per-stratum supremum when V is discrete with
/// few strata, NaN otherwise.
struct DeltaCalibration {
  std::vector<std::string> subset;
  Eigen::Index subset_size = 0;
  double delta_hat = 1.0;
  double delta_max = 0.0;
  Eigen::Index strata = 0;  // 0 when the stratum-wise view was unavailable
};

/// Additive-delta interval around the treatment-removal effect:
/// psi_otr -/+ delta_add * P_n[phi_a].
struct OtrBounds {
  double delta_add = 0.0;
  double psi_otr = 0.0;
  double lower = 0.0;
  double lower_ci_low = 0.0;
  double lower_ci_high = 0.0;
  double upper = 0.0;
  double upper_ci_low = 0.0;
  double upper_ci_high = 0.0;
};

BoundEstimate ratio_bounds(const std::vector<InfluenceRecord>& records, double delta,
                           double eps = 0.01);

/// Bounds over a sorted grid of deltas >= 1. Verifies the monotonicity
/// invariants (lower non-increasing, upper non-decreasing, lower <= upper).
SensitivityCurve sensitivity_curve(const std::vector<InfluenceRecord>& records,
                                   const std::vector<double>& delta_grid, double eps = 0.01);

/// Default grid 1.00, 1.01, ..., 2.00.
std::vector<double> default_delta_grid();

/// CSV: delta, lower, lower_ci_lo, lower_ci_hi, upper, upper_ci_lo, upper_ci_hi.
void export_curve_csv(const SensitivityCurve& curve, const std::string& path);

DeltaCalibration calibrate_delta(const CausalDataset& ds, const NuisanceSurface& surface,
                                 const std::vector<std::string>& subset,
                                 const LearnerSpec& learner, std::uint64_t seed,
                                 Warnings* warnings = nullptr);

OtrBounds otr_additive_bounds(const CausalDataset& ds, const NuisanceSurface& surface,
                              double delta_add, double eps = 0.01);

}  // namespace attkit
