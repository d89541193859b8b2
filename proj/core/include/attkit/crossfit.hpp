#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "attkit/dataset.hpp"
#include "attkit/learners.hpp"

namespace attkit {

/// Seeded partition of n rows into K folds whose sizes differ by at most 1.
struct FoldAssignment {
  int K = 10;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;  // n entries in [0, K)

  Eigen::Index n() const { return static_cast<Eigen::Index>(fold_of.size()); }
};

/// Out-of-fold nuisance estimates: entry i comes from models trained with
/// fold_of[i] held out. omega and pi live in [eps, 1-eps]; mu_y is filled
/// only when requested (treatment-removal analyses).
struct NuisanceSurface {
  Eigen::VectorXd omega;  // P(R=1 | X)
  Eigen::VectorXd pi;     // E[A | X, R=1]
  Eigen::VectorXd mu0;    // E[Y | X, R=1, A=0]
  Eigen::VectorXd mu1;    // E[AY | X, R=1]
  Eigen::VectorXd mu_y;   // E[Y | X, R=1], optional
  Eigen::Index omega_clipped = 0;
  Eigen::Index pi_clipped = 0;
  double eps = 0.01;
  FoldAssignment folds;

  bool has_mu_y() const { return mu_y.size() > 0; }
};

/// Uniformly shuffles row indices and cuts the permutation into K contiguous
/// blocks; the first n mod K folds get the extra row.
FoldAssignment assign_folds(Eigen::Index n, int K, std::uint64_t seed);

/// Per-nuisance learner choices. Column lists restrict the covariates each
/// nuisance may see (empty = all); simulation studies use this to misspecify
/// individual nuisances.
struct NuisanceLearners {
  LearnerSpec omega, pi, mu0, mu1, mu_y;
  std::vector<int> omega_cols, pi_cols, mu0_cols, mu1_cols, mu_y_cols;

  static NuisanceLearners uniform(const LearnerSpec& spec) {
    return NuisanceLearners{spec, spec, spec, spec, spec, {}, {}, {}, {}, {}};
  }
};

/// Cross-fitted nuisance estimation. For every fold the five regressions are
/// trained on the complement: omega on all rows (target R), pi on R=1 rows
/// (target A), mu0 on R=1 & A=0 rows (target Y), mu1 on R=1 rows (target AY),
/// mu_y on R=1 rows (target Y) when requested. Model seeds derive from
/// (folds.seed, nuisance name, fold) so the surface is reproducible.
NuisanceSurface fit_nuisances(const CausalDataset& ds, const LearnerSpec& spec,
                              const FoldAssignment& folds, double eps = 0.01,
                              bool want_mu_y = false, unsigned n_threads = 1,
                              Warnings* warnings = nullptr);

NuisanceSurface fit_nuisances(const CausalDataset& ds, const NuisanceLearners& learners,
                              const FoldAssignment& folds, double eps = 0.01,
                              bool want_mu_y = false, unsigned n_threads = 1,
                              Warnings* warnings = nullptr);

/// Audit export: id, fold, omega, pi, mu0, mu1[, mu_y] per row.
void export_surface_csv(const NuisanceSurface& surface, const std::vector<std::string>& ids,
                        const std::string& path);

}  // namespace attkit
