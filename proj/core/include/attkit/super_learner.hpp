#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "attkit/learners.hpp"

namespace attkit {

/// Convex stack of base models: prediction = sum_b w_b * base_b(x) with
/// w >= 0, sum w = 1. Weights minimize V-fold cross-validated squared error.
class SuperLearnerModel final : public FittedModel {
 public:
  SuperLearnerModel(std::vector<ModelPtr> bases, Eigen::VectorXd weights, TargetKind target,
                    double cv_error = 0.0, Eigen::VectorXd base_cv_errors = {});

  double predict_row(const Eigen::RowVectorXd& x) const override;
  TargetKind target_kind() const override { return target_; }

  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<ModelPtr>& bases() const { return bases_; }

  /// Cross-validated squared error at the chosen weights, and per surviving
  /// base at its vertex. Zero / empty for the single-base fast path.
  double cv_error() const { return cv_error_; }
  const Eigen::VectorXd& base_cv_errors() const { return base_cv_errors_; }

 private:
  std::vector<ModelPtr> bases_;
  Eigen::VectorXd weights_;
  TargetKind target_;
  double cv_error_ = 0.0;
  Eigen::VectorXd base_cv_errors_;
};

/// Fits every base on V-fold out-of-fold data, solves for simplex weights by
/// projected gradient (vertices checked so the stack never loses to a single
/// base), then refits the bases on all rows. Bases that throw are dropped
/// with a warning; if all fail the fit fails.
std::shared_ptr<const SuperLearnerModel> fit_super_learner(const Eigen::MatrixXd& x,
                                                           const Eigen::VectorXd& t,
                                                           const LearnerSpec& spec,
                                                           TargetKind target, std::uint64_t seed,
                                                           Warnings* warnings = nullptr);

/// Mean squared error of the stacked cross-validated predictions at the given
/// weights; exposed for the weight-optimality property test.
double stacking_cv_error(const Eigen::MatrixXd& cv_predictions, const Eigen::VectorXd& t,
                         const Eigen::VectorXd& weights);

}  // namespace attkit
