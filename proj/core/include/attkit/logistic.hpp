#pragma once

#include <Eigen/Dense>

#include <memory>

#include "attkit/errors.hpp"
#include "attkit/learners.hpp"

namespace attkit {

/// Ridge-penalized logistic regression fitted by IRLS with step-halving.
/// The intercept is unpenalized. Coefficients are [intercept, beta_1..beta_d].
class LogisticModel final : public FittedModel {
 public:
  LogisticModel(Eigen::VectorXd coef);

  double predict_row(const Eigen::RowVectorXd& x) const override;
  TargetKind target_kind() const override { return TargetKind::Probability; }

  const Eigen::VectorXd& coefficients() const { return coef_; }

 private:
  Eigen::VectorXd coef_;
};

/// IRLS fit. Converges when the max coefficient update drops below 1e-8 or
/// after 100 iterations; each step is halved (up to 30 times) if it would
/// decrease the penalized log-likelihood. Singular normal equations escalate
/// the effective ridge by 1e-6 per retry with a warning.
std::shared_ptr<const LogisticModel> fit_logistic(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& t, double lambda,
                                                  Warnings* warnings = nullptr);

/// Penalized Bernoulli log-likelihood at the given coefficients; the ridge
/// penalty excludes the intercept. Shared with tests.
double logistic_penalized_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                 const Eigen::VectorXd& coef, double lambda);

inline double expit(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace attkit
