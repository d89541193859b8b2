#include "attkit/logistic.hpp"

#include <cmath>
#include <sstream>

namespace attkit {

namespace {

/* log(1 + e^z) without overflow */
double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(x.cols()) = x;
  return z;
}

}  // namespace

LogisticModel::LogisticModel(Eigen::VectorXd coef) : coef_(std::move(coef)) {}

double LogisticModel::predict_row(const Eigen::RowVectorXd& x) const {
  if (x.size() + 1 != coef_.size()) throw DataError("prediction row width does not match fit");
  double eta = coef_[0];
  for (Eigen::Index j = 0; j < x.size(); ++j) eta += coef_[j + 1] * x[j];
  return expit(eta);
}

double logistic_penalized_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                 const Eigen::VectorXd& coef, double lambda) {
  const Eigen::Index n = x.rows();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = coef[0];
    for (Eigen::Index j = 0; j < x.cols(); ++j) eta += coef[j + 1] * x(i, j);
    ll += t[i] * eta - log1pexp(eta);
  }
  double penalty = 0.0;
  for (Eigen::Index j = 1; j < coef.size(); ++j) penalty += coef[j] * coef[j];
  return ll - 0.5 * lambda * penalty;
}

std::shared_ptr<const LogisticModel> fit_logistic(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& t, double lambda,
                                                  Warnings* warnings) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols() + 1;
  if (n < 1) throw DataError("logistic fit needs at least one row");
  if (t.size() != n) throw DataError("target length does not match rows");
  if (lambda < 0.0) throw ConfigError("ridge penalty must be >= 0");
  if (!x.allFinite()) throw DataError("covariates must be finite");
  for (Eigen::Index i = 0; i < n; ++i)
    if (t[i] != 0.0 && t[i] != 1.0) throw DataError("logistic fit requires a binary target");

  const Eigen::MatrixXd z = with_intercept(x);
  Eigen::VectorXd penalty_diag = Eigen::VectorXd::Constant(p, lambda);
  penalty_diag[0] = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = logistic_penalized_loglik(x, t, beta, lambda);
  double ridge_boost = 0.0;

  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd eta = z * beta;
    Eigen::VectorXd prob(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = expit(eta[i]);
      w[i] = prob[i] * (1.0 - prob[i]);
    }

    Eigen::VectorXd grad = z.transpose() * (t - prob) - penalty_diag.cwiseProduct(beta);
    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z;
    hess.diagonal() += penalty_diag;

    Eigen::VectorXd step;
    for (;;) {
      Eigen::MatrixXd h = hess;
      if (ridge_boost > 0.0)
        for (Eigen::Index j = 0; j < p; ++j) h(j, j) += ridge_boost;
      step = h.ldlt().solve(grad);
      if (step.allFinite()) break;
      ridge_boost += 1e-6;
      if (warnings)
        warnings->add("singular IRLS normal equations; effective ridge raised by 1e-6");
      if (ridge_boost > 1.0) throw NumericError("IRLS normal equations remained singular");
    }

    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double cand_ll = logistic_penalized_loglik(x, t, candidate, lambda);
    int halvings = 0;
    while (cand_ll < ll && halvings < 30) {
      scale *= 0.5;
      candidate = beta + scale * step;
      cand_ll = logistic_penalized_loglik(x, t, candidate, lambda);
      ++halvings;
    }
    if (cand_ll < ll) break;  // no usable ascent direction

    const double max_change = (scale * step).cwiseAbs().maxCoeff();
    beta = candidate;
    ll = cand_ll;
    if (max_change < 1e-8) break;
  }

  return std::make_shared<LogisticModel>(std::move(beta));
}

}  // namespace attkit
