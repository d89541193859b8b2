#pragma once

// Independent reference implementations used to check library output. These
// are written directly against the public formulas (textbook recurrences,
// dense Newton, exhaustive enumeration) and share no code with the library
// beyond struct field access.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "attkit/sim.hpp"

namespace oracle {

/// Ridge-penalized logistic regression by full-Hessian Newton steps with an
/// exact LU solve. Objective (matching the library's convention):
///   sum_i [t_i eta_i - log(1 + exp(eta_i))] - (lambda / 2) sum_{j>=1} b_j^2
/// with the intercept b_0 unpenalized. No step control: callers supply
/// well-conditioned instances.
inline Eigen::VectorXd newton_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                                       double lambda) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols() + 1;
  Eigen::MatrixXd z(n, p);
  z.col(0).setOnes();
  z.rightCols(x.cols()) = x;
  Eigen::VectorXd pen = Eigen::VectorXd::Constant(p, lambda);
  pen[0] = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd eta = z * beta;
    Eigen::VectorXd prob(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
      w[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd grad = z.transpose() * (t - prob) - pen.cwiseProduct(beta);
    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z;
    hess.diagonal() += pen;
    const Eigen::VectorXd step = hess.fullPivLu().solve(grad);
    beta += step;
    if (step.cwiseAbs().maxCoeff() < 1e-13) break;
  }
  return beta;
}

/// Chi-squared upper tail from the closed forms at df in {1, 2} and the
/// recurrence Q(x; k+2) = Q(x; k) + (x/2)^(k/2) e^(-x/2) / Gamma(k/2 + 1).
inline double chi2_sf_recursive(double x, int df) {
  if (x <= 0.0) return 1.0;
  const double h = 0.5 * x;
  if (df % 2 == 0) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < df / 2; ++k) {
      term *= h / k;
      sum += term;
    }
    return std::exp(-h) * sum;
  }
  double q = std::erfc(std::sqrt(h));
  for (int k = 1; k + 2 <= df; k += 2)
    q += std::exp(0.5 * k * std::log(h) - h - std::lgamma(0.5 * k + 1.0));
  return q;
}

// ---- discrete-process enumeration -----------------------------------------

inline double enum_att(const attkit::DiscreteDgp& d) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
    num += d.prob[c] * d.pi[c] * (d.m1[c] - d.m0[c]);
    den += d.prob[c] * d.pi[c];
  }
  return num / den;
}

inline double enum_otr(const attkit::DiscreteDgp& d) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c)
    total += d.prob[c] * d.pi[c] * (d.m1[c] - d.m0[c]);
  return total;
}

/// E[pi(X) mu0(X)]: the population mean of phi_ay0 at the true nuisances.
inline double enum_mean_phi_ay0(const attkit::DiscreteDgp& d) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) total += d.prob[c] * d.pi[c] * d.m0[c];
  return total;
}

struct ConstFit {
  bool omega = false, pi = false, mu0 = false, mu1 = false;
};

/// Probability limit of the one-step ATT when the flagged nuisances are
/// replaced by their marginal means (the plim of an intercept-only fit) and
/// the rest are exact. Enumerates E[phi] cell by cell under MAR.
inline double plim_att_constfit(const attkit::DiscreteDgp& d, ConstFit broken) {
  double pw = 0.0, pwpi = 0.0, pw1mpi = 0.0, pwpim1 = 0.0, pw1mpim0 = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
    pw += d.prob[c] * d.omega[c];
    pwpi += d.prob[c] * d.omega[c] * d.pi[c];
    pw1mpi += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]);
    pwpim1 += d.prob[c] * d.omega[c] * d.pi[c] * d.m1[c];
    pw1mpim0 += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]) * d.m0[c];
  }
  const double omega_bar = pw;
  const double pi_bar = pwpi / pw;
  const double mu0_bar = pw1mpim0 / pw1mpi;
  const double mu1_bar = pwpim1 / pw;

  double e1 = 0.0, ea = 0.0, e0 = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
    const double oh = broken.omega ? omega_bar : d.omega[c];
    const double ph = broken.pi ? pi_bar : d.pi[c];
    const double m0h = broken.mu0 ? mu0_bar : d.m0[c];
    const double m1h = broken.mu1 ? mu1_bar : d.pi[c] * d.m1[c];
    const double ratio = d.omega[c] / oh;
    e1 += d.prob[c] * (ratio * (d.pi[c] * d.m1[c] - m1h) + m1h);
    ea += d.prob[c] * (ratio * (d.pi[c] - ph) + ph);
    e0 += d.prob[c] *
          (ratio * (d.pi[c] - ph) * m0h +
           ratio * ((1.0 - d.pi[c]) * ph / (1.0 - ph)) * (d.m0[c] - m0h) + ph * m0h);
  }
  return (e1 - e0) / ea;
}

/// Groups cell indices by their leading `k` covariate columns.
inline std::vector<std::vector<Eigen::Index>> group_cells(const attkit::DiscreteDgp& d, int k) {
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::RowVectorXd> keys;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
    const Eigen::RowVectorXd key = d.cells.row(c).head(k);
    bool placed = false;
    for (std::size_t g = 0; g < keys.size(); ++g)
      if (keys[g] == key) {
        groups[g].push_back(c);
        placed = true;
        break;
      }
    if (!placed) {
      keys.push_back(key);
      groups.push_back({c});
    }
  }
  return groups;
}

/// Supremum over observed covariate patterns of
///   E[Y0 | A=1, R=1, pattern] / E[Y0 | A=0, R=1, pattern]
/// -- the smallest ratio delta for which the sensitivity bounds are valid.
inline double enum_delta_star(const attkit::DiscreteDgp& d) {
  double best = 0.0;
  for (const auto& group : group_cells(d, d.effective_observed_dim())) {
    double nt = 0.0, dt = 0.0, nu = 0.0, du = 0.0;
    for (Eigen::Index c : group) {
      const double wt = d.prob[c] * d.omega[c] * d.pi[c];
      const double wu = d.prob[c] * d.omega[c] * (1.0 - d.pi[c]);
      nt += wt * d.m0[c];
      dt += wt;
      nu += wu * d.m0[c];
      du += wu;
    }
    best = std::max(best, (nt / dt) / (nu / du));
  }
  return best;
}

/// Population value of the scalar calibration ratio when every cell column is
/// observed in the data and V is the leading `v_cols` columns:
///   E[ E[Y|X, A=0, R=1] | A=1, R=1 ] / E[ E[Y|V, A=0, R=1] | A=1, R=1 ].
inline double enum_calibration_ratio(const attkit::DiscreteDgp& d, int v_cols) {
  double num = 0.0, treated = 0.0;
  for (Eigen::Index c = 0; c < d.cells.rows(); ++c) {
    const double wt = d.prob[c] * d.omega[c] * d.pi[c];
    num += wt * d.m0[c];
    treated += wt;
  }
  num /= treated;

  double den = 0.0;
  for (const auto& group : group_cells(d, v_cols)) {
    double nu = 0.0, du = 0.0, wt_group = 0.0;
    for (Eigen::Index c : group) {
      nu += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]) * d.m0[c];
      du += d.prob[c] * d.omega[c] * (1.0 - d.pi[c]);
      wt_group += d.prob[c] * d.omega[c] * d.pi[c];
    }
    den += wt_group * (nu / du);
  }
  den /= treated;
  return num / den;
}

// ---- sample statistics ------------------------------------------------------

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
