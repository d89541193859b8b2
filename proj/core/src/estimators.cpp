#include "attkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace attkit {

namespace {

constexpr double kZ95 = 1.96;

double sample_variance(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw DataError("variance needs at least 2 observations");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(n - 1);
}

}  // namespace

std::vector<InfluenceRecord> influence_values(const CausalDataset& ds,
                                              const NuisanceSurface& surface) {
  const Eigen::Index n = ds.n();
  if (surface.omega.size() != n || surface.pi.size() != n || surface.mu0.size() != n ||
      surface.mu1.size() != n)
    throw ConfigError("nuisance surface does not match dataset size");

  std::vector<InfluenceRecord> records(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omega = surface.omega[i];
    const double pi = surface.pi[i];
    const double mu0 = surface.mu0[i];
    const double mu1 = surface.mu1[i];
    InfluenceRecord rec;
    if (ds.r[i] == 1.0) {
      const double a = ds.a[i];
      const double y = ds.y[i];
      const double w = 1.0 / omega;
      rec.phi_ay1 = w * (a * y - mu1) + mu1;
      rec.phi_a = w * (a - pi) + pi;
      rec.phi_ay0 =
          w * (a - pi) * mu0 + w * ((1.0 - a) * pi / (1.0 - pi)) * (y - mu0) + pi * mu0;
    } else {
      rec.phi_ay1 = mu1;
      rec.phi_a = pi;
      rec.phi_ay0 = pi * mu0;
    }
    if (!std::isfinite(rec.phi_ay1) || !std::isfinite(rec.phi_a) || !std::isfinite(rec.phi_ay0)) {
      std::ostringstream os;
      os << "non-finite influence value at row " << i;
      throw NumericError(os.str());
    }
    records[static_cast<std::size_t>(i)] = rec;
  }
  return records;
}

std::vector<OtrRecord> otr_influence_values(const CausalDataset& ds,
                                            const NuisanceSurface& surface) {
  if (!surface.has_mu_y())
    throw ConfigError("treatment-removal analysis needs the mu_y nuisance; refit with it enabled");
  const Eigen::Index n = ds.n();
  if (surface.mu_y.size() != n) throw ConfigError("nuisance surface does not match dataset size");

  std::vector<OtrRecord> records(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double omega = surface.omega[i];
    const double pi = surface.pi[i];
    const double mu0 = surface.mu0[i];
    const double mu_y = surface.mu_y[i];
    OtrRecord rec;
    if (ds.r[i] == 1.0) {
      const double a = ds.a[i];
      const double y = ds.y[i];
      const double w = 1.0 / omega;
      rec.phi_y = w * (y - mu_y) + mu_y;
      rec.phi_y0 = w * ((1.0 - a) * pi / (1.0 - pi)) * (y - mu0) + mu0;
    } else {
      rec.phi_y = mu_y;
      rec.phi_y0 = mu0;
    }
    if (!std::isfinite(rec.phi_y) || !std::isfinite(rec.phi_y0)) {
      std::ostringstream os;
      os << "non-finite influence value at row " << i;
      throw NumericError(os.str());
    }
    records[static_cast<std::size_t>(i)] = rec;
  }
  return records;
}

AttEstimate estimate_att(const std::vector<InfluenceRecord>& records, double eps) {
  const std::size_t n = records.size();
  if (n < 2) throw DataError("ATT estimation needs at least 2 observations");
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("clip bound must lie in (0, 0.5)");

  AttEstimate est;
  est.n = static_cast<Eigen::Index>(n);
  for (const auto& rec : records) {
    est.psi_ay1 += rec.phi_ay1;
    est.psi_ay0 += rec.phi_ay0;
    est.psi_a += rec.phi_a;
  }
  est.psi_ay1 /= static_cast<double>(n);
  est.psi_ay0 /= static_cast<double>(n);
  est.psi_a /= static_cast<double>(n);

  if (!(est.psi_a > eps && est.psi_a < 1.0 - eps)) {
    std::ostringstream os;
    os << "treated fraction degenerate: P_n[phi_a] = " << est.psi_a << " outside (" << eps << ", "
       << 1.0 - eps << ")";
    throw NumericError(os.str());
  }

  est.psi_att = (est.psi_ay1 - est.psi_ay0) / est.psi_a;

  std::vector<double> att_if(n);
  for (std::size_t i = 0; i < n; ++i)
    att_if[i] =
        (records[i].phi_ay1 - records[i].phi_ay0 - records[i].phi_a * est.psi_att) / est.psi_a;
  est.sigma2 = sample_variance(att_if);
  const double half = kZ95 * std::sqrt(est.sigma2 / static_cast<double>(n));
  est.ci_low = est.psi_att - half;
  est.ci_high = est.psi_att + half;

  if (std::abs(est.psi_ay1) > 1e-12) {
    est.relative_reduction = 1.0 - est.psi_ay0 / est.psi_ay1;
    std::vector<double> rr_if(n);
    for (std::size_t i = 0; i < n; ++i)
      rr_if[i] = (est.psi_ay0 / (est.psi_ay1 * est.psi_ay1)) * (records[i].phi_ay1 - est.psi_ay1) -
                 (records[i].phi_ay0 - est.psi_ay0) / est.psi_ay1;
    const double rr_half = kZ95 * std::sqrt(sample_variance(rr_if) / static_cast<double>(n));
    est.rr_ci_low = est.relative_reduction - rr_half;
    est.rr_ci_high = est.relative_reduction + rr_half;
  } else {
    est.relative_reduction = std::numeric_limits<double>::quiet_NaN();
    est.rr_ci_low = std::numeric_limits<double>::quiet_NaN();
    est.rr_ci_high = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

OtrEstimate estimate_otr(const CausalDataset& ds, const NuisanceSurface& surface) {
  const std::vector<OtrRecord> records = otr_influence_values(ds, surface);
  const std::size_t n = records.size();
  if (n < 2) throw DataError("removal-effect estimation needs at least 2 observations");

  OtrEstimate est;
  est.n = static_cast<Eigen::Index>(n);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    est.psi_y += records[i].phi_y;
    est.psi_y0 += records[i].phi_y0;
    diff[i] = records[i].phi_y - records[i].phi_y0;
  }
  est.psi_y /= static_cast<double>(n);
  est.psi_y0 /= static_cast<double>(n);
  est.psi_otr = est.psi_y - est.psi_y0;
  est.sigma2 = sample_variance(diff);
  const double half = kZ95 * std::sqrt(est.sigma2 / static_cast<double>(n));
  est.ci_low = est.psi_otr - half;
  est.ci_high = est.psi_otr + half;
  return est;
}

std::vector<GroupAtt> subgroup_estimates(const std::vector<InfluenceRecord>& records,
                                         const SubgroupPartition& partition, double eps,
                                         Eigen::Index min_count, Warnings* warnings) {
  if (partition.assignment.size() != records.size())
    throw ConfigError("partition does not match influence records");
  const int k = static_cast<int>(partition.labels.size());

  std::vector<std::vector<InfluenceRecord>> grouped(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int g = partition.assignment[i];
    if (g >= 0) grouped[static_cast<std::size_t>(g)].push_back(records[i]);
  }

  std::vector<GroupAtt> out;
  for (int g = 0; g < k; ++g) {
    const auto& recs = grouped[static_cast<std::size_t>(g)];
    if (static_cast<Eigen::Index>(recs.size()) < min_count) {
      if (warnings) {
        std::ostringstream os;
        os << "group '" << partition.labels[static_cast<std::size_t>(g)] << "' dropped: "
           << recs.size() << " observation(s) < floor " << min_count;
        warnings->add(os.str());
      }
      continue;
    }
    GroupAtt ga;
    ga.label = partition.labels[static_cast<std::size_t>(g)];
    ga.group = g;
    ga.count = static_cast<Eigen::Index>(recs.size());
    ga.estimate = estimate_att(recs, eps);
    out.push_back(std::move(ga));
  }
  if (out.empty()) throw DataError("every group fell below the size floor");
  return out;
}

HomogeneityTest homogeneity_test(const std::vector<GroupAtt>& groups) {
  const int k = static_cast<int>(groups.size());
  if (k < 2) throw ConfigError("homogeneity test needs at least 2 groups");

  double n_total = 0.0;
  for (const auto& g : groups) n_total += static_cast<double>(g.estimate.n);

  Eigen::VectorXd psi(k);
  Eigen::VectorXd sigma_diag(k);
  for (int g = 0; g < k; ++g) {
    const auto& est = groups[static_cast<std::size_t>(g)].estimate;
    psi[g] = est.psi_att;
    sigma_diag[g] = n_total * est.sigma2 / static_cast<double>(est.n);
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k - 1, k);
  for (int i = 0; i < k - 1; ++i) {
    c(i, i) = 1.0;
    c(i, i + 1) = -1.0;
  }

  const Eigen::VectorXd contrast = c * psi;
  const Eigen::MatrixXd m = c * sigma_diag.asDiagonal() * c.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible())
    throw NumericError(
        "group contrast covariance is singular (a group variance is 0); consider merging groups");

  HomogeneityTest test;
  test.df = k - 1;
  test.t_n = std::max(0.0, n_total * contrast.dot(lu.solve(contrast)));
  test.p_value = chi2_sf(test.t_n, test.df);
  test.group_estimates = groups;
  return test;
}

OverlapDiagnostic overlap_diagnostic(const NuisanceSurface& surface, double threshold) {
  constexpr int kBins = 50;
  OverlapDiagnostic diag;
  diag.threshold = threshold;
  diag.n = surface.pi.size();
  diag.edges.resize(kBins + 1);
  for (int b = 0; b <= kBins; ++b) diag.edges[static_cast<std::size_t>(b)] = static_cast<double>(b) / kBins;
  diag.counts.assign(kBins, 0);
  for (Eigen::Index i = 0; i < surface.pi.size(); ++i) {
    const double p = surface.pi[i];
    const int bin = std::min(kBins - 1, static_cast<int>(std::floor(p * kBins)));
    ++diag.counts[static_cast<std::size_t>(std::max(0, bin))];
    if (p < threshold) ++diag.low_count;
  }
  diag.low_fraction =
      diag.n > 0 ? static_cast<double>(diag.low_count) / static_cast<double>(diag.n) : 0.0;
  return diag;
}

}  // namespace attkit
