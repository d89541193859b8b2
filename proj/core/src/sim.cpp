#include "attkit/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "attkit/estimators.hpp"
#include "attkit/logistic.hpp"
#include "attkit/parallel.hpp"
#include "attkit/rng.hpp"

namespace attkit {

namespace {

constexpr double kMapLo = 0.05;
constexpr double kMapHi = 0.95;
constexpr std::uint64_t kOracleSeed = 0x6f7261636c65ULL;
constexpr Eigen::Index kOracleDraws = 1000000;

void check_map(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v[i] >= kMapLo - 1e-12 && v[i] <= kMapHi + 1e-12)) {
      std::ostringstream os;
      os << "DGP map " << name << " leaves [" << kMapLo << ", " << kMapHi << "] at cell " << i;
      throw ConfigError(os.str());
    }
}

double lin(const Eigen::VectorXd& coef, const double* x, int dim) {
  double eta = coef[0];
  for (int j = 0; j < dim; ++j) eta += coef[j + 1] * x[j];
  return eta;
}

struct SmoothMaps {
  double omega, pi, mu0, mu1, m1;
};

SmoothMaps eval_smooth(const SmoothDgp& dgp, const double* x) {
  SmoothMaps m;
  m.omega = expit(lin(dgp.omega_coef, x, dgp.dim));
  m.pi = expit(lin(dgp.pi_coef, x, dgp.dim));
  m.mu0 = expit(lin(dgp.mu0_coef, x, dgp.dim));
  m.mu1 = expit(lin(dgp.mu1_coef, x, dgp.dim));
  m.m1 = m.mu1 / m.pi;
  return m;
}

/* Distinct observed covariate patterns of a discrete process with the
   observable-implied nuisance values (enumerated over hidden columns). */
struct ObservedPattern {
  Eigen::RowVectorXd x;
  double omega, pi, mu0, mu1, mu_y;
};

std::vector<ObservedPattern> observable_patterns(const DiscreteDgp& dgp) {
  const int d_obs = dgp.effective_observed_dim();
  const Eigen::Index c = dgp.cells.rows();

  std::vector<ObservedPattern> patterns;
  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < c; ++i) {
    const Eigen::RowVectorXd v = dgp.cells.row(i).head(d_obs);
    bool found = false;
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      if (patterns[p].x == v) {
        members[p].push_back(i);
        found = true;
        break;
      }
    }
    if (!found) {
      patterns.push_back(ObservedPattern{v, 0, 0, 0, 0, 0});
      members.push_back({i});
    }
  }

  for (std::size_t p = 0; p < patterns.size(); ++p) {
    double mass = 0, s_om = 0, s_ompi = 0, s_om1mpi = 0, s_ompim1 = 0, s_om1mpim0 = 0, s_omy = 0;
    for (Eigen::Index i : members[p]) {
      const double pr = dgp.prob[i];
      mass += pr;
      s_om += pr * dgp.omega[i];
      s_ompi += pr * dgp.omega[i] * dgp.pi[i];
      s_om1mpi += pr * dgp.omega[i] * (1.0 - dgp.pi[i]);
      s_ompim1 += pr * dgp.omega[i] * dgp.pi[i] * dgp.m1[i];
      s_om1mpim0 += pr * dgp.omega[i] * (1.0 - dgp.pi[i]) * dgp.m0[i];
      s_omy += pr * dgp.omega[i] * (dgp.pi[i] * dgp.m1[i] + (1.0 - dgp.pi[i]) * dgp.m0[i]);
    }
    patterns[p].omega = s_om / mass;
    patterns[p].pi = s_ompi / s_om;
    patterns[p].mu0 = s_om1mpim0 / s_om1mpi;
    patterns[p].mu1 = s_ompim1 / s_om;
    patterns[p].mu_y = s_omy / s_om;
  }
  return patterns;
}

std::string group_label(double value) {
  std::ostringstream os;
  os << "g" << static_cast<long long>(std::llround(value));
  return os.str();
}

}  // namespace

void DiscreteDgp::validate() const {
  const Eigen::Index c = cells.rows();
  if (c < 1) throw ConfigError("DGP needs at least one covariate cell");
  if (prob.size() != c || pi.size() != c || omega.size() != c || m0.size() != c ||
      m1.size() != c)
    throw ConfigError("DGP vectors must have one entry per cell");
  double total = 0.0;
  for (Eigen::Index i = 0; i < c; ++i) {
    if (prob[i] < 0.0) throw ConfigError("cell probabilities must be >= 0");
    total += prob[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("cell probabilities must sum to 1");
  check_map(pi, "pi");
  check_map(omega, "omega");
  check_map(m0, "m0");
  check_map(m1, "m1");
  const int d = static_cast<int>(cells.cols());
  if (observed_dim == 0 || observed_dim > d || observed_dim < -1)
    throw ConfigError("observed_dim out of range");
  if (group_col >= effective_observed_dim())
    throw ConfigError("group column must be observed");
}

void SmoothDgp::validate() const {
  if (dim < 1) throw ConfigError("smooth DGP needs at least one covariate");
  if (omega_coef.size() != dim + 1 || pi_coef.size() != dim + 1 || mu0_coef.size() != dim + 1 ||
      mu1_coef.size() != dim + 1)
    throw ConfigError("coefficient vectors must have dim + 1 entries");

  // Linear indices reach their extremes at cube corners; the mu1/pi ratio
  // does not, so scan a grid when the dimension allows it.
  const int grid = dim <= 2 ? 101 : 2;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (;;) {
    for (int j = 0; j < dim; ++j)
      x[static_cast<std::size_t>(j)] =
          grid == 2 ? (idx[static_cast<std::size_t>(j)] == 0 ? -1.0 : 1.0)
                    : -1.0 + 2.0 * idx[static_cast<std::size_t>(j)] / (grid - 1.0);
    const SmoothMaps m = eval_smooth(*this, x.data());
    if (!(m.omega >= kMapLo && m.omega <= kMapHi)) throw ConfigError("omega map leaves [0.05, 0.95]");
    if (!(m.pi >= kMapLo && m.pi <= kMapHi)) throw ConfigError("pi map leaves [0.05, 0.95]");
    if (!(m.mu0 >= kMapLo && m.mu0 <= kMapHi)) throw ConfigError("mu0 map leaves [0.05, 0.95]");
    if (!(m.mu1 >= kMapLo && m.mu1 <= kMapHi)) throw ConfigError("mu1 map leaves [0.05, 0.95]");
    if (!(m.m1 > 0.0 && m.m1 < 1.0))
      throw ConfigError("treated outcome mean mu1/pi leaves (0, 1)");
    int j = 0;
    for (; j < dim; ++j) {
      if (++idx[static_cast<std::size_t>(j)] < grid) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j == dim) break;
  }
}

double oracle_att(const Dgp& dgp, double* mc_se) {
  if (mc_se) *mc_se = 0.0;
  if (const auto* d = std::get_if<DiscreteDgp>(&dgp)) {
    d->validate();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < d->cells.rows(); ++i) {
      num += d->prob[i] * d->pi[i] * (d->m1[i] - d->m0[i]);
      den += d->prob[i] * d->pi[i];
    }
    return num / den;
  }
  const auto& s = std::get<SmoothDgp>(dgp);
  s.validate();
  Rng rng(derive_seed(kOracleSeed, "att"));
  std::vector<double> x(static_cast<std::size_t>(s.dim));
  double s_num = 0.0, s_den = 0.0, s_num2 = 0.0, s_den2 = 0.0, s_cross = 0.0;
  for (Eigen::Index i = 0; i < kOracleDraws; ++i) {
    for (int j = 0; j < s.dim; ++j) x[static_cast<std::size_t>(j)] = 2.0 * rng.uniform() - 1.0;
    const SmoothMaps m = eval_smooth(s, x.data());
    const double num = m.pi * (m.m1 - m.mu0);
    s_num += num;
    s_den += m.pi;
    s_num2 += num * num;
    s_den2 += m.pi * m.pi;
    s_cross += num * m.pi;
  }
  const double nd = static_cast<double>(kOracleDraws);
  const double mean_num = s_num / nd, mean_den = s_den / nd;
  const double att = mean_num / mean_den;
  if (mc_se) {
    // delta method for the ratio of means
    const double var_num = s_num2 / nd - mean_num * mean_num;
    const double var_den = s_den2 / nd - mean_den * mean_den;
    const double cov = s_cross / nd - mean_num * mean_den;
    const double var_ratio =
        (var_num - 2.0 * att * cov + att * att * var_den) / (mean_den * mean_den);
    *mc_se = std::sqrt(std::max(0.0, var_ratio) / nd);
  }
  return att;
}

double oracle_otr(const Dgp& dgp, double* mc_se) {
  if (mc_se) *mc_se = 0.0;
  if (const auto* d = std::get_if<DiscreteDgp>(&dgp)) {
    d->validate();
    double total = 0.0;
    for (Eigen::Index i = 0; i < d->cells.rows(); ++i)
      total += d->prob[i] * d->pi[i] * (d->m1[i] - d->m0[i]);
    return total;
  }
  const auto& s = std::get<SmoothDgp>(dgp);
  s.validate();
  Rng rng(derive_seed(kOracleSeed, "otr"));
  std::vector<double> x(static_cast<std::size_t>(s.dim));
  double sum = 0.0, sum2 = 0.0;
  for (Eigen::Index i = 0; i < kOracleDraws; ++i) {
    for (int j = 0; j < s.dim; ++j) x[static_cast<std::size_t>(j)] = 2.0 * rng.uniform() - 1.0;
    const SmoothMaps m = eval_smooth(s, x.data());
    const double v = m.pi * (m.m1 - m.mu0);
    sum += v;
    sum2 += v * v;
  }
  const double nd = static_cast<double>(kOracleDraws);
  const double mean = sum / nd;
  if (mc_se) *mc_se = std::sqrt(std::max(0.0, sum2 / nd - mean * mean) / nd);
  return mean;
}

CausalDataset generate(const Dgp& dgp, Eigen::Index n, std::uint64_t seed,
                       Eigen::VectorXd* y0_out, Eigen::VectorXd* y1_out) {
  if (n < 1) throw ConfigError("sample size must be >= 1");
  Rng rng(derive_seed(seed, "generate"));

  CausalDataset ds;
  ds.r.resize(n);
  ds.a.resize(n);
  ds.y.resize(n);
  if (y0_out) y0_out->resize(n);
  if (y1_out) y1_out->resize(n);
  ds.ids.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ds.ids.push_back(std::to_string(i + 1));
  ds.y_binary = true;

  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (const auto* d = std::get_if<DiscreteDgp>(&dgp)) {
    d->validate();
    const int d_obs = d->effective_observed_dim();
    ds.x.resize(n, d_obs);
    if (d->group_col >= 0) ds.group.reserve(static_cast<std::size_t>(n));

    const Eigen::Index c = d->cells.rows();
    Eigen::VectorXd cum(c);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < c; ++k) {
      acc += d->prob[k];
      cum[k] = acc;
    }

    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = rng.uniform();
      Eigen::Index cell = 0;
      while (cell + 1 < c && u > cum[cell]) ++cell;

      const double a = rng.bernoulli(d->pi[cell]) ? 1.0 : 0.0;
      const double r = rng.bernoulli(d->omega[cell]) ? 1.0 : 0.0;
      const double y0 = rng.bernoulli(d->m0[cell]) ? 1.0 : 0.0;
      const double y1 = rng.bernoulli(d->m1[cell]) ? 1.0 : 0.0;
      const double y = a == 1.0 ? y1 : y0;

      ds.x.row(i) = d->cells.row(cell).head(d_obs);
      ds.r[i] = r;
      ds.a[i] = r == 1.0 ? a : nan;
      ds.y[i] = r == 1.0 ? y : nan;
      if (y0_out) (*y0_out)[i] = y0;
      if (y1_out) (*y1_out)[i] = y1;
      if (d->group_col >= 0) ds.group.push_back(group_label(d->cells(cell, d->group_col)));
    }

    for (int j = 0; j < d_obs; ++j) {
      bool binary = true;
      for (Eigen::Index k = 0; k < c && binary; ++k)
        binary = d->cells(k, j) == 0.0 || d->cells(k, j) == 1.0;
      ds.schema.columns.push_back(
          {"x" + std::to_string(j + 1), binary ? ColumnKind::Binary : ColumnKind::Continuous, {}});
    }
  } else {
    const auto& s = std::get<SmoothDgp>(dgp);
    s.validate();
    ds.x.resize(n, s.dim);
    std::vector<double> x(static_cast<std::size_t>(s.dim));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int j = 0; j < s.dim; ++j) {
        x[static_cast<std::size_t>(j)] = 2.0 * rng.uniform() - 1.0;
        ds.x(i, j) = x[static_cast<std::size_t>(j)];
      }
      const SmoothMaps m = eval_smooth(s, x.data());
      const double a = rng.bernoulli(m.pi) ? 1.0 : 0.0;
      const double r = rng.bernoulli(m.omega) ? 1.0 : 0.0;
      const double y0 = rng.bernoulli(m.mu0) ? 1.0 : 0.0;
      const double y1 = rng.bernoulli(m.m1) ? 1.0 : 0.0;
      const double y = a == 1.0 ? y1 : y0;
      ds.r[i] = r;
      ds.a[i] = r == 1.0 ? a : nan;
      ds.y[i] = r == 1.0 ? y : nan;
      if (y0_out) (*y0_out)[i] = y0;
      if (y1_out) (*y1_out)[i] = y1;
    }
    for (int j = 0; j < s.dim; ++j)
      ds.schema.columns.push_back({"x" + std::to_string(j + 1), ColumnKind::Continuous, {}});
  }
  return ds;
}

NuisanceSurface true_nuisance_surface(const Dgp& dgp, const CausalDataset& ds, double eps,
                                      bool want_mu_y) {
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("clip bound must lie in (0, 0.5)");
  const Eigen::Index n = ds.n();
  NuisanceSurface surface;
  surface.eps = eps;
  surface.folds.K = 1;
  surface.folds.fold_of.assign(static_cast<std::size_t>(n), 0);
  surface.omega.resize(n);
  surface.pi.resize(n);
  surface.mu0.resize(n);
  surface.mu1.resize(n);
  if (want_mu_y) surface.mu_y.resize(n);

  auto clip = [&](double v, Eigen::Index& counter) {
    const double c = std::clamp(v, eps, 1.0 - eps);
    if (c != v) ++counter;
    return c;
  };

  if (const auto* d = std::get_if<DiscreteDgp>(&dgp)) {
    d->validate();
    const int d_obs = d->effective_observed_dim();
    if (ds.x.cols() != d_obs) throw ConfigError("dataset width does not match the DGP");
    const std::vector<ObservedPattern> patterns = observable_patterns(*d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ObservedPattern* hit = nullptr;
      for (const auto& p : patterns) {
        if (p.x == ds.x.row(i)) {
          hit = &p;
          break;
        }
      }
      if (!hit) throw DataError("row does not match any DGP covariate pattern");
      surface.omega[i] = clip(hit->omega, surface.omega_clipped);
      surface.pi[i] = clip(hit->pi, surface.pi_clipped);
      surface.mu0[i] = hit->mu0;
      surface.mu1[i] = hit->mu1;
      if (want_mu_y) surface.mu_y[i] = hit->mu_y;
    }
  } else {
    const auto& s = std::get<SmoothDgp>(dgp);
    s.validate();
    if (ds.x.cols() != s.dim) throw ConfigError("dataset width does not match the DGP");
    std::vector<double> x(static_cast<std::size_t>(s.dim));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int j = 0; j < s.dim; ++j) x[static_cast<std::size_t>(j)] = ds.x(i, j);
      const SmoothMaps m = eval_smooth(s, x.data());
      surface.omega[i] = clip(m.omega, surface.omega_clipped);
      surface.pi[i] = clip(m.pi, surface.pi_clipped);
      surface.mu0[i] = m.mu0;
      surface.mu1[i] = m.mu1;
      if (want_mu_y) surface.mu_y[i] = m.mu1 + (1.0 - m.pi) * m.mu0;
    }
  }
  return surface;
}

namespace {

int dgp_observed_dim(const Dgp& dgp) {
  if (const auto* d = std::get_if<DiscreteDgp>(&dgp)) return d->effective_observed_dim();
  return std::get<SmoothDgp>(dgp).dim;
}

/* Resolves one nuisance's learner under the misspecification flags. */
void apply_misspec(bool broken, const MisspecFlags& flags, int dim, const LearnerSpec& base,
                   LearnerSpec* spec, std::vector<int>* cols) {
  *spec = base;
  cols->clear();
  if (!broken) return;
  if (flags.mechanism == MisspecFlags::Mechanism::ConstantFit || flags.drop_cols.empty()) {
    *spec = LearnerSpec::constant();
    return;
  }
  std::vector<int> keep;
  for (int j = 0; j < dim; ++j)
    if (std::find(flags.drop_cols.begin(), flags.drop_cols.end(), j) == flags.drop_cols.end())
      keep.push_back(j);
  if (keep.empty()) {
    *spec = LearnerSpec::constant();
    return;
  }
  *cols = std::move(keep);
}

}  // namespace

ExperimentReport run_experiment(const Dgp& dgp, const ExperimentConfig& config) {
  if (config.n < 1) throw ConfigError("sample size must be >= 1");
  if (config.reps < 1) throw ConfigError("need at least one replication");
  if (config.folds < 2) throw ConfigError("need at least 2 folds");
  if (!(config.eps > 0.0 && config.eps < 0.5)) throw ConfigError("clip bound must lie in (0, 0.5)");
  config.learners.validate();

  const auto start = std::chrono::steady_clock::now();
  const double oracle = oracle_att(dgp);
  const int dim = dgp_observed_dim(dgp);

  NuisanceLearners learners = NuisanceLearners::uniform(config.learners);
  apply_misspec(config.flags.break_omega, config.flags, dim, config.learners, &learners.omega,
                &learners.omega_cols);
  apply_misspec(config.flags.break_pi, config.flags, dim, config.learners, &learners.pi,
                &learners.pi_cols);
  apply_misspec(config.flags.break_mu0, config.flags, dim, config.learners, &learners.mu0,
                &learners.mu0_cols);
  apply_misspec(config.flags.break_mu1, config.flags, dim, config.learners, &learners.mu1,
                &learners.mu1_cols);

  const std::size_t reps = static_cast<std::size_t>(config.reps);
  std::vector<double> psi(reps), lo(reps), hi(reps);
  std::vector<char> failed(reps, 0);

  parallel_for(reps, config.threads, [&](std::size_t rep) {
    try {
      const CausalDataset ds =
          generate(dgp, config.n, derive_seed(config.seed, "rep-data", rep));
      NuisanceSurface surface;
      if (config.plug_true_nuisances) {
        surface = true_nuisance_surface(dgp, ds, config.eps);
      } else {
        const FoldAssignment folds =
            assign_folds(config.n, config.folds, derive_seed(config.seed, "rep-folds", rep));
        surface = fit_nuisances(ds, learners, folds, config.eps);
      }
      const AttEstimate est = estimate_att(influence_values(ds, surface), config.eps);
      psi[rep] = est.psi_att;
      lo[rep] = est.ci_low;
      hi[rep] = est.ci_high;
    } catch (const Error&) {
      failed[rep] = 1;
    }
  });

  ExperimentReport report;
  report.n = config.n;
  report.reps = config.reps;
  report.oracle = oracle;
  for (char f : failed) report.failures += f;
  if (report.failures * 10 > config.reps) {
    std::ostringstream os;
    os << report.failures << " of " << config.reps << " replications failed (> 10%)";
    throw NumericError(os.str());
  }

  const double good = static_cast<double>(config.reps - report.failures);
  double sum = 0.0, sq = 0.0, covered = 0.0, width = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    if (failed[rep]) continue;
    sum += psi[rep];
    sq += (psi[rep] - oracle) * (psi[rep] - oracle);
    covered += (lo[rep] <= oracle && oracle <= hi[rep]) ? 1.0 : 0.0;
    width += hi[rep] - lo[rep];
  }
  report.mean_estimate = sum / good;
  report.bias = report.mean_estimate - oracle;
  report.rmse = std::sqrt(sq / good);
  report.coverage = covered / good;
  report.mean_ci_width = width / good;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ConvergenceTable convergence_study(const Dgp& dgp, const std::vector<Eigen::Index>& n_grid,
                                   const ExperimentConfig& base) {
  if (n_grid.size() < 2) throw ConfigError("convergence study needs at least 2 sample sizes");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("sample-size grid must increase");

  ConvergenceTable table;
  table.reps = base.reps;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    ExperimentConfig config = base;
    config.n = n_grid[i];
    config.seed = derive_seed(base.seed, "grid", static_cast<std::uint64_t>(n_grid[i]));
    const ExperimentReport report = run_experiment(dgp, config);
    table.points.push_back({report.n, report.rmse, report.bias});
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(table.points.size());
  for (const auto& pt : table.points) {
    const double lx = std::log(static_cast<double>(pt.n));
    const double ly = std::log(pt.rmse);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  table.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return table;
}

DiscreteDgp reference_dgp() {
  DiscreteDgp dgp;
  dgp.cells.resize(2, 1);
  dgp.cells << 0, 1;
  dgp.prob.resize(2);
  dgp.prob << 0.5, 0.5;
  dgp.pi.resize(2);
  dgp.pi << 0.3, 0.7;
  dgp.omega.resize(2);
  dgp.omega << 0.8, 0.8;
  dgp.m0.resize(2);
  dgp.m0 << 0.2, 0.4;
  dgp.m1.resize(2);
  dgp.m1 << 0.3, 0.5;
  return dgp;
}

DiscreteDgp confounded_dgp() {
  DiscreteDgp dgp;
  dgp.cells.resize(2, 1);
  dgp.cells << 0, 1;
  dgp.prob.resize(2);
  dgp.prob << 0.5, 0.5;
  dgp.pi.resize(2);
  dgp.pi << 0.15, 0.85;
  dgp.omega.resize(2);
  dgp.omega << 0.95, 0.50;
  dgp.m0.resize(2);
  dgp.m0 << 0.1, 0.6;
  dgp.m1.resize(2);
  dgp.m1 << 0.2, 0.7;
  return dgp;
}

DiscreteDgp omitted_confounder_dgp() {
  DiscreteDgp dgp;
  dgp.cells.resize(4, 2);  // columns: observed x1, hidden u
  dgp.cells << 0, 0, 0, 1, 1, 0, 1, 1;
  dgp.prob.resize(4);
  dgp.prob << 0.25, 0.25, 0.25, 0.25;
  dgp.pi.resize(4);
  dgp.pi << 0.20, 0.70, 0.45, 0.55;
  dgp.omega.resize(4);  // depends on x1 only, so E[Y | x1, R=1, A=0] = E[Y0 | x1, A=0]
  dgp.omega << 0.9, 0.9, 0.7, 0.7;
  dgp.m0.resize(4);
  dgp.m0 << 0.10, 0.50, 0.30, 0.40;
  dgp.m1.resize(4);
  dgp.m1 << 0.20, 0.60, 0.40, 0.50;
  dgp.observed_dim = 1;
  return dgp;
}

SmoothDgp smooth_dgp() {
  SmoothDgp dgp;
  dgp.dim = 2;
  dgp.omega_coef.resize(3);
  dgp.omega_coef << 1.2, 0.6, -0.4;
  dgp.pi_coef.resize(3);
  dgp.pi_coef << -0.4, 0.8, -0.5;
  dgp.mu0_coef.resize(3);
  dgp.mu0_coef << -1.2, 0.9, 0.6;
  dgp.mu1_coef.resize(3);
  dgp.mu1_coef << -1.3, 0.8, -0.5;
  return dgp;
}

DiscreteDgp grouped_dgp(double effect0, double effect1) {
  DiscreteDgp dgp;
  dgp.cells.resize(4, 3);  // x1, g, x1*g
  dgp.cells << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1;
  dgp.prob.resize(4);
  dgp.prob << 0.25, 0.25, 0.25, 0.25;
  dgp.pi.resize(4);
  dgp.pi << 0.30, 0.50, 0.40, 0.60;
  dgp.omega.resize(4);
  dgp.omega << 0.80, 0.85, 0.70, 0.75;
  dgp.m0.resize(4);
  dgp.m0 << 0.20, 0.35, 0.25, 0.40;
  dgp.m1.resize(4);
  dgp.m1 << 0.20 + effect0, 0.35 + effect0, 0.25 + effect1, 0.40 + effect1;
  dgp.group_col = 1;
  return dgp;
}

}  // namespace attkit
