#include "attkit/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "attkit/learners.hpp"
#include "attkit/rng.hpp"

namespace attkit {

namespace {

constexpr double kZ95 = 1.96;
constexpr double kDenomFloor = 1e-6;
constexpr Eigen::Index kStrataCap = 64;

double sample_variance(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw DataError("need at least 2 rows to estimate a variance");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(n - 1);
}

struct BoundSide {
  double value, ci_low, ci_high;
};

BoundSide one_side(const std::vector<InfluenceRecord>& records, double psi_ay1, double psi_ay0,
                   double psi_a, double c) {
  const double bound = (psi_ay1 - c * psi_ay0) / psi_a;
  std::vector<double> infl(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    infl[i] = (records[i].phi_ay1 - c * records[i].phi_ay0 - records[i].phi_a * bound) / psi_a;
  const double se = std::sqrt(sample_variance(infl) / static_cast<double>(records.size()));
  return {bound, bound - kZ95 * se, bound + kZ95 * se};
}

}  // namespace

BoundEstimate ratio_bounds(const std::vector<InfluenceRecord>& records, double delta,
                           double eps) {
  if (!(delta >= 1.0)) throw ConfigError("sensitivity ratio delta must be >= 1");
  if (records.size() < 2) throw DataError("need at least 2 rows for sensitivity bounds");

  double psi_ay1 = 0.0, psi_a = 0.0, psi_ay0 = 0.0;
  for (const auto& rec : records) {
    psi_ay1 += rec.phi_ay1;
    psi_a += rec.phi_a;
    psi_ay0 += rec.phi_ay0;
  }
  const double n = static_cast<double>(records.size());
  psi_ay1 /= n;
  psi_a /= n;
  psi_ay0 /= n;
  if (!(psi_a > eps && psi_a < 1.0 - eps)) {
    std::ostringstream os;
    os << "treated fraction degenerate: P_n[phi_a] = " << psi_a;
    throw NumericError(os.str());
  }

  BoundEstimate out;
  out.delta = delta;
  const BoundSide low = one_side(records, psi_ay1, psi_ay0, psi_a, delta);
  const BoundSide up = one_side(records, psi_ay1, psi_ay0, psi_a, 1.0 / delta);
  out.lower = low.value;
  out.lower_ci_low = low.ci_low;
  out.lower_ci_high = low.ci_high;
  out.upper = up.value;
  out.upper_ci_low = up.ci_low;
  out.upper_ci_high = up.ci_high;
  return out;
}

SensitivityCurve sensitivity_curve(const std::vector<InfluenceRecord>& records,
                                   const std::vector<double>& delta_grid, double eps) {
  if (delta_grid.empty()) throw ConfigError("delta grid must be nonempty");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] >= 1.0)) throw ConfigError("delta grid values must be >= 1");
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
      throw ConfigError("delta grid must be strictly increasing");
  }

  SensitivityCurve curve;
  curve.points.reserve(delta_grid.size());
  for (double delta : delta_grid) curve.points.push_back(ratio_bounds(records, delta, eps));

  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const BoundEstimate& pt = curve.points[i];
    const double tol = 1e-12 * (1.0 + std::abs(pt.lower) + std::abs(pt.upper));
    if (pt.lower > pt.upper + tol)
      throw NumericError("sensitivity bounds crossed; check the estimated components");
    if (i > 0) {
      if (pt.lower > curve.points[i - 1].lower + tol || pt.upper < curve.points[i - 1].upper - tol)
        throw NumericError(
            "sensitivity bounds are not monotone in delta; P_n[phi_ay0] may be negative");
    }
  }
  return curve;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  grid.reserve(101);
  for (int i = 0; i <= 100; ++i) grid.push_back(1.0 + i / 100.0);
  return grid;
}

void export_curve_csv(const SensitivityCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.precision(17);
  out << "delta,lower,lower_ci_lo,lower_ci_hi,upper,upper_ci_lo,upper_ci_hi\n";
  for (const auto& pt : curve.points)
    out << pt.delta << ',' << pt.lower << ',' << pt.lower_ci_low << ',' << pt.lower_ci_high << ','
        << pt.upper << ',' << pt.upper_ci_low << ',' << pt.upper_ci_high << '\n';
  if (!out) throw DataError("failed while writing " + path);
}

DeltaCalibration calibrate_delta(const CausalDataset& ds, const NuisanceSurface& surface,
                                 const std::vector<std::string>& subset,
                                 const LearnerSpec& learner, std::uint64_t seed,
                                 Warnings* warnings) {
  const Eigen::Index n = ds.n();
  if (surface.omega.size() != n || surface.mu0.size() != n)
    throw ConfigError("nuisance surface does not match the dataset");
  if (surface.folds.fold_of.size() != static_cast<std::size_t>(n))
    throw ConfigError("fold assignment does not match the dataset");
  if (subset.empty()) throw ConfigError("calibration subset must name at least one covariate");
  learner.validate();

  std::vector<int> cols;
  cols.reserve(subset.size());
  for (const auto& name : subset) {
    const int j = ds.column_index(name);
    if (j < 0) throw ConfigError("unknown covariate in calibration subset: " + name);
    cols.push_back(j);
  }

  std::vector<Eigen::Index> treated, untreated;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ds.r[i] != 1.0) continue;
    if (ds.a[i] == 1.0)
      treated.push_back(i);
    else
      untreated.push_back(i);
  }
  if (treated.empty()) throw DataError("no treated observed rows; calibration target is empty");
  if (untreated.empty()) throw DataError("no untreated observed rows to regress on");

  Eigen::MatrixXd v(n, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) v(i, static_cast<Eigen::Index>(j)) = ds.x(i, cols[j]);

  const TargetKind target = ds.y_binary ? TargetKind::Probability : TargetKind::Real;
  const int folds = std::max(1, surface.folds.K);
  Eigen::VectorXd fitted(n);
  fitted.setConstant(std::numeric_limits<double>::quiet_NaN());

  for (int k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> train;
    for (Eigen::Index i : untreated)
      if (folds == 1 || surface.folds.fold_of[static_cast<std::size_t>(i)] != k)
        train.push_back(i);
    if (train.empty()) {
      std::ostringstream os;
      os << "fold " << k << ": no untreated observed training rows; use fewer folds";
      throw DataError(os.str());
    }
    Eigen::MatrixXd xt(static_cast<Eigen::Index>(train.size()), v.cols());
    Eigen::VectorXd yt(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      xt.row(static_cast<Eigen::Index>(i)) = v.row(train[i]);
      yt[static_cast<Eigen::Index>(i)] = ds.y[train[i]];
    }
    const ModelPtr model =
        fit_learner(learner, xt, yt, target, derive_seed(seed, "calibrate", static_cast<std::uint64_t>(k)), warnings);
    for (Eigen::Index i : treated) {
      if (folds > 1 && surface.folds.fold_of[static_cast<std::size_t>(i)] != k) continue;
      double pred = model->predict_row(v.row(i));
      if (ds.y_binary) pred = std::clamp(pred, 0.0, 1.0);
      fitted[i] = pred;
    }
  }

  double num = 0.0, den = 0.0;
  for (Eigen::Index i : treated) {
    num += surface.mu0[i];
    den += fitted[i];
  }
  num /= static_cast<double>(treated.size());
  den /= static_cast<double>(treated.size());
  if (!(den >= kDenomFloor)) {
    std::ostringstream os;
    os << "ratio undefined on subset: mean regressed outcome " << den << " below " << kDenomFloor;
    throw NumericError(os.str());
  }

  DeltaCalibration cal;
  cal.subset = subset;
  cal.subset_size = static_cast<Eigen::Index>(subset.size());
  cal.delta_hat = num / den;
  cal.delta_max = std::numeric_limits<double>::quiet_NaN();
  cal.strata = 0;

  // Stratum-wise supremum view, only when V is coarse enough to enumerate.
  std::vector<Eigen::RowVectorXd> levels;
  std::vector<Eigen::Index> level_of(static_cast<std::size_t>(n), -1);
  bool coarse = true;
  for (Eigen::Index i = 0; i < n && coarse; ++i) {
    Eigen::Index hit = -1;
    for (std::size_t s = 0; s < levels.size(); ++s)
      if (levels[s] == v.row(i)) {
        hit = static_cast<Eigen::Index>(s);
        break;
      }
    if (hit < 0) {
      if (static_cast<Eigen::Index>(levels.size()) >= kStrataCap) {
        coarse = false;
        break;
      }
      levels.push_back(v.row(i));
      hit = static_cast<Eigen::Index>(levels.size()) - 1;
    }
    level_of[static_cast<std::size_t>(i)] = hit;
  }

  if (coarse) {
    const std::size_t s_count = levels.size();
    std::vector<double> num_s(s_count, 0.0), den_s(s_count, 0.0);
    std::vector<Eigen::Index> n_num(s_count, 0), n_den(s_count, 0);
    for (Eigen::Index i : treated) {
      const auto s = static_cast<std::size_t>(level_of[static_cast<std::size_t>(i)]);
      num_s[s] += surface.mu0[i];
      ++n_num[s];
    }
    for (Eigen::Index i : untreated) {
      const auto s = static_cast<std::size_t>(level_of[static_cast<std::size_t>(i)]);
      den_s[s] += ds.y[i];
      ++n_den[s];
    }
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index used = 0;
    for (std::size_t s = 0; s < s_count; ++s) {
      if (n_num[s] == 0 || n_den[s] == 0) continue;
      const double d = den_s[s] / static_cast<double>(n_den[s]);
      if (d < kDenomFloor) continue;
      best = std::max(best, (num_s[s] / static_cast<double>(n_num[s])) / d);
      ++used;
    }
    if (used > 0) {
      cal.delta_max = best;
      cal.strata = used;
    }
  }
  return cal;
}

OtrBounds otr_additive_bounds(const CausalDataset& ds, const NuisanceSurface& surface,
                              double delta_add, double eps) {
  if (!(delta_add >= 0.0)) throw ConfigError("additive delta must be >= 0");
  const std::vector<OtrRecord> otr = otr_influence_values(ds, surface);
  const std::vector<InfluenceRecord> att = influence_values(ds, surface);
  const std::size_t n = otr.size();
  if (n < 2) throw DataError("need at least 2 rows for sensitivity bounds");

  double psi_otr = 0.0, psi_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    psi_otr += otr[i].phi_y - otr[i].phi_y0;
    psi_a += att[i].phi_a;
  }
  psi_otr /= static_cast<double>(n);
  psi_a /= static_cast<double>(n);

  OtrBounds out;
  out.delta_add = delta_add;
  out.psi_otr = psi_otr;
  out.lower = psi_otr - delta_add * psi_a;
  out.upper = psi_otr + delta_add * psi_a;

  std::vector<double> infl(n);
  for (std::size_t i = 0; i < n; ++i)
    infl[i] = otr[i].phi_y - otr[i].phi_y0 - delta_add * att[i].phi_a;
  double se = std::sqrt(sample_variance(infl) / static_cast<double>(n));
  out.lower_ci_low = out.lower - kZ95 * se;
  out.lower_ci_high = out.lower + kZ95 * se;

  for (std::size_t i = 0; i < n; ++i)
    infl[i] = otr[i].phi_y - otr[i].phi_y0 + delta_add * att[i].phi_a;
  se = std::sqrt(sample_variance(infl) / static_cast<double>(n));
  out.upper_ci_low = out.upper - kZ95 * se;
  out.upper_ci_high = out.upper + kZ95 * se;
  (void)eps;
  return out;
}

}  // namespace attkit
