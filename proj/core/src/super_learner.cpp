#include "attkit/super_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "attkit/crossfit.hpp"
#include "attkit/rng.hpp"

namespace attkit {

namespace {

/* Euclidean projection onto the probability simplex. */
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index b = v.size();
  std::vector<double> u(v.data(), v.data() + b);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (Eigen::Index j = 0; j < b; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - candidate > 0.0) {
      rho = static_cast<int>(j + 1);
      theta = candidate;
    }
  }
  Eigen::VectorXd w(b);
  for (Eigen::Index j = 0; j < b; ++j) w[j] = std::max(v[j] - theta, 0.0);
  (void)rho;
  return w;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Eigen::VectorXd select_entries(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

}  // namespace

SuperLearnerModel::SuperLearnerModel(std::vector<ModelPtr> bases, Eigen::VectorXd weights,
                                     TargetKind target, double cv_error,
                                     Eigen::VectorXd base_cv_errors)
    : bases_(std::move(bases)),
      weights_(std::move(weights)),
      target_(target),
      cv_error_(cv_error),
      base_cv_errors_(std::move(base_cv_errors)) {}

double SuperLearnerModel::predict_row(const Eigen::RowVectorXd& x) const {
  double out = 0.0;
  for (std::size_t b = 0; b < bases_.size(); ++b)
    out += weights_[static_cast<Eigen::Index>(b)] * bases_[b]->predict_row(x);
  return out;
}

double stacking_cv_error(const Eigen::MatrixXd& cv_predictions, const Eigen::VectorXd& t,
                         const Eigen::VectorXd& weights) {
  const Eigen::VectorXd resid = cv_predictions * weights - t;
  return resid.squaredNorm() / static_cast<double>(t.size());
}

std::shared_ptr<const SuperLearnerModel> fit_super_learner(const Eigen::MatrixXd& x,
                                                           const Eigen::VectorXd& t,
                                                           const LearnerSpec& spec,
                                                           TargetKind target, std::uint64_t seed,
                                                           Warnings* warnings) {
  spec.validate();
  const Eigen::Index n = x.rows();
  const int v_folds = spec.stacking_folds;
  if (n < static_cast<Eigen::Index>(2 * v_folds))
    throw DataError("super learner needs at least 2 rows per stacking fold");

  const std::size_t b_all = spec.bases.size();
  std::vector<std::size_t> survivors;

  // Fast path: a single base gets weight 1 with no stacking round.
  if (b_all == 1) {
    ModelPtr base = fit_learner(spec.bases[0], x, t, target, derive_seed(seed, "sl-final", 0),
                                warnings);
    Eigen::VectorXd w(1);
    w[0] = 1.0;
    return std::make_shared<SuperLearnerModel>(std::vector<ModelPtr>{std::move(base)},
                                               std::move(w), target);
  }

  const FoldAssignment folds =
      assign_folds(n, v_folds, derive_seed(seed, "sl-folds"));
  std::vector<std::vector<Eigen::Index>> in_fold(static_cast<std::size_t>(v_folds));
  std::vector<std::vector<Eigen::Index>> out_fold(static_cast<std::size_t>(v_folds));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int f = folds.fold_of[static_cast<std::size_t>(i)];
    for (int k = 0; k < v_folds; ++k)
      (k == f ? in_fold : out_fold)[static_cast<std::size_t>(k)].push_back(i);
  }

  Eigen::MatrixXd cv_pred(n, static_cast<Eigen::Index>(b_all));
  for (std::size_t b = 0; b < b_all; ++b) {
    bool ok = true;
    std::string reason;
    for (int k = 0; k < v_folds && ok; ++k) {
      const auto& train = out_fold[static_cast<std::size_t>(k)];
      const auto& test = in_fold[static_cast<std::size_t>(k)];
      try {
        ModelPtr model = fit_learner(
            spec.bases[b], select_rows(x, train), select_entries(t, train), target,
            derive_seed(seed, "sl-cv", static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(k)),
            nullptr);
        for (Eigen::Index i : test) cv_pred(i, static_cast<Eigen::Index>(b)) = model->predict_row(x.row(i));
      } catch (const Error& e) {
        ok = false;
        reason = e.what();
      }
    }
    if (ok) {
      survivors.push_back(b);
    } else if (warnings) {
      std::ostringstream os;
      os << "super learner dropped base " << b << " (" << describe_learners(spec.bases[b])
         << "): " << reason;
      warnings->add(os.str());
    }
  }
  if (survivors.empty()) throw NumericError("every super learner base failed");

  const Eigen::Index b_live = static_cast<Eigen::Index>(survivors.size());
  Eigen::MatrixXd p(n, b_live);
  for (Eigen::Index b = 0; b < b_live; ++b)
    p.col(b) = cv_pred.col(static_cast<Eigen::Index>(survivors[static_cast<std::size_t>(b)]));

  // Projected gradient on the simplex for the CV squared error, then compare
  // against every vertex so the stack never loses to a single base.
  const Eigen::MatrixXd gram = p.transpose() * p / static_cast<double>(n);
  const Eigen::VectorXd lin = p.transpose() * t / static_cast<double>(n);
  const double lipschitz = 2.0 * gram.norm() + 1e-12;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(b_live, 1.0 / static_cast<double>(b_live));
  for (int iter = 0; iter < 2000; ++iter) {
    const Eigen::VectorXd grad = 2.0 * (gram * w - lin);
    const Eigen::VectorXd next = project_simplex(w - grad / lipschitz);
    const double change = (next - w).cwiseAbs().maxCoeff();
    w = next;
    if (change < 1e-14) break;
  }
  double best_err = stacking_cv_error(p, t, w);
  Eigen::VectorXd vertex_errs(b_live);
  for (Eigen::Index b = 0; b < b_live; ++b) {
    Eigen::VectorXd vertex = Eigen::VectorXd::Zero(b_live);
    vertex[b] = 1.0;
    vertex_errs[b] = stacking_cv_error(p, t, vertex);
    if (vertex_errs[b] < best_err - 1e-12) {
      best_err = vertex_errs[b];
      w = vertex;
    }
  }

  std::vector<ModelPtr> fitted;
  fitted.reserve(survivors.size());
  for (std::size_t idx = 0; idx < survivors.size(); ++idx) {
    const std::size_t b = survivors[idx];
    fitted.push_back(fit_learner(spec.bases[b], x, t, target,
                                 derive_seed(seed, "sl-final", static_cast<std::uint64_t>(b)),
                                 warnings));
  }
  return std::make_shared<SuperLearnerModel>(std::move(fitted), std::move(w), target, best_err,
                                             std::move(vertex_errs));
}

}  // namespace attkit
