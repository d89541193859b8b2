#include "attkit/crossfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "attkit/parallel.hpp"
#include "attkit/rng.hpp"

namespace attkit {

FoldAssignment assign_folds(Eigen::Index n, int K, std::uint64_t seed) {
  if (K < 2) throw ConfigError("need at least 2 folds");
  if (static_cast<Eigen::Index>(K) > n) throw ConfigError("more folds than observations");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(derive_seed(seed, "fold-shuffle"));
  rng.shuffle(order);

  FoldAssignment folds;
  folds.K = K;
  folds.seed = seed;
  folds.fold_of.assign(static_cast<std::size_t>(n), -1);
  const Eigen::Index base = n / K;
  const Eigen::Index extra = n % K;
  std::size_t pos = 0;
  for (int f = 0; f < K; ++f) {
    const Eigen::Index size = base + (static_cast<Eigen::Index>(f) < extra ? 1 : 0);
    for (Eigen::Index s = 0; s < size; ++s)
      folds.fold_of[static_cast<std::size_t>(order[pos++])] = f;
  }
  return folds;
}

namespace {

Eigen::MatrixXd gather_x(const CausalDataset& ds, const std::vector<Eigen::Index>& rows,
                         const std::vector<int>& cols) {
  const Eigen::Index d =
      cols.empty() ? ds.x.cols() : static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (cols.empty()) {
      out.row(static_cast<Eigen::Index>(i)) = ds.x.row(rows[i]);
    } else {
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.x(rows[i], cols[j]);
    }
  }
  return out;
}

void check_cols(const std::vector<int>& cols, Eigen::Index d, const char* name) {
  for (int c : cols)
    if (c < 0 || static_cast<Eigen::Index>(c) >= d)
      throw ConfigError(std::string("column restriction for ") + name + " is out of range");
}

struct FoldOutput {
  Eigen::Index omega_clipped = 0;
  Eigen::Index pi_clipped = 0;
  Warnings warnings;
};

}  // namespace

NuisanceSurface fit_nuisances(const CausalDataset& ds, const LearnerSpec& spec,
                              const FoldAssignment& folds, double eps, bool want_mu_y,
                              unsigned n_threads, Warnings* warnings) {
  return fit_nuisances(ds, NuisanceLearners::uniform(spec), folds, eps, want_mu_y, n_threads,
                       warnings);
}

NuisanceSurface fit_nuisances(const CausalDataset& ds, const NuisanceLearners& learners,
                              const FoldAssignment& folds, double eps, bool want_mu_y,
                              unsigned n_threads, Warnings* warnings) {
  ds.validate();
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("clip bound must lie in (0, 0.5)");
  const Eigen::Index n = ds.n();
  if (folds.n() != n) throw ConfigError("fold assignment does not match dataset size");
  const int K = folds.K;
  check_cols(learners.omega_cols, ds.x.cols(), "omega");
  check_cols(learners.pi_cols, ds.x.cols(), "pi");
  check_cols(learners.mu0_cols, ds.x.cols(), "mu0");
  check_cols(learners.mu1_cols, ds.x.cols(), "mu1");
  check_cols(learners.mu_y_cols, ds.x.cols(), "mu_y");

  NuisanceSurface surface;
  surface.eps = eps;
  surface.folds = folds;
  surface.omega.resize(n);
  surface.pi.resize(n);
  surface.mu0.resize(n);
  surface.mu1.resize(n);
  if (want_mu_y) surface.mu_y.resize(n);

  std::vector<std::vector<Eigen::Index>> test_rows(static_cast<std::size_t>(K));
  for (Eigen::Index i = 0; i < n; ++i)
    test_rows[static_cast<std::size_t>(folds.fold_of[static_cast<std::size_t>(i)])].push_back(i);

  const TargetKind y_kind = ds.y_binary ? TargetKind::Probability : TargetKind::Real;
  std::vector<FoldOutput> outputs(static_cast<std::size_t>(K));

  auto run_fold = [&](std::size_t fk) {
    const int fold = static_cast<int>(fk);
    FoldOutput& out = outputs[fk];

    std::vector<Eigen::Index> train_all, train_r1, train_r1a0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (folds.fold_of[static_cast<std::size_t>(i)] == fold) continue;
      train_all.push_back(i);
      if (ds.r[i] == 1.0) {
        train_r1.push_back(i);
        if (ds.a[i] == 0.0) train_r1a0.push_back(i);
      }
    }
    auto require = [&](const std::vector<Eigen::Index>& rows, const char* what) {
      if (rows.empty()) {
        std::ostringstream os;
        os << "fold " << fold << ": no training rows " << what << "; use fewer folds";
        throw DataError(os.str());
      }
    };
    require(train_all, "at all");
    require(train_r1, "with followup = 1");
    require(train_r1a0, "with followup = 1 and treatment = 0");

    auto target = [&](const std::vector<Eigen::Index>& rows, auto&& f) {
      Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) t[static_cast<Eigen::Index>(i)] = f(rows[i]);
      return t;
    };

    const Eigen::MatrixXd test_omega = gather_x(ds, test_rows[fk], learners.omega_cols);
    const Eigen::MatrixXd test_pi = gather_x(ds, test_rows[fk], learners.pi_cols);
    const Eigen::MatrixXd test_mu0 = gather_x(ds, test_rows[fk], learners.mu0_cols);
    const Eigen::MatrixXd test_mu1 = gather_x(ds, test_rows[fk], learners.mu1_cols);

    auto fit_one = [&](const LearnerSpec& spec, const std::vector<int>& cols,
                       const std::vector<Eigen::Index>& rows, const Eigen::VectorXd& t,
                       TargetKind kind, const char* name) {
      return fit_learner(spec, gather_x(ds, rows, cols), t, kind,
                         derive_seed(folds.seed, name, static_cast<std::uint64_t>(fold)),
                         &out.warnings);
    };

    ModelPtr m_omega = fit_one(learners.omega, learners.omega_cols, train_all,
                               target(train_all, [&](Eigen::Index i) { return ds.r[i]; }),
                               TargetKind::Probability, "omega");
    ModelPtr m_pi = fit_one(learners.pi, learners.pi_cols, train_r1,
                            target(train_r1, [&](Eigen::Index i) { return ds.a[i]; }),
                            TargetKind::Probability, "pi");
    ModelPtr m_mu0 = fit_one(learners.mu0, learners.mu0_cols, train_r1a0,
                             target(train_r1a0, [&](Eigen::Index i) { return ds.y[i]; }), y_kind,
                             "mu0");
    ModelPtr m_mu1 = fit_one(learners.mu1, learners.mu1_cols, train_r1,
                             target(train_r1, [&](Eigen::Index i) { return ds.a[i] * ds.y[i]; }),
                             y_kind, "mu1");

    Eigen::Index clipped = 0;
    const Eigen::VectorXd p_omega = predict_clipped(*m_omega, test_omega, eps, &clipped);
    out.omega_clipped = clipped;
    const Eigen::VectorXd p_pi = predict_clipped(*m_pi, test_pi, eps, &clipped);
    out.pi_clipped = clipped;
    Eigen::VectorXd p_mu0 = m_mu0->predict(test_mu0);
    Eigen::VectorXd p_mu1 = m_mu1->predict(test_mu1);
    if (ds.y_binary) {
      p_mu0 = p_mu0.cwiseMax(0.0).cwiseMin(1.0);
      p_mu1 = p_mu1.cwiseMax(0.0).cwiseMin(1.0);
    }

    const auto& rows = test_rows[fk];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Eigen::Index t = static_cast<Eigen::Index>(i);
      surface.omega[rows[i]] = p_omega[t];
      surface.pi[rows[i]] = p_pi[t];
      surface.mu0[rows[i]] = p_mu0[t];
      surface.mu1[rows[i]] = p_mu1[t];
    }

    if (want_mu_y) {
      ModelPtr m_mu_y = fit_one(learners.mu_y, learners.mu_y_cols, train_r1,
                                target(train_r1, [&](Eigen::Index i) { return ds.y[i]; }), y_kind,
                                "mu_y");
      const Eigen::MatrixXd test_mu_y = gather_x(ds, rows, learners.mu_y_cols);
      Eigen::VectorXd p_mu_y = m_mu_y->predict(test_mu_y);
      if (ds.y_binary) p_mu_y = p_mu_y.cwiseMax(0.0).cwiseMin(1.0);
      for (std::size_t i = 0; i < rows.size(); ++i)
        surface.mu_y[rows[i]] = p_mu_y[static_cast<Eigen::Index>(i)];
    }
  };

  parallel_for(static_cast<std::size_t>(K), n_threads, run_fold);

  for (const auto& out : outputs) {
    surface.omega_clipped += out.omega_clipped;
    surface.pi_clipped += out.pi_clipped;
    if (warnings)
      for (const auto& msg : out.warnings.messages) warnings->add(msg);
  }
  return surface;
}

void export_surface_csv(const NuisanceSurface& surface, const std::vector<std::string>& ids,
                        const std::string& path) {
  const Eigen::Index n = surface.omega.size();
  if (static_cast<Eigen::Index>(ids.size()) != n)
    throw ConfigError("id list does not match surface size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "id,fold,omega,pi,mu0,mu1";
  if (surface.has_mu_y()) out << ",mu_y";
  out << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < n; ++i) {
    out << ids[static_cast<std::size_t>(i)] << ','
        << surface.folds.fold_of[static_cast<std::size_t>(i)] << ',' << surface.omega[i] << ','
        << surface.pi[i] << ',' << surface.mu0[i] << ',' << surface.mu1[i];
    if (surface.has_mu_y()) out << ',' << surface.mu_y[i];
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace attkit
