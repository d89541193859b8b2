#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "attkit/errors.hpp"

namespace attkit {

enum class TargetKind { Probability, Real };

/// Configuration for one nuisance learner. `Constant` fits the marginal
/// target mean (intercept only) and exists so experiments can deliberately
/// misspecify a nuisance.
struct LearnerSpec {
  enum class Kind { Logistic, RandomForest, SuperLearner, Constant };

  Kind kind = Kind::Logistic;

  // logistic
  double lambda = 1e-4;

  // random forest
  int trees = 200;
  int max_depth = 8;
  int min_leaf = 5;
  double feature_fraction = 0.0;  // <= 0 means sqrt(d)/d
  bool bootstrap = true;

  // super learner
  int stacking_folds = 5;
  std::vector<LearnerSpec> bases;

  void validate() const;

  static LearnerSpec logistic(double lambda = 1e-4);
  static LearnerSpec random_forest(int trees = 200, int max_depth = 8, int min_leaf = 5);
  static LearnerSpec super_learner(std::vector<LearnerSpec> bases, int folds = 5);
  static LearnerSpec constant();
};

/// A fitted nuisance model. Immutable; predictions are deterministic
/// functions of the fitted state.
class FittedModel {
 public:
  virtual ~FittedModel() = default;
  virtual double predict_row(const Eigen::RowVectorXd& x) const = 0;
  virtual TargetKind target_kind() const = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

using ModelPtr = std::shared_ptr<const FittedModel>;

/// Fits a learner per spec. `seed` drives every random choice (bootstrap,
/// feature subsampling, stacking folds); logistic fits ignore it.
ModelPtr fit_learner(const LearnerSpec& spec, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& t, TargetKind target, std::uint64_t seed,
                     Warnings* warnings = nullptr);

/// Probability predictions clamped into [eps, 1-eps]. Returns the number of
/// clamped rows through clip_count when provided.
Eigen::VectorXd predict_clipped(const FittedModel& model, const Eigen::MatrixXd& x,
                                double eps = 0.01, Eigen::Index* clip_count = nullptr);

/// Parses a comma-separated learner list, e.g.
///   "logistic"  "forest(trees=100,max_depth=6)"  "logistic,forest"
/// A list with more than one entry becomes a super learner over the entries.
LearnerSpec parse_learners(const std::string& text, int stacking_folds = 5);

/// Canonical round-trippable rendering of a spec (defaults resolved).
std::string describe_learners(const LearnerSpec& spec);

}  // namespace attkit
