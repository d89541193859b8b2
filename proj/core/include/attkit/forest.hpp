#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "attkit/learners.hpp"

namespace attkit {

/// One CART node in a flat array. feature = -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;  // leaf mean
  int left = -1;
  int right = -1;
};

/// Bagged CART forest. Binary targets split on Gini impurity, real targets on
/// variance reduction; prediction is the mean over trees.
class ForestModel final : public FittedModel {
 public:
  ForestModel(std::vector<std::vector<TreeNode>> trees, TargetKind target);

  double predict_row(const Eigen::RowVectorXd& x) const override;
  TargetKind target_kind() const override { return target_; }

  std::size_t tree_count() const { return trees_.size(); }
  const std::vector<std::vector<TreeNode>>& trees() const { return trees_; }

 private:
  std::vector<std::vector<TreeNode>> trees_;
  TargetKind target_;
};

/// Deterministic given (x, t, spec, seed). Each tree draws its bootstrap
/// sample and per-node feature subsets from a seed derived from (seed, tree).
std::shared_ptr<const ForestModel> fit_random_forest(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& t,
                                                     const LearnerSpec& spec, TargetKind target,
                                                     std::uint64_t seed);

}  // namespace attkit
