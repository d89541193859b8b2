#include "attkit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attkit/rng.hpp"

namespace attkit {

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& t;
  int max_depth;
  int min_leaf;
  int mtry;
  TargetKind target;
  Rng& rng;
  std::vector<TreeNode> nodes;
  std::vector<int> feature_pool;

  /* Weighted child impurity: Gini for binary targets, SSE for real ones.
     Both reduce to sum(t^2) - sum(t)^2/n per child up to a constant factor. */
  double impurity(double sum, double sumsq, double count) const {
    const double sse = sumsq - sum * sum / count;
    return target == TargetKind::Probability ? 2.0 * sse : sse;
  }

  int build(std::vector<int>& rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    double sum = 0.0, sumsq = 0.0;
    for (int i : rows) {
      sum += t[i];
      sumsq += t[i] * t[i];
    }
    const double n = static_cast<double>(rows.size());
    nodes[id].value = sum / n;

    const bool constant = (sumsq - sum * sum / n) <= 1e-12 * n;
    if (depth >= max_depth || static_cast<int>(rows.size()) < 2 * min_leaf || constant)
      return id;

    const int d = static_cast<int>(x.cols());
    feature_pool.resize(static_cast<std::size_t>(d));
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    for (int k = 0; k < mtry; ++k) {
      const std::size_t j =
          static_cast<std::size_t>(k) + rng.uniform_int(static_cast<std::size_t>(d - k));
      std::swap(feature_pool[static_cast<std::size_t>(k)], feature_pool[j]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = impurity(sum, sumsq, n);
    std::vector<std::pair<double, int>> order;

    for (int k = 0; k < mtry; ++k) {
      const int f = feature_pool[static_cast<std::size_t>(k)];
      order.clear();
      for (int i : rows) order.emplace_back(x(i, f), i);
      std::sort(order.begin(), order.end());

      double left_sum = 0.0, left_sumsq = 0.0;
      for (std::size_t s = 0; s + 1 < order.size(); ++s) {
        const double ti = t[order[s].second];
        left_sum += ti;
        left_sumsq += ti * ti;
        const double nl = static_cast<double>(s + 1);
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        if (order[s].first == order[s + 1].first) continue;  // no boundary here
        const double score =
            impurity(left_sum, left_sumsq, nl) + impurity(sum - left_sum, sumsq - left_sumsq, nr);
        if (score < best_score - 1e-12) {
          best_score = score;
          best_feature = f;
          best_threshold = 0.5 * (order[s].first + order[s + 1].first);
        }
      }
    }

    if (best_feature < 0) return id;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (int i : rows)
      (x(i, best_feature) <= best_threshold ? left_rows : right_rows).push_back(i);
    if (left_rows.empty() || right_rows.empty()) return id;

    rows.clear();
    rows.shrink_to_fit();
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    const int left = build(left_rows, depth + 1);
    nodes[id].left = left;
    const int right = build(right_rows, depth + 1);
    nodes[id].right = right;
    return id;
  }
};

double predict_tree(const std::vector<TreeNode>& tree, const Eigen::RowVectorXd& x) {
  int node = 0;
  for (;;) {
    const TreeNode& nd = tree[static_cast<std::size_t>(node)];
    if (nd.feature < 0) return nd.value;
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
}

}  // namespace

ForestModel::ForestModel(std::vector<std::vector<TreeNode>> trees, TargetKind target)
    : trees_(std::move(trees)), target_(target) {}

double ForestModel::predict_row(const Eigen::RowVectorXd& x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += predict_tree(tree, x);
  return sum / static_cast<double>(trees_.size());
}

std::shared_ptr<const ForestModel> fit_random_forest(const Eigen::MatrixXd& x,
                                                     const Eigen::VectorXd& t,
                                                     const LearnerSpec& spec, TargetKind target,
                                                     std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (n < 1) throw DataError("forest fit needs at least one row");
  if (t.size() != n) throw DataError("target length does not match rows");
  if (n < spec.min_leaf) throw DataError("fewer rows than min_leaf");
  if (!x.allFinite()) throw DataError("covariates must be finite");
  if (target == TargetKind::Probability)
    for (Eigen::Index i = 0; i < n; ++i)
      if (t[i] != 0.0 && t[i] != 1.0)
        throw DataError("probability forest requires a binary target");

  const int d = static_cast<int>(x.cols());
  int mtry;
  if (spec.feature_fraction > 0.0) {
    mtry = static_cast<int>(std::lround(spec.feature_fraction * d));
  } else {
    mtry = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
  }
  mtry = std::clamp(mtry, 1, d);

  std::vector<std::vector<TreeNode>> trees(static_cast<std::size_t>(spec.trees));
  for (int tree = 0; tree < spec.trees; ++tree) {
    Rng rng(derive_seed(seed, "tree", static_cast<std::uint64_t>(tree)));
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (spec.bootstrap) {
      for (auto& row : rows)
        row = static_cast<int>(rng.uniform_int(static_cast<std::size_t>(n)));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder{x, t, spec.max_depth, spec.min_leaf, mtry, target, rng, {}, {}};
    builder.build(rows, 0);
    trees[static_cast<std::size_t>(tree)] = std::move(builder.nodes);
  }
  return std::make_shared<ForestModel>(std::move(trees), target);
}

}  // namespace attkit
