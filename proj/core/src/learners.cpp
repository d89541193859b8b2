#include "attkit/learners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "attkit/forest.hpp"
#include "attkit/logistic.hpp"
#include "attkit/super_learner.hpp"

namespace attkit {

namespace {

class ConstantModel final : public FittedModel {
 public:
  ConstantModel(double value, TargetKind target) : value_(value), target_(target) {}
  double predict_row(const Eigen::RowVectorXd&) const override { return value_; }
  TargetKind target_kind() const override { return target_; }

 private:
  double value_;
  TargetKind target_;
};

}  // namespace

void LearnerSpec::validate() const {
  switch (kind) {
    case Kind::Logistic:
      if (lambda < 0.0) throw ConfigError("logistic ridge penalty must be >= 0");
      break;
    case Kind::RandomForest:
      if (trees < 1) throw ConfigError("forest needs at least one tree");
      if (max_depth < 0) throw ConfigError("forest max_depth must be >= 0");
      if (min_leaf < 1) throw ConfigError("forest min_leaf must be >= 1");
      if (feature_fraction > 1.0) throw ConfigError("feature_fraction must be <= 1");
      break;
    case Kind::SuperLearner:
      if (stacking_folds < 2) throw ConfigError("stacking needs at least 2 folds");
      if (bases.empty()) throw ConfigError("super learner base list is empty");
      for (const auto& base : bases) {
        if (base.kind == Kind::SuperLearner)
          throw ConfigError("nested super learners are not supported");
        base.validate();
      }
      break;
    case Kind::Constant:
      break;
  }
}

LearnerSpec LearnerSpec::logistic(double lambda) {
  LearnerSpec spec;
  spec.kind = Kind::Logistic;
  spec.lambda = lambda;
  return spec;
}

LearnerSpec LearnerSpec::random_forest(int trees, int max_depth, int min_leaf) {
  LearnerSpec spec;
  spec.kind = Kind::RandomForest;
  spec.trees = trees;
  spec.max_depth = max_depth;
  spec.min_leaf = min_leaf;
  return spec;
}

LearnerSpec LearnerSpec::super_learner(std::vector<LearnerSpec> bases, int folds) {
  LearnerSpec spec;
  spec.kind = Kind::SuperLearner;
  spec.bases = std::move(bases);
  spec.stacking_folds = folds;
  return spec;
}

LearnerSpec LearnerSpec::constant() {
  LearnerSpec spec;
  spec.kind = Kind::Constant;
  return spec;
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

ModelPtr fit_learner(const LearnerSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& t,
                     TargetKind target, std::uint64_t seed, Warnings* warnings) {
  spec.validate();
  if (x.rows() != t.size()) throw DataError("target length does not match rows");
  if (x.rows() < 1) throw DataError("learner fit needs at least one row");

  switch (spec.kind) {
    case LearnerSpec::Kind::Logistic:
      if (target != TargetKind::Probability)
        throw DataError("logistic learner supports probability targets only");
      return fit_logistic(x, t, spec.lambda, warnings);
    case LearnerSpec::Kind::RandomForest:
      return fit_random_forest(x, t, spec, target, seed);
    case LearnerSpec::Kind::SuperLearner:
      return fit_super_learner(x, t, spec, target, seed, warnings);
    case LearnerSpec::Kind::Constant:
      return std::make_shared<ConstantModel>(t.mean(), target);
  }
  throw ConfigError("unreachable learner kind");
}

Eigen::VectorXd predict_clipped(const FittedModel& model, const Eigen::MatrixXd& x, double eps,
                                Eigen::Index* clip_count) {
  if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("clip bound must lie in (0, 0.5)");
  if (model.target_kind() != TargetKind::Probability)
    throw ConfigError("clipped prediction requires a probability-target model");
  Eigen::VectorXd out = model.predict(x);
  Eigen::Index clipped = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double p = out[i];
    const double clamped = std::clamp(p, eps, 1.0 - eps);
    if (clamped != p) ++clipped;
    out[i] = clamped;
  }
  if (clip_count) *clip_count = clipped;
  return out;
}

namespace {

std::vector<std::string> split_top_level(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  if (depth != 0) throw ConfigError("unbalanced parentheses in learner spec: " + text);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_num(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  }
  if (pos != value.size()) throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
  return v;
}

LearnerSpec parse_single(const std::string& item) {
  std::string name = item;
  std::string args;
  const std::size_t open = item.find('(');
  if (open != std::string::npos) {
    if (item.back() != ')') throw ConfigError("malformed learner spec: " + item);
    name = trim(item.substr(0, open));
    args = item.substr(open + 1, item.size() - open - 2);
  }

  LearnerSpec spec;
  if (name == "logistic") {
    spec = LearnerSpec::logistic();
  } else if (name == "forest" || name == "random_forest") {
    spec = LearnerSpec::random_forest();
  } else if (name == "constant") {
    spec = LearnerSpec::constant();
  } else {
    throw ConfigError("unknown learner '" + name +
                      "' (known: logistic, forest, random_forest, constant)");
  }

  if (args.empty()) return spec;
  for (const std::string& raw : split_top_level(args, ',')) {
    const std::string kv = trim(raw);
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in learner spec: " + kv);
    const std::string key = trim(kv.substr(0, eq));
    const std::string value = trim(kv.substr(eq + 1));
    if (spec.kind == LearnerSpec::Kind::Logistic && key == "lambda") {
      spec.lambda = parse_num(key, value);
    } else if (spec.kind == LearnerSpec::Kind::RandomForest && key == "trees") {
      spec.trees = static_cast<int>(parse_num(key, value));
    } else if (spec.kind == LearnerSpec::Kind::RandomForest &&
               (key == "max_depth" || key == "depth")) {
      spec.max_depth = static_cast<int>(parse_num(key, value));
    } else if (spec.kind == LearnerSpec::Kind::RandomForest && key == "min_leaf") {
      spec.min_leaf = static_cast<int>(parse_num(key, value));
    } else if (spec.kind == LearnerSpec::Kind::RandomForest && key == "feature_fraction") {
      spec.feature_fraction = parse_num(key, value);
    } else if (spec.kind == LearnerSpec::Kind::RandomForest && key == "bootstrap") {
      spec.bootstrap = parse_num(key, value) != 0.0;
    } else {
      throw ConfigError("unknown option '" + key + "' for learner '" + name + "'");
    }
  }
  return spec;
}

void append_options(std::ostringstream& os, const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerSpec::Kind::Logistic:
      os << "logistic(lambda=" << spec.lambda << ")";
      break;
    case LearnerSpec::Kind::RandomForest:
      os << "forest(trees=" << spec.trees << ",max_depth=" << spec.max_depth
         << ",min_leaf=" << spec.min_leaf << ",feature_fraction="
         << (spec.feature_fraction > 0.0 ? spec.feature_fraction : 0.0)
         << ",bootstrap=" << (spec.bootstrap ? 1 : 0) << ")";
      break;
    case LearnerSpec::Kind::Constant:
      os << "constant";
      break;
    case LearnerSpec::Kind::SuperLearner:
      break;
  }
}

}  // namespace

LearnerSpec parse_learners(const std::string& text, int stacking_folds) {
  const std::string trimmed = trim(text);
  if (trimmed.empty()) throw ConfigError("empty learner spec");
  std::vector<LearnerSpec> items;
  for (const std::string& raw : split_top_level(trimmed, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) throw ConfigError("empty entry in learner list: " + text);
    items.push_back(parse_single(item));
  }
  LearnerSpec spec =
      items.size() == 1 ? items[0] : LearnerSpec::super_learner(std::move(items), stacking_folds);
  spec.validate();
  return spec;
}

std::string describe_learners(const LearnerSpec& spec) {
  std::ostringstream os;
  if (spec.kind == LearnerSpec::Kind::SuperLearner) {
    for (std::size_t b = 0; b < spec.bases.size(); ++b) {
      if (b) os << ",";
      append_options(os, spec.bases[b]);
    }
  } else {
    append_options(os, spec);
  }
  return os.str();
}

}  // namespace attkit
