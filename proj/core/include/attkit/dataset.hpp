#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attkit/errors.hpp"

namespace attkit {

enum class ColumnKind { Continuous, Categorical, Binary };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;  // categorical only, ordered; levels[0] is the reference
};

/// Describes the covariate block of a dataset. Categorical columns hold level
/// indices until encode() expands them to reference-dropped indicators.
struct CovariateSchema {
  std::vector<ColumnSpec> columns;

  void validate() const;  // unique names, categorical columns list >= 2 levels
  int index_of(std::string_view name) const;  // -1 when absent
  const ColumnSpec& at(std::string_view name) const;
};

/// Which CSV columns play which role. Covariate columns come from the schema.
struct RoleMap {
  std::string treatment;  // A
  std::string outcome;    // Y
  std::string followup;   // R
  std::string group;      // optional subgroup label column
  std::string id;         // optional row identifier column
  bool lenient = false;   // mask A/Y values present on R=0 rows instead of failing
};

/// Standardization / one-hot parameters frozen by encode() so the same
/// transform can be replayed on new (e.g. simulated) data.
struct EncodeParams {
  struct OutputColumn {
    std::string name;
    int source = -1;     // index into the pre-encode schema
    int level = -1;      // categorical level index; -1 for non-categorical
    double mean = 0.0;   // continuous standardization
    double sd = 1.0;     // 0 marks a zero-variance column (output forced to 0)
  };
  std::vector<OutputColumn> plan;
};

/// Observed-data structure (X, R, R*A, R*Y). A and Y are NaN exactly where
/// R = 0; downstream arithmetic must branch on r before touching them.
/// Immutable by convention once constructed; all transforms return copies.
struct CausalDataset {
  CovariateSchema schema;  // describes the current columns of x
  Eigen::MatrixXd x;       // n x d covariates (level indices until encoded)
  Eigen::VectorXd r;       // {0,1} follow-up indicator
  Eigen::VectorXd a;       // {0,1} treatment, NaN where r = 0
  Eigen::VectorXd y;       // outcome, NaN where r = 0
  std::vector<std::string> ids;
  std::vector<std::string> group;  // empty when no group column

  // Pre-imputation covariate missingness, aligned with the load-time columns.
  std::vector<std::string> mask_names;
  std::vector<std::vector<bool>> mask;  // mask[j][i]: cell (i, load-col j) was missing

  bool y_binary = true;
  bool imputed = false;
  bool encoded = false;
  std::optional<EncodeParams> encode_params;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
  bool observed(Eigen::Index i) const { return r[i] > 0.5; }
  int column_index(std::string_view name) const { return schema.index_of(name); }

  /// Checks the structural invariants (r binary, a/y defined iff r = 1, x finite).
  void validate() const;
};

/// Ordered, deterministic grouping of rows. assignment[i] = -1 marks a row
/// excluded from every group (e.g. missing age).
struct SubgroupPartition {
  std::vector<std::string> labels;
  std::vector<int> assignment;       // n entries in [-1, labels.size())
  std::vector<Eigen::Index> counts;  // per label
  Eigen::Index excluded = 0;
  std::vector<int> empty_groups;     // indices of labels with count 0
};

CausalDataset load_csv(const std::string& path, const CovariateSchema& schema,
                       const RoleMap& roles, Warnings* warnings = nullptr);

/// Writes the dataset back out in the input schema (categorical cells as level
/// names, masked/missing cells empty). Round-trips through load_csv.
void save_csv(const CausalDataset& ds, const RoleMap& roles, const std::string& path);

/// Scans a CSV and proposes a schema for every non-role column: numeric
/// columns become continuous (binary when all values are 0/1), everything
/// else categorical with lexicographically sorted levels.
CovariateSchema infer_schema(const std::string& path, const RoleMap& roles);

/// Mode/mean imputation with one appended missing-indicator column per
/// covariate column that had any missing cell.
CausalDataset impute_covariates(const CausalDataset& ds, Warnings* warnings = nullptr);

/// Reference-dropped one-hot encoding of categorical columns and full-sample
/// standardization of continuous columns. Idempotent: an encoded dataset is
/// returned unchanged.
CausalDataset encode(const CausalDataset& ds, Warnings* warnings = nullptr);

/// Replays a stored encoding on an un-encoded dataset with the same schema.
CausalDataset encode_with(const CausalDataset& ds, const EncodeParams& params);

/// Age-group partition {<=low, low+1, ..., high-1, >=high}. Rows whose age was
/// missing at load time are excluded and counted, not imputed into a group.
SubgroupPartition partition_by_age(const CausalDataset& ds, const std::string& age_column,
                                   int pool_low = 12, int pool_high = 19);

/// Partition by the dataset's group labels (sorted, deterministic order).
SubgroupPartition partition_by_group(const CausalDataset& ds);

/// Row subset preserving schema, masks and flags.
CausalDataset subset_rows(const CausalDataset& ds, const std::vector<Eigen::Index>& rows);

/// Comparison operator for filter predicates.
enum class FilterOp { Eq, Ne, Lt, Le, Gt, Ge };

struct FilterPredicate {
  std::string column;  // covariate, role or group column name
  FilterOp op = FilterOp::Eq;
  std::string value;   // compared numerically when both sides parse as numbers
};

/// Applies conjunctive filters. Meant to run before fold assignment.
CausalDataset filter_rows(const CausalDataset& ds, const RoleMap& roles,
                          const std::vector<FilterPredicate>& predicates);

}  // namespace attkit
