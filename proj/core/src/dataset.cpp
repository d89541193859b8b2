#include "attkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace attkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/* Minimal RFC-4180 reader: quoted fields may contain commas, doubled quotes
   and newlines. Tolerates CRLF and a missing trailing newline. */
CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    any_field = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      table.rows.push_back(std::move(record));
    }
    record.clear();
  };

  std::size_t i = 0;
  const std::size_t len = text.size();
  while (i < len) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < len && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_field = true;
        ++i;
        break;
      case ',':
        end_field();
        any_field = true;  // a comma implies a following (possibly empty) field
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field.push_back(c);
        any_field = true;
        ++i;
        break;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field in " + path);
  if (any_field || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw DataError("empty CSV file: " + path);
  return table;
}

bool is_missing_cell(const std::string& s) { return s.empty() || s == "NA"; }

bool parse_double(const std::string& s, double* out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(*out);
}

std::string cell_error(const std::string& what, std::size_t row, const std::string& column) {
  std::ostringstream os;
  os << what << " at row " << row << ", column '" << column << "'";
  return os.str();
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostream& os, const std::string& s) {
  if (!needs_quoting(s)) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

int find_header(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<int>(j);
  return -1;
}

int require_header(const std::vector<std::string>& header, const std::string& name,
                   const std::string& role) {
  int j = find_header(header, name);
  if (j < 0) {
    std::ostringstream os;
    os << role << " column '" << name << "' not found; available columns:";
    for (const auto& h : header) os << " '" << h << "'";
    throw ConfigError(os.str());
  }
  return j;
}

}  // namespace

void CovariateSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& col : columns) {
    if (col.name.empty()) throw ConfigError("schema column with empty name");
    if (!seen.insert(col.name).second)
      throw ConfigError("duplicate schema column name: " + col.name);
    if (col.kind == ColumnKind::Categorical) {
      if (col.levels.size() < 2)
        throw ConfigError("categorical column '" + col.name + "' needs at least 2 levels");
      std::set<std::string> lv(col.levels.begin(), col.levels.end());
      if (lv.size() != col.levels.size())
        throw ConfigError("duplicate levels in column '" + col.name + "'");
    }
  }
}

int CovariateSchema::index_of(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j].name == name) return static_cast<int>(j);
  return -1;
}

const ColumnSpec& CovariateSchema::at(std::string_view name) const {
  int j = index_of(name);
  if (j < 0) throw ConfigError("unknown column: " + std::string(name));
  return columns[static_cast<std::size_t>(j)];
}

void CausalDataset::validate() const {
  const Eigen::Index rows = n();
  if (r.size() != rows || a.size() != rows || y.size() != rows)
    throw DataError("dataset vectors have inconsistent lengths");
  if (static_cast<Eigen::Index>(schema.columns.size()) != d())
    throw DataError("schema does not match covariate matrix width");
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (r[i] != 0.0 && r[i] != 1.0) throw DataError("r must be 0 or 1");
    if (r[i] == 1.0) {
      if (a[i] != 0.0 && a[i] != 1.0) throw DataError("a must be 0 or 1 where r = 1");
      if (!std::isfinite(y[i])) throw DataError("y must be defined where r = 1");
    } else {
      if (!std::isnan(a[i]) || !std::isnan(y[i]))
        throw DataError("a and y must be empty where r = 0");
    }
  }
}

CausalDataset load_csv(const std::string& path, const CovariateSchema& schema,
                       const RoleMap& roles, Warnings* warnings) {
  schema.validate();
  if (roles.treatment.empty() || roles.outcome.empty() || roles.followup.empty())
    throw ConfigError("role map must name treatment, outcome and followup columns");

  CsvTable table = read_csv_file(path);
  {
    std::set<std::string> seen;
    for (const auto& h : table.header)
      if (!seen.insert(h).second) throw DataError("duplicate CSV column: " + h);
  }

  const int col_r = require_header(table.header, roles.followup, "followup");
  const int col_a = require_header(table.header, roles.treatment, "treatment");
  const int col_y = require_header(table.header, roles.outcome, "outcome");
  const int col_g = roles.group.empty() ? -1 : require_header(table.header, roles.group, "group");
  const int col_id = roles.id.empty() ? -1 : require_header(table.header, roles.id, "id");

  const std::size_t d = schema.columns.size();
  std::vector<int> cov_cols(d);
  for (std::size_t j = 0; j < d; ++j)
    cov_cols[j] = require_header(table.header, schema.columns[j].name, "covariate");

  std::vector<double> rs, as, ys;
  std::vector<std::vector<double>> xs(d);
  std::vector<std::string> ids, groups;
  std::vector<std::vector<bool>> mask(d);
  std::size_t rejected_r = 0;
  std::size_t masked_ay = 0;

  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    const auto& rec = table.rows[t];
    const std::size_t row = t + 1;  // 1-based data row, header excluded
    if (rec.size() != table.header.size()) {
      std::ostringstream os;
      os << "row " << row << " has " << rec.size() << " fields, expected "
         << table.header.size();
      throw DataError(os.str());
    }

    const std::string& rc = rec[static_cast<std::size_t>(col_r)];
    if (is_missing_cell(rc)) {
      ++rejected_r;
      continue;
    }
    double rv;
    if (!parse_double(rc, &rv) || (rv != 0.0 && rv != 1.0))
      throw DataError(cell_error("followup indicator must be 0 or 1", row, roles.followup));

    double av = kNaN, yv = kNaN;
    const std::string& ac = rec[static_cast<std::size_t>(col_a)];
    const std::string& yc = rec[static_cast<std::size_t>(col_y)];
    if (rv == 1.0) {
      if (is_missing_cell(ac))
        throw DataError(cell_error("treatment missing on a followed-up row", row, roles.treatment));
      if (!parse_double(ac, &av) || (av != 0.0 && av != 1.0))
        throw DataError(cell_error("treatment must be 0 or 1", row, roles.treatment));
      if (is_missing_cell(yc))
        throw DataError(cell_error("outcome missing on a followed-up row", row, roles.outcome));
      if (!parse_double(yc, &yv))
        throw DataError(cell_error("malformed outcome value", row, roles.outcome));
    } else {
      if (!is_missing_cell(ac) || !is_missing_cell(yc)) {
        if (!roles.lenient) {
          std::ostringstream os;
          os << "row " << row << " has treatment/outcome recorded but followup = 0"
             << " (use lenient mode to mask)";
          throw DataError(os.str());
        }
        ++masked_ay;
      }
    }

    rs.push_back(rv);
    as.push_back(av);
    ys.push_back(yv);

    for (std::size_t j = 0; j < d; ++j) {
      const ColumnSpec& spec = schema.columns[j];
      const std::string& cell = rec[static_cast<std::size_t>(cov_cols[j])];
      if (is_missing_cell(cell)) {
        xs[j].push_back(kNaN);
        mask[j].push_back(true);
        continue;
      }
      mask[j].push_back(false);
      double v;
      switch (spec.kind) {
        case ColumnKind::Continuous:
          if (!parse_double(cell, &v))
            throw DataError(cell_error("malformed numeric cell '" + cell + "'", row, spec.name));
          break;
        case ColumnKind::Binary:
          if (!parse_double(cell, &v) || (v != 0.0 && v != 1.0))
            throw DataError(cell_error("binary cell must be 0 or 1, got '" + cell + "'", row,
                                       spec.name));
          break;
        case ColumnKind::Categorical: {
          auto it = std::find(spec.levels.begin(), spec.levels.end(), cell);
          if (it == spec.levels.end())
            throw DataError(cell_error("unknown level '" + cell + "'", row, spec.name));
          v = static_cast<double>(it - spec.levels.begin());
          break;
        }
        default:
          throw DataError("unreachable column kind");
      }
      xs[j].push_back(v);
    }

    groups.push_back(col_g >= 0 ? rec[static_cast<std::size_t>(col_g)] : std::string());
    ids.push_back(col_id >= 0 ? rec[static_cast<std::size_t>(col_id)] : std::to_string(row));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rs.size());
  if (n == 0) throw DataError("no usable rows in " + path);

  CausalDataset ds;
  ds.schema = schema;
  ds.x.resize(n, static_cast<Eigen::Index>(d));
  ds.r.resize(n);
  ds.a.resize(n);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.r[i] = rs[static_cast<std::size_t>(i)];
    ds.a[i] = as[static_cast<std::size_t>(i)];
    ds.y[i] = ys[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < d; ++j) ds.x(i, static_cast<Eigen::Index>(j)) = xs[j][static_cast<std::size_t>(i)];
  }
  ds.ids = std::move(ids);
  if (col_g >= 0) ds.group = std::move(groups);
  ds.mask_names.reserve(d);
  for (const auto& col : schema.columns) ds.mask_names.push_back(col.name);
  ds.mask = std::move(mask);

  ds.y_binary = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ds.r[i] == 1.0 && ds.y[i] != 0.0 && ds.y[i] != 1.0) {
      ds.y_binary = false;
      break;
    }
  }

  if (warnings) {
    if (rejected_r > 0) {
      std::ostringstream os;
      os << "rejected " << rejected_r << " row(s) with missing followup indicator";
      warnings->add(os.str());
    }
    if (masked_ay > 0) {
      std::ostringstream os;
      os << "masked treatment/outcome on " << masked_ay << " row(s) with followup = 0";
      warnings->add(os.str());
    }
  }
  return ds;
}

void save_csv(const CausalDataset& ds, const RoleMap& roles, const std::string& path) {
  if (roles.treatment.empty() || roles.outcome.empty() || roles.followup.empty())
    throw ConfigError("role map must name treatment, outcome and followup columns");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);

  const std::size_t d = ds.schema.columns.size();
  for (std::size_t j = 0; j < d; ++j) {
    write_cell(out, ds.schema.columns[j].name);
    out << ',';
  }
  write_cell(out, roles.followup);
  out << ',';
  write_cell(out, roles.treatment);
  out << ',';
  write_cell(out, roles.outcome);
  if (!roles.group.empty()) {
    out << ',';
    write_cell(out, roles.group);
  }
  if (!roles.id.empty()) {
    out << ',';
    write_cell(out, roles.id);
  }
  out << '\n';

  auto missing_at = [&](Eigen::Index i, std::size_t j) {
    return j < ds.mask.size() && static_cast<std::size_t>(i) < ds.mask[j].size() &&
           ds.mask[j][static_cast<std::size_t>(i)];
  };

  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const ColumnSpec& spec = ds.schema.columns[j];
      const double v = ds.x(i, static_cast<Eigen::Index>(j));
      if (std::isnan(v) || (!ds.imputed && missing_at(i, j))) {
        // leave empty
      } else if (spec.kind == ColumnKind::Categorical && !ds.encoded) {
        write_cell(out, spec.levels[static_cast<std::size_t>(std::llround(v))]);
      } else {
        out << format_double(v);
      }
      out << ',';
    }
    out << format_double(ds.r[i]) << ',';
    if (std::isnan(ds.a[i])) {
      out << ',';
    } else {
      out << format_double(ds.a[i]) << ',';
    }
    if (!std::isnan(ds.y[i])) out << format_double(ds.y[i]);
    if (!roles.group.empty()) {
      out << ',';
      write_cell(out, ds.group.empty() ? std::string() : ds.group[static_cast<std::size_t>(i)]);
    }
    if (!roles.id.empty()) {
      out << ',';
      write_cell(out, ds.ids[static_cast<std::size_t>(i)]);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

CovariateSchema infer_schema(const std::string& path, const RoleMap& roles) {
  CsvTable table = read_csv_file(path);
  std::set<std::string> role_names{roles.treatment, roles.outcome, roles.followup};
  if (!roles.group.empty()) role_names.insert(roles.group);
  if (!roles.id.empty()) role_names.insert(roles.id);

  CovariateSchema schema;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const std::string& name = table.header[j];
    if (role_names.count(name)) continue;
    bool numeric = true;
    bool binary = true;
    bool any = false;
    std::set<std::string> levels;
    for (const auto& rec : table.rows) {
      if (j >= rec.size()) continue;
      const std::string& cell = rec[j];
      if (is_missing_cell(cell)) continue;
      any = true;
      double v;
      if (numeric && parse_double(cell, &v)) {
        if (v != 0.0 && v != 1.0) binary = false;
      } else {
        numeric = false;
      }
      levels.insert(cell);
    }
    ColumnSpec spec;
    spec.name = name;
    if (!any || (numeric && levels.size() <= 1)) {
      spec.kind = ColumnKind::Continuous;
    } else if (numeric) {
      spec.kind = binary ? ColumnKind::Binary : ColumnKind::Continuous;
    } else {
      spec.kind = ColumnKind::Categorical;
      spec.levels.assign(levels.begin(), levels.end());
    }
    schema.columns.push_back(std::move(spec));
  }
  return schema;
}

CausalDataset impute_covariates(const CausalDataset& ds, Warnings* warnings) {
  if (ds.encoded) throw ConfigError("impute before encoding");
  CausalDataset out = ds;
  out.imputed = true;

  const Eigen::Index n = ds.n();
  const std::size_t d = ds.schema.columns.size();
  std::vector<std::size_t> need;
  for (std::size_t j = 0; j < d; ++j) {
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isnan(ds.x(i, static_cast<Eigen::Index>(j)))) {
        any = true;
        break;
      }
    }
    if (any) need.push_back(j);
  }
  if (need.empty()) return out;

  for (std::size_t j : need) {
    const ColumnSpec& spec = ds.schema.columns[j];
    const Eigen::Index col = static_cast<Eigen::Index>(j);

    double fill;
    if (spec.kind == ColumnKind::Continuous) {
      double sum = 0.0;
      Eigen::Index cnt = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = ds.x(i, col);
        if (!std::isnan(v)) {
          sum += v;
          ++cnt;
        }
      }
      if (cnt == 0) throw DataError("column '" + spec.name + "' is entirely missing");
      fill = sum / static_cast<double>(cnt);
    } else {
      std::map<long long, Eigen::Index> counts;
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = ds.x(i, col);
        if (!std::isnan(v)) ++counts[std::llround(v)];
      }
      if (counts.empty()) throw DataError("column '" + spec.name + "' is entirely missing");
      long long best = counts.begin()->first;
      Eigen::Index best_count = counts.begin()->second;
      for (const auto& [value, count] : counts) {
        if (count > best_count) {
          best = value;
          best_count = count;
        }
      }
      fill = static_cast<double>(best);
    }

    std::string ind_name = spec.name + "_missing";
    if (out.schema.index_of(ind_name) >= 0)
      throw ConfigError("indicator column name already taken: " + ind_name);

    Eigen::MatrixXd grown(n, out.x.cols() + 1);
    grown.leftCols(out.x.cols()) = out.x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool was_missing = std::isnan(out.x(i, col));
      if (was_missing) grown(i, col) = fill;
      grown(i, grown.cols() - 1) = was_missing ? 1.0 : 0.0;
    }
    out.x = std::move(grown);
    out.schema.columns.push_back({ind_name, ColumnKind::Binary, {}});

    if (warnings) {
      Eigen::Index missing = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (out.x(i, out.x.cols() - 1) == 1.0) ++missing;
      std::ostringstream os;
      os << "imputed " << missing << " cell(s) in column '" << spec.name << "'";
      warnings->add(os.str());
    }
  }
  return out;
}

namespace {

CausalDataset apply_encode_plan(const CausalDataset& ds, const EncodeParams& params) {
  const Eigen::Index n = ds.n();
  CausalDataset out = ds;
  out.encoded = true;
  out.encode_params = params;

  const std::size_t m = params.plan.size();
  Eigen::MatrixXd enc(n, static_cast<Eigen::Index>(m));
  CovariateSchema enc_schema;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& pc = params.plan[k];
    if (pc.source < 0 || pc.source >= static_cast<int>(ds.schema.columns.size()))
      throw ConfigError("encoding plan references a column outside the schema");
    const Eigen::Index src = pc.source;
    const ColumnKind src_kind = ds.schema.columns[static_cast<std::size_t>(pc.source)].kind;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = ds.x(i, src);
      if (std::isnan(v)) throw DataError("impute before encoding");
      double o;
      if (pc.level >= 0) {
        o = (std::llround(v) == pc.level) ? 1.0 : 0.0;
      } else if (pc.sd > 0.0) {
        o = (v - pc.mean) / pc.sd;
      } else {
        o = 0.0;
      }
      enc(i, static_cast<Eigen::Index>(k)) = o;
    }
    ColumnKind kind = (pc.level >= 0 || src_kind == ColumnKind::Binary)
                          ? ColumnKind::Binary
                          : ColumnKind::Continuous;
    enc_schema.columns.push_back({pc.name, kind, {}});
  }
  out.x = std::move(enc);
  out.schema = std::move(enc_schema);
  return out;
}

}  // namespace

CausalDataset encode(const CausalDataset& ds, Warnings* warnings) {
  if (ds.encoded) return ds;
  const Eigen::Index n = ds.n();
  if (n == 0) throw DataError("cannot encode an empty dataset");

  EncodeParams params;
  for (std::size_t j = 0; j < ds.schema.columns.size(); ++j) {
    const ColumnSpec& spec = ds.schema.columns[j];
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    switch (spec.kind) {
      case ColumnKind::Binary:
        params.plan.push_back({spec.name, static_cast<int>(j), -1, 0.0, 1.0});
        break;
      case ColumnKind::Continuous: {
        double mean = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double v = ds.x(i, col);
          if (std::isnan(v)) throw DataError("impute before encoding");
          mean += v;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double dlt = ds.x(i, col) - mean;
          var += dlt * dlt;
        }
        var /= static_cast<double>(n);
        double sd = std::sqrt(var);
        if (sd == 0.0 && warnings)
          warnings->add("column '" + spec.name + "' has zero variance; encoded as constant 0");
        params.plan.push_back({spec.name, static_cast<int>(j), -1, mean, sd});
        break;
      }
      case ColumnKind::Categorical:
        for (std::size_t l = 1; l < spec.levels.size(); ++l)
          params.plan.push_back(
              {spec.name + "=" + spec.levels[l], static_cast<int>(j), static_cast<int>(l), 0.0, 1.0});
        break;
    }
  }
  return apply_encode_plan(ds, params);
}

CausalDataset encode_with(const CausalDataset& ds, const EncodeParams& params) {
  if (ds.encoded) throw ConfigError("dataset already encoded");
  return apply_encode_plan(ds, params);
}

SubgroupPartition partition_by_age(const CausalDataset& ds, const std::string& age_column,
                                   int pool_low, int pool_high) {
  if (ds.encoded) throw ConfigError("partition before encoding: ages are standardized away");
  if (pool_high <= pool_low + 1)
    throw ConfigError("age pooling thresholds must leave room for single-year groups");
  const int j = ds.schema.index_of(age_column);
  if (j < 0) throw ConfigError("unknown age column: " + age_column);
  if (ds.schema.columns[static_cast<std::size_t>(j)].kind == ColumnKind::Categorical)
    throw ConfigError("age column must be numeric");

  SubgroupPartition part;
  part.labels.push_back("<=" + std::to_string(pool_low));
  for (int v = pool_low + 1; v < pool_high; ++v) part.labels.push_back(std::to_string(v));
  part.labels.push_back(">=" + std::to_string(pool_high));
  const int k = static_cast<int>(part.labels.size());
  part.counts.assign(static_cast<std::size_t>(k), 0);

  int mask_col = -1;
  for (std::size_t m = 0; m < ds.mask_names.size(); ++m)
    if (ds.mask_names[m] == age_column) mask_col = static_cast<int>(m);

  const Eigen::Index n = ds.n();
  part.assignment.assign(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool was_missing =
        mask_col >= 0 && ds.mask[static_cast<std::size_t>(mask_col)][static_cast<std::size_t>(i)];
    const double v = ds.x(i, j);
    if (was_missing || std::isnan(v)) {
      ++part.excluded;
      continue;
    }
    int g;
    if (v <= pool_low) {
      g = 0;
    } else if (v >= pool_high) {
      g = k - 1;
    } else {
      g = static_cast<int>(std::llround(v)) - pool_low;
    }
    part.assignment[static_cast<std::size_t>(i)] = g;
    ++part.counts[static_cast<std::size_t>(g)];
  }
  for (int g = 0; g < k; ++g)
    if (part.counts[static_cast<std::size_t>(g)] == 0) part.empty_groups.push_back(g);
  return part;
}

SubgroupPartition partition_by_group(const CausalDataset& ds) {
  if (ds.group.empty()) throw ConfigError("dataset has no group column");
  std::set<std::string> distinct;
  for (const auto& g : ds.group)
    if (!g.empty()) distinct.insert(g);
  if (distinct.empty()) throw DataError("group column has no labels");

  SubgroupPartition part;
  part.labels.assign(distinct.begin(), distinct.end());
  part.counts.assign(part.labels.size(), 0);
  part.assignment.assign(ds.group.size(), -1);
  for (std::size_t i = 0; i < ds.group.size(); ++i) {
    if (ds.group[i].empty()) {
      ++part.excluded;
      continue;
    }
    const auto it = std::lower_bound(part.labels.begin(), part.labels.end(), ds.group[i]);
    const int g = static_cast<int>(it - part.labels.begin());
    part.assignment[i] = g;
    ++part.counts[static_cast<std::size_t>(g)];
  }
  return part;
}

CausalDataset subset_rows(const CausalDataset& ds, const std::vector<Eigen::Index>& rows) {
  CausalDataset out;
  out.schema = ds.schema;
  out.y_binary = ds.y_binary;
  out.imputed = ds.imputed;
  out.encoded = ds.encoded;
  out.encode_params = ds.encode_params;
  out.mask_names = ds.mask_names;

  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.x.resize(m, ds.x.cols());
  out.r.resize(m);
  out.a.resize(m);
  out.y.resize(m);
  out.mask.assign(ds.mask.size(), {});
  for (auto& col : out.mask) col.reserve(static_cast<std::size_t>(m));

  for (Eigen::Index t = 0; t < m; ++t) {
    const Eigen::Index i = rows[static_cast<std::size_t>(t)];
    if (i < 0 || i >= ds.n()) throw DataError("row index out of range");
    out.x.row(t) = ds.x.row(i);
    out.r[t] = ds.r[i];
    out.a[t] = ds.a[i];
    out.y[t] = ds.y[i];
    if (!ds.ids.empty()) out.ids.push_back(ds.ids[static_cast<std::size_t>(i)]);
    if (!ds.group.empty()) out.group.push_back(ds.group[static_cast<std::size_t>(i)]);
    for (std::size_t c = 0; c < ds.mask.size(); ++c)
      out.mask[c].push_back(ds.mask[c][static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

bool compare_double(double lhs, FilterOp op, double rhs) {
  switch (op) {
    case FilterOp::Eq: return lhs == rhs;
    case FilterOp::Ne: return lhs != rhs;
    case FilterOp::Lt: return lhs < rhs;
    case FilterOp::Le: return lhs <= rhs;
    case FilterOp::Gt: return lhs > rhs;
    case FilterOp::Ge: return lhs >= rhs;
  }
  return false;
}

bool compare_string(const std::string& lhs, FilterOp op, const std::string& rhs) {
  switch (op) {
    case FilterOp::Eq: return lhs == rhs;
    case FilterOp::Ne: return lhs != rhs;
    case FilterOp::Lt: return lhs < rhs;
    case FilterOp::Le: return lhs <= rhs;
    case FilterOp::Gt: return lhs > rhs;
    case FilterOp::Ge: return lhs >= rhs;
  }
  return false;
}

}  // namespace

CausalDataset filter_rows(const CausalDataset& ds, const RoleMap& roles,
                          const std::vector<FilterPredicate>& predicates) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    bool ok = true;
    for (const auto& pred : predicates) {
      double lhs = kNaN;
      std::string lhs_str;
      bool is_string = false;

      if (pred.column == roles.treatment) {
        lhs = ds.a[i];
      } else if (pred.column == roles.outcome) {
        lhs = ds.y[i];
      } else if (pred.column == roles.followup) {
        lhs = ds.r[i];
      } else if (!roles.group.empty() && pred.column == roles.group) {
        is_string = true;
        lhs_str = ds.group.empty() ? std::string() : ds.group[static_cast<std::size_t>(i)];
      } else if (!roles.id.empty() && pred.column == roles.id) {
        is_string = true;
        lhs_str = ds.ids[static_cast<std::size_t>(i)];
      } else {
        const int j = ds.schema.index_of(pred.column);
        if (j < 0) throw ConfigError("filter references unknown column: " + pred.column);
        const ColumnSpec& spec = ds.schema.columns[static_cast<std::size_t>(j)];
        const double v = ds.x(i, j);
        if (spec.kind == ColumnKind::Categorical && !ds.encoded) {
          is_string = true;
          if (!std::isnan(v)) lhs_str = spec.levels[static_cast<std::size_t>(std::llround(v))];
        } else {
          lhs = v;
        }
      }

      if (is_string) {
        if (lhs_str.empty() || !compare_string(lhs_str, pred.op, pred.value)) {
          ok = false;
        }
      } else {
        double rhs;
        if (!parse_double(pred.value, &rhs))
          throw ConfigError("filter value '" + pred.value + "' is not numeric for column '" +
                            pred.column + "'");
        if (std::isnan(lhs) || !compare_double(lhs, pred.op, rhs)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) keep.push_back(i);
  }
  if (keep.empty()) throw DataError("no rows left after filtering");
  return subset_rows(ds, keep);
}

}  // namespace attkit
