#include "weakiv/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "weakiv/rng.hpp"

namespace weakiv {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// One CSV record; double-quoted cells may hold commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

void validate_spec(const ColumnSpec& spec) {
  if (spec.outcome.empty()) {
    throw SchemaMismatch("spec must name an outcome column");
  }
  if (spec.endogenous.empty()) {
    throw SchemaMismatch("spec must name at least one endogenous column");
  }
  std::set<std::string> seen{spec.outcome};
  const auto add_role = [&seen](const std::string& c) {
    if (c.empty()) throw SchemaMismatch("empty column name in spec");
    if (!seen.insert(c).second) {
      throw SchemaMismatch("column '" + c + "' declared in more than one role");
    }
  };
  for (const auto& c : spec.endogenous) add_role(c);
  for (const auto& c : spec.control_categoricals) add_role(c);
  for (const auto& c : spec.instrument_categoricals) add_role(c);
  for (const auto& [a, b] : spec.interactions) {
    if (a.empty() || b.empty()) {
      throw SchemaMismatch("interaction pair with an empty column name");
    }
  }
}

std::set<std::string> numeric_columns(const ColumnSpec& spec) {
  std::set<std::string> cols{spec.outcome};
  cols.insert(spec.endogenous.begin(), spec.endogenous.end());
  return cols;
}

std::set<std::string> categorical_columns(const ColumnSpec& spec) {
  std::set<std::string> cols;
  cols.insert(spec.control_categoricals.begin(),
              spec.control_categoricals.end());
  cols.insert(spec.instrument_categoricals.begin(),
              spec.instrument_categoricals.end());
  for (const auto& [a, b] : spec.interactions) {
    cols.insert(a);
    cols.insert(b);
  }
  return cols;
}

// Sorted observed levels plus the per-level row indicator source.
struct LevelInfo {
  std::vector<std::string> levels;  // ascending; front() is the reference
};

LevelInfo observed_levels(const std::string& name,
                          const std::vector<std::string>& column) {
  std::set<std::string> uniq(column.begin(), column.end());
  if (uniq.size() < 2) {
    throw SingleLevelCategorical("categorical '" + name +
                                 "' has fewer than two observed levels");
  }
  LevelInfo info;
  info.levels.assign(uniq.begin(), uniq.end());
  return info;
}

}  // namespace

RawTable read_csv(std::istream& in, const ColumnSpec& spec) {
  validate_spec(spec);
  const std::set<std::string> want_numeric = numeric_columns(spec);
  const std::set<std::string> want_categorical = categorical_columns(spec);

  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaMismatch("input has no header row");
  }
  const std::vector<std::string> headers = split_record(line);

  std::map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < headers.size(); ++j) {
    const std::string& h = headers[j];
    if (want_numeric.count(h) || want_categorical.count(h)) {
      if (!position.emplace(h, j).second) {
        throw SchemaMismatch("duplicated header column '" + h + "'");
      }
    }
  }
  for (const auto& c : want_numeric) {
    if (!position.count(c)) {
      throw SchemaMismatch("declared column '" + c + "' not in header");
    }
  }
  for (const auto& c : want_categorical) {
    if (!position.count(c)) {
      throw SchemaMismatch("declared column '" + c + "' not in header");
    }
  }

  RawTable t;
  for (const auto& c : want_numeric) t.numeric[c] = {};
  for (const auto& c : want_categorical) t.categorical[c] = {};

  std::size_t rowno = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++rowno;
    const std::vector<std::string> cells = split_record(line);
    if (cells.size() != headers.size()) {
      throw ParseError(rowno, "*",
                       "expected " + std::to_string(headers.size()) +
                           " cells, got " + std::to_string(cells.size()));
    }
    for (const auto& c : want_numeric) {
      const std::string& cell = cells[position.at(c)];
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (cell.empty() || end != begin + cell.size() || !std::isfinite(v)) {
        throw ParseError(rowno, c,
                         "expected a finite number, got '" + cell + "'");
      }
      t.numeric[c].push_back(v);
    }
    for (const auto& c : want_categorical) {
      const std::string& cell = cells[position.at(c)];
      if (cell.empty()) {
        throw ParseError(rowno, c, "empty categorical cell");
      }
      t.categorical[c].push_back(cell);
    }
  }
  t.n_rows = rowno;
  return t;
}

RawTable read_csv(const std::string& path, const ColumnSpec& spec) {
  std::ifstream f(path);
  if (!f) throw FileNotFound("cannot open '" + path + "'");
  return read_csv(f, spec);
}

BuiltDesign build_design(const RawTable& table, const ColumnSpec& spec) {
  validate_spec(spec);
  const std::size_t n = table.n_rows;
  if (n == 0) throw EmptyAfterFiltering("table has no data rows");

  const auto num_col = [&](const std::string& name) -> const std::vector<double>& {
    const auto it = table.numeric.find(name);
    if (it == table.numeric.end() || it->second.size() != n) {
      throw SchemaMismatch("numeric column '" + name +
                           "' missing or inconsistent length");
    }
    return it->second;
  };
  const auto cat_col =
      [&](const std::string& name) -> const std::vector<std::string>& {
    const auto it = table.categorical.find(name);
    if (it == table.categorical.end() || it->second.size() != n) {
      throw SchemaMismatch("categorical column '" + name +
                           "' missing or inconsistent length");
    }
    return it->second;
  };

  std::map<std::string, LevelInfo> levels;
  for (const auto& c : categorical_columns(spec)) {
    levels.emplace(c, observed_levels(c, cat_col(c)));
  }

  const auto rows = static_cast<Index>(n);
  Index n_controls = 0;
  for (const auto& c : spec.control_categoricals) {
    n_controls += static_cast<Index>(levels.at(c).levels.size()) - 1;
  }
  const Index m = 1 + n_controls;
  const Index l = m + static_cast<Index>(spec.endogenous.size());

  Index n_excluded = 0;
  for (const auto& c : spec.instrument_categoricals) {
    n_excluded += static_cast<Index>(levels.at(c).levels.size()) - 1;
  }
  for (const auto& [a, b] : spec.interactions) {
    n_excluded += (static_cast<Index>(levels.at(a).levels.size()) - 1) *
                  static_cast<Index>(levels.at(b).levels.size());
  }

  std::vector<std::string> x_names;
  x_names.reserve(static_cast<std::size_t>(l));
  MatrixXd x(rows, l);
  x.col(0).setOnes();
  x_names.emplace_back("const");

  std::map<std::string, std::string> reference_levels;
  Index col = 1;
  const auto emit_dummies = [&](MatrixXd& dest, Index& at,
                                std::vector<std::string>& names,
                                const std::string& cname) {
    const auto& data = cat_col(cname);
    const auto& info = levels.at(cname);
    reference_levels.emplace(cname, info.levels.front());
    for (std::size_t lv = 1; lv < info.levels.size(); ++lv) {
      const std::string& level = info.levels[lv];
      for (Index i = 0; i < rows; ++i) {
        dest(i, at) = data[static_cast<std::size_t>(i)] == level ? 1.0 : 0.0;
      }
      names.push_back(cname + "=" + level);
      ++at;
    }
  };

  for (const auto& c : spec.control_categoricals) {
    emit_dummies(x, col, x_names, c);
  }
  const Index coef_index = col;
  for (const auto& c : spec.endogenous) {
    const auto& data = num_col(c);
    for (Index i = 0; i < rows; ++i) {
      x(i, col) = data[static_cast<std::size_t>(i)];
    }
    x_names.push_back(c);
    ++col;
  }

  const auto& ydata = num_col(spec.outcome);
  VectorXd y(rows);
  for (Index i = 0; i < rows; ++i) y(i) = ydata[static_cast<std::size_t>(i)];

  BuiltDesign out;
  out.coef_index = coef_index;
  out.n_excluded = n_excluded;

  if (n_excluded == 0) {
    // Self-instrumented design: every regressor acts as its own instrument
    // and every estimator reduces to least squares.
    out.dataset = build_dataset(std::move(y), x, x, l, x_names, x_names);
    out.reference_levels = std::move(reference_levels);
    return out;
  }

  MatrixXd z(rows, m + n_excluded);
  z.leftCols(m) = x.leftCols(m);
  std::vector<std::string> z_names(x_names.begin(), x_names.begin() + m);
  Index zcol = m;
  for (const auto& c : spec.instrument_categoricals) {
    emit_dummies(z, zcol, z_names, c);
  }
  for (const auto& [a, b] : spec.interactions) {
    const auto& adata = cat_col(a);
    const auto& bdata = cat_col(b);
    const auto& ainfo = levels.at(a);
    const auto& binfo = levels.at(b);
    reference_levels.emplace(a, ainfo.levels.front());
    for (std::size_t la = 1; la < ainfo.levels.size(); ++la) {
      for (const std::string& lb : binfo.levels) {
        const std::string& level_a = ainfo.levels[la];
        for (Index i = 0; i < rows; ++i) {
          const auto ui = static_cast<std::size_t>(i);
          z(i, zcol) = (adata[ui] == level_a && bdata[ui] == lb) ? 1.0 : 0.0;
        }
        z_names.push_back(a + "=" + level_a + "*" + b + "=" + lb);
        ++zcol;
      }
    }
  }

  out.dataset = build_dataset(std::move(y), std::move(x), std::move(z), m,
                              std::move(x_names), std::move(z_names));
  out.reference_levels = std::move(reference_levels);
  return out;
}

SpecificationReport run_specification(
    const BuiltDesign& design, const std::vector<Estimator>& estimators) {
  const IVDataset& d = design.dataset;
  SpecificationReport rep;
  rep.n_obs = d.n();
  rep.n_excluded = design.n_excluded;
  rep.term = d.x_names().empty()
                 ? "x" + std::to_string(design.coef_index)
                 : d.x_names()[static_cast<std::size_t>(design.coef_index)];
  rep.lines.reserve(estimators.size());
  for (const Estimator est : estimators) {
    const EstimateResult res = fit(d, est);
    EstimateLine line;
    line.estimator = est;
    line.estimate = res.beta(design.coef_index);
    line.std_error = res.std_errors(design.coef_index);
    rep.lines.push_back(line);
  }
  if (d.n_endog() == 1 && d.n_excluded() >= 1) {
    rep.first_stage = first_stage_f(d);
  }
  return rep;
}

std::string mini_census_csv(const MiniCensusOptions& opt) {
  if (opt.n < 30) throw Error("mini census needs at least 30 rows");
  if (opt.with_state && (opt.n_states < 2 || opt.n_states > 99)) {
    throw Error("n_states must lie in [2, 99]");
  }
  // Schooling responds to quarter of birth and a mild cohort trend; wages
  // carry the planted return plus a small ability channel that biases plain
  // least squares upward without overwhelming it.
  static constexpr double kQuarterEffect[4] = {0.0, 0.1, 0.25, 0.4};
  Philox4x32 rng(opt.seed);

  std::string out =
      opt.with_state ? "lwage,educ,qob,yob,state\n" : "lwage,educ,qob,yob\n";
  char buf[160];
  for (std::size_t i = 0; i < opt.n; ++i) {
    const int qob = 1 + static_cast<int>(rng.next_double() * 4.0);
    const int yob = 40 + static_cast<int>(rng.next_double() * 10.0);
    const int state = 1 + static_cast<int>(rng.next_double() * opt.n_states);
    const double ability = rng.next_normal();
    const double e_school = rng.next_normal();
    const double e_wage = rng.next_normal();

    const double educ = 12.0 + 0.03 * (yob - 40) + kQuarterEffect[qob - 1] +
                        0.8 * ability + 0.8 * e_school;
    const double lwage = 5.0 + opt.true_return * educ + 0.005 * (yob - 40) +
                         0.015 * ability + 0.4 * e_wage;

    if (opt.with_state) {
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%d,s%02d\n", lwage, educ,
                    qob, yob, state);
    } else {
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%d\n", lwage, educ, qob,
                    yob);
    }
    out += buf;
  }
  return out;
}

RawTable mini_census_table(const MiniCensusOptions& opt) {
  std::istringstream in(mini_census_csv(opt));
  return read_csv(in, mini_census_spec(opt.with_state));
}

ColumnSpec mini_census_spec(bool with_state) {
  ColumnSpec spec;
  spec.outcome = "lwage";
  spec.endogenous = {"educ"};
  spec.control_categoricals = {"yob"};
  if (with_state) {
    spec.interactions = {{"qob", "state"}};
  } else {
    spec.instrument_categoricals = {"qob"};
  }
  return spec;
}

}  // namespace weakiv
