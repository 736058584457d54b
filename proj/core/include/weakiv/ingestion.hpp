#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "weakiv/dataset.hpp"
#include "weakiv/diagnostics.hpp"
#include "weakiv/estimators.hpp"

namespace weakiv {

/// Declares which CSV columns play which role when assembling a design.
/// Outcome and endogenous columns are numeric; everything else is treated
/// as categorical and dummy-coded. An interaction pair (a, b) emits the
/// retained dummies of a crossed with every observed level of b.
struct ColumnSpec {
  std::string outcome;
  std::vector<std::string> endogenous;
  std::vector<std::string> control_categoricals;
  std::vector<std::string> instrument_categoricals;
  std::vector<std::pair<std::string, std::string>> interactions;
};

/// Typed columns as read from disk.
struct RawTable {
  std::size_t n_rows = 0;
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> categorical;
};

/// Reads the columns named by spec from a headered, comma-delimited file.
/// Cells may be double-quoted; a quoted cell may contain commas and doubled
/// quotes. Throws FileNotFound, SchemaMismatch (missing declared column,
/// duplicate header, bad role sets), or ParseError with the 1-based data row.
RawTable read_csv(const std::string& path, const ColumnSpec& spec);
RawTable read_csv(std::istream& in, const ColumnSpec& spec);

/// An IVDataset plus the bookkeeping linking generated dummy columns back
/// to source variables. Column labels live in dataset.x_names()/z_names();
/// dummies are labeled var=level, interactions a=la*b=lb.
struct BuiltDesign {
  IVDataset dataset;
  std::map<std::string, std::string> reference_levels;  // var -> dropped level
  Eigen::Index coef_index = 0;  // x column of the first declared endogenous
  Eigen::Index n_excluded = 0;
};

/// Dummy-codes the table into [intercept | control dummies | endogenous]
/// with instruments [same exogenous block | instrument dummies |
/// interactions]. Reference level per categorical: first in sorted order.
/// With no instrument blocks declared the design is self-instrumented
/// (z = x) and plain least squares applies. Throws SingleLevelCategorical,
/// EmptyAfterFiltering, SchemaMismatch, or dataset construction errors.
BuiltDesign build_design(const RawTable& table, const ColumnSpec& spec);

struct EstimateLine {
  Estimator estimator = Estimator::Ols;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct SpecificationReport {
  std::string term;  // label of the reported coefficient
  std::vector<EstimateLine> lines;
  /// Present when the design has exactly one endogenous regressor and at
  /// least one excluded instrument.
  std::optional<DiagnosticsReport> first_stage;
  Eigen::Index n_obs = 0;
  Eigen::Index n_excluded = 0;
};

/// Fits each requested estimator and reports the coefficient of interest
/// (the first declared endogenous column). Estimator errors propagate.
SpecificationReport run_specification(const BuiltDesign& design,
                                      const std::vector<Estimator>& estimators);

/// Options for the synthetic quarter-of-birth style extract used by the
/// pipeline tests: a planted log-wage return to schooling, quarter effects
/// on schooling, birth-year trends in both equations, and an unobserved
/// ability term that nudges least squares upward.
struct MiniCensusOptions {
  std::size_t n = 2000;
  std::uint64_t seed = 7;
  double true_return = 0.08;
  bool with_state = false;  // adds a state column for interaction designs
  int n_states = 10;
};

/// CSV text with header lwage,educ,qob,yob[,state]. Canonical form; the
/// table variant parses exactly this text.
std::string mini_census_csv(const MiniCensusOptions& opt);
RawTable mini_census_table(const MiniCensusOptions& opt);

/// Matching role declaration: with_state wires the instruments through
/// qob x state interactions (30 columns), otherwise plain qob dummies (3).
ColumnSpec mini_census_spec(bool with_state);

}  // namespace weakiv
