#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "weakiv/dataset.hpp"

namespace weakiv {

enum class StrengthVerdict { Strong, Weak, Indeterminate };

/// Where the verdict threshold came from.
enum class ThresholdSource { Table, RuleOfThumb, None };

const char* verdict_name(StrengthVerdict v);

/// Row of the shipped weak-instrument critical value table, keyed by the
/// number of excluded instruments. The F critical value bounds the relative
/// bias of 2SLS at the 10% target with 5% test size.
struct CriticalValueRow {
  double mu2_per_k_threshold;
  double f_critical;
  double relative_bias_target = 0.10;
};

/// Exact table row for k_excluded in {3, 5, 10, 15}; empty otherwise.
/// No interpolation between rows.
std::optional<CriticalValueRow> critical_value_lookup(Eigen::Index k_excluded);

/// Rule-of-thumb first-stage F threshold used when no table row applies.
inline constexpr double kRuleOfThumbF = 10.0;

struct FirstStageOptions {
  /// With no table row for K: fall back to kRuleOfThumbF when true,
  /// otherwise report the verdict as indeterminate.
  bool use_rule_of_thumb = true;
};

struct DiagnosticsReport {
  double f_stat = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double mu2_over_k_hat = 0.0;  // max(F - 1, 0)
  Eigen::Index k_excluded = 0;
  StrengthVerdict verdict = StrengthVerdict::Indeterminate;
  std::optional<double> threshold_used;
  ThresholdSource threshold_source = ThresholdSource::None;
};

/// First-stage F test that the excluded-instrument coefficients are jointly
/// zero, computed from restricted/unrestricted RSS with (K - M, N - K)
/// degrees of freedom. Requires exactly one endogenous regressor and at
/// least one excluded instrument. R-squared is reported against the centered
/// total sum of squares.
DiagnosticsReport first_stage_f(const IVDataset& d,
                                const FirstStageOptions& options = {});

/// mu^2 = pi' z'z pi / sigma_eta2 for known first-stage coefficients.
double concentration_parameter(const Eigen::VectorXd& pi,
                               const Eigen::MatrixXd& z, double sigma_eta2);

/// Approximate finite-sample 2SLS bias sigma_eps_eta (K - 2) / (pi' z'z pi).
double predict_bias_buse(double sigma_eps_eta, const Eigen::VectorXd& pi,
                         const Eigen::MatrixXd& z, Eigen::Index k_excluded);

/// Approximate 2SLS bias (sigma_eps_eta / sigma_eta2) / (F + 1) in terms of
/// the population first-stage F.
double predict_bias_group_asym(double sigma_eps_eta, double sigma_eta2,
                               double f_pop);

/// plim deviation of 2SLS under an invalid instrument:
/// sigma_{xhat,eps} / var(xhat).
double predict_inconsistency(double sigma_xhat_eps, double var_xhat);

/// Anderson-Rubin statistic at the full coefficient vector beta0:
/// [(y-x b)'P_z (y-x b)/K] / [(y-x b)'M_z (y-x b)/(N-K)].
/// Null distribution F(K, N-K) exactly under normal errors.
double ar_statistic(const IVDataset& d, const Eigen::VectorXd& beta0);

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

/// Confidence set for the single endogenous coefficient by grid inversion
/// of the AR test. Exogenous coefficients are concentrated out by
/// residualizing on the exogenous block, so the statistic uses
/// (K - M, N - K) degrees of freedom.
struct ArConfidenceSet {
  double level = 0.0;           // test size; 0.05 gives a 95% set
  double critical_value = 0.0;  // F quantile the inversion compares against
  Eigen::Index df1 = 0;
  Eigen::Index df2 = 0;
  std::vector<std::pair<double, double>> intervals;  // disjoint, ascending
  bool contains_grid_lo = false;
  bool contains_grid_hi = false;

  /// Both grid endpoints accepted: the set runs off the grid on both sides.
  bool unbounded() const { return contains_grid_lo && contains_grid_hi; }
};

ArConfidenceSet ar_confidence_set(const IVDataset& d, double level,
                                  const GridSpec& grid);

/// Default inversion grid: 2SLS estimate +/- 50 standard errors, 4001 nodes.
GridSpec default_ar_grid(const IVDataset& d);

}  // namespace weakiv
