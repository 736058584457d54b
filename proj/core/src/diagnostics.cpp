#include "weakiv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "weakiv/distributions.hpp"
#include "weakiv/errors.hpp"
#include "weakiv/estimators.hpp"

namespace weakiv {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_single_endogenous(const IVDataset& d) {
  if (d.n_endog() > 1) {
    throw MultipleEndogenous("expected one endogenous regressor, got " +
                             std::to_string(d.n_endog()));
  }
  if (d.n_endog() < 1) {
    throw MultipleEndogenous("dataset has no endogenous regressor");
  }
}

}  // namespace

const char* verdict_name(StrengthVerdict v) {
  switch (v) {
    case StrengthVerdict::Strong:
      return "strong";
    case StrengthVerdict::Weak:
      return "weak";
    case StrengthVerdict::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

std::optional<CriticalValueRow> critical_value_lookup(Eigen::Index k_excluded) {
  switch (k_excluded) {
    case 3:
      return CriticalValueRow{3.71, 9.08};
    case 5:
      return CriticalValueRow{5.82, 10.83};
    case 10:
      return CriticalValueRow{7.41, 11.49};
    case 15:
      return CriticalValueRow{7.94, 11.51};
    default:
      return std::nullopt;
  }
}

DiagnosticsReport first_stage_f(const IVDataset& d,
                                const FirstStageOptions& options) {
  require_single_endogenous(d);
  const Index k_excluded = d.n_excluded();
  if (k_excluded < 1) {
    throw NoExcludedInstruments("no excluded instruments to test");
  }

  const Index n = d.n();
  const Index k = d.n_instruments();
  const Index m = d.n_exog();
  const VectorXd x1 = d.x().rightCols(1);

  const double rss_u = d.pz().annihilate(x1).squaredNorm();
  const Projector p_exog(d.z().leftCols(m));
  const double rss_r = p_exog.annihilate(x1).squaredNorm();
  const double explained = std::max(rss_r - rss_u, 0.0);

  DiagnosticsReport rep;
  rep.k_excluded = k_excluded;
  if (rss_u > 0.0) {
    rep.f_stat = (explained / static_cast<double>(k_excluded)) /
                 (rss_u / static_cast<double>(n - k));
  } else {
    rep.f_stat = explained > 0.0
                     ? std::numeric_limits<double>::infinity()
                     : 0.0;
  }

  const double tss = (x1.array() - x1.mean()).matrix().squaredNorm();
  rep.r2 = tss > 0.0 ? std::clamp(1.0 - rss_u / tss, 0.0, 1.0) : 0.0;
  rep.adj_r2 = 1.0 - (1.0 - rep.r2) * static_cast<double>(n - 1) /
                         static_cast<double>(n - k);
  rep.mu2_over_k_hat = std::max(rep.f_stat - 1.0, 0.0);

  if (const auto row = critical_value_lookup(k_excluded)) {
    rep.threshold_used = row->f_critical;
    rep.threshold_source = ThresholdSource::Table;
    rep.verdict = rep.f_stat > row->f_critical ? StrengthVerdict::Strong
                                               : StrengthVerdict::Weak;
  } else if (options.use_rule_of_thumb) {
    rep.threshold_used = kRuleOfThumbF;
    rep.threshold_source = ThresholdSource::RuleOfThumb;
    rep.verdict = rep.f_stat > kRuleOfThumbF ? StrengthVerdict::Strong
                                             : StrengthVerdict::Weak;
  } else {
    rep.threshold_used = std::nullopt;
    rep.threshold_source = ThresholdSource::None;
    rep.verdict = StrengthVerdict::Indeterminate;
  }
  return rep;
}

double concentration_parameter(const Eigen::VectorXd& pi,
                               const Eigen::MatrixXd& z, double sigma_eta2) {
  if (!(sigma_eta2 > 0.0)) {
    throw NonpositiveVariance("sigma_eta2 must be strictly positive");
  }
  if (pi.size() != z.cols()) {
    throw DimensionMismatch("pi length must equal instrument column count");
  }
  return (z * pi).squaredNorm() / sigma_eta2;
}

double predict_bias_buse(double sigma_eps_eta, const Eigen::VectorXd& pi,
                         const Eigen::MatrixXd& z, Eigen::Index k_excluded) {
  if (k_excluded < 1) {
    throw DimensionMismatch("k_excluded must be at least 1");
  }
  if (pi.size() != z.cols()) {
    throw DimensionMismatch("pi length must equal instrument column count");
  }
  const double signal = (z * pi).squaredNorm();
  if (signal == 0.0) {
    throw DegenerateFirstStage("pi' z'z pi is zero");
  }
  return sigma_eps_eta * static_cast<double>(k_excluded - 2) / signal;
}

double predict_bias_group_asym(double sigma_eps_eta, double sigma_eta2,
                               double f_pop) {
  if (!(sigma_eta2 > 0.0)) {
    throw NonpositiveVariance("sigma_eta2 must be strictly positive");
  }
  if (!(f_pop >= 0.0)) {
    throw NonpositiveVariance("population F must be nonnegative");
  }
  return (sigma_eps_eta / sigma_eta2) / (f_pop + 1.0);
}

double predict_inconsistency(double sigma_xhat_eps, double var_xhat) {
  if (!(var_xhat > 0.0)) {
    throw NonpositiveVariance("var(xhat) must be strictly positive");
  }
  return sigma_xhat_eps / var_xhat;
}

double ar_statistic(const IVDataset& d, const Eigen::VectorXd& beta0) {
  if (beta0.size() != d.n_regressors()) {
    throw DimensionMismatch("beta0 length must equal regressor count");
  }
  const VectorXd r = d.y() - d.x() * beta0;
  const double num = d.pz().apply(r).squaredNorm();
  const double total = r.squaredNorm();
  const double den = total - num;
  if (den <= 1e-14 * std::max(total, 1.0)) {
    throw DegenerateResidual("residual lies in the instrument span");
  }
  const double k = static_cast<double>(d.n_instruments());
  const double df2 = static_cast<double>(d.n() - d.n_instruments());
  return (num / k) / (den / df2);
}

ArConfidenceSet ar_confidence_set(const IVDataset& d, double level,
                                  const GridSpec& grid) {
  require_single_endogenous(d);
  if (!(level > 0.0) || !(level < 1.0)) {
    throw InvalidGrid("level must lie strictly inside (0, 1)");
  }
  if (!std::isfinite(grid.lo) || !std::isfinite(grid.hi) ||
      !(grid.step > 0.0) || grid.hi < grid.lo) {
    throw InvalidGrid("grid must be finite with lo <= hi and step > 0");
  }

  const Index m = d.n_exog();
  const Index k = d.n_instruments();
  const Index df1 = d.n_excluded();
  const Index df2 = d.n() - k;

  // Concentrate out the exogenous block, then both AR quadratic forms are
  // quadratics in the scanned coefficient; each grid node costs O(1).
  const Projector p_exog(d.x().leftCols(m));
  const VectorXd ry = p_exog.annihilate(d.y());
  const VectorXd rx = p_exog.annihilate(d.x().rightCols(1));
  const VectorXd pry = d.pz().apply(ry);
  const VectorXd prx = d.pz().apply(rx);

  const double a0 = pry.squaredNorm();
  const double a1 = pry.dot(prx);
  const double a2 = prx.squaredNorm();
  const double t0 = ry.squaredNorm();
  const double t1 = ry.dot(rx);
  const double t2 = rx.squaredNorm();

  ArConfidenceSet out;
  out.level = level;
  out.df1 = df1;
  out.df2 = df2;
  out.critical_value =
      f_quantile(1.0 - level, static_cast<double>(df1),
                 static_cast<double>(df2));

  const auto n_nodes = static_cast<Index>(
      std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;

  bool in_run = false;
  double run_start = 0.0;
  double prev_b = grid.lo;
  for (Index i = 0; i < n_nodes; ++i) {
    const double b = grid.lo + static_cast<double>(i) * grid.step;
    const double num = std::max(a0 - 2.0 * b * a1 + b * b * a2, 0.0);
    const double total = std::max(t0 - 2.0 * b * t1 + b * b * t2, 0.0);
    const double den = total - num;
    bool accepted = false;
    if (den > 1e-14 * std::max(total, 1.0)) {
      const double ar = (num / static_cast<double>(df1)) /
                        (den / static_cast<double>(df2));
      accepted = ar <= out.critical_value;
    }
    if (accepted) {
      if (!in_run) {
        in_run = true;
        run_start = b;
      }
      if (i == 0) out.contains_grid_lo = true;
      if (i == n_nodes - 1) out.contains_grid_hi = true;
    } else if (in_run) {
      out.intervals.emplace_back(run_start, prev_b);
      in_run = false;
    }
    prev_b = b;
  }
  if (in_run) out.intervals.emplace_back(run_start, prev_b);
  return out;
}

GridSpec default_ar_grid(const IVDataset& d) {
  require_single_endogenous(d);
  const auto est = fit_2sls(d);
  const Index idx = d.n_exog();  // the single endogenous coefficient
  const double b = est.beta(idx);
  double half_width = 50.0 * est.std_errors(idx);
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    half_width = std::max(1.0, std::abs(b));
  }
  GridSpec g;
  g.lo = b - half_width;
  g.hi = b + half_width;
  g.step = (g.hi - g.lo) / 4000.0;
  return g;
}

}  // namespace weakiv
