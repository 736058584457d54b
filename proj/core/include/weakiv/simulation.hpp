#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "weakiv/dataset.hpp"
#include "weakiv/estimators.hpp"

namespace weakiv {

enum class InstrumentDist { Normal, Uniform };

/// One synthetic design: z = [1, z_1 .. z_{k-1}] with IID mean-zero
/// unit-variance entries, x = pi0 + z_excl' pi + eta, y = beta0 + beta1 x +
/// eps, (eps, eta) bivariate normal with covariance sigma.
struct DGPConfig {
  double beta0 = 1.0;
  double beta1 = 1.0;
  double pi0 = 0.0;
  Eigen::VectorXd pi_excluded;  // coefficients on the non-constant columns
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  Eigen::Index n = 200;
  InstrumentDist instrument_dist = InstrumentDist::Normal;

  /// Instrument columns including the constant.
  Eigen::Index k() const { return pi_excluded.size() + 1; }
};

/// Limiting first-stage R^2, 1 / (1 + sigma_eta2 / ||pi||^2).
double r2_limit(const Eigen::VectorXd& pi_excluded, double sigma_eta2);

struct FirstStageScale {
  Eigen::VectorXd pi_excluded;
  double sigma_eta2;
};

/// Inverse of r2_limit under the normalization ||pi||^2 + sigma_eta2 = 1,
/// with equal pi components; k_excluded is the number of components.
FirstStageScale normalize_first_stage(double r2, Eigen::Index k_excluded);

/// The four canned 200-observation designs used throughout the test suite:
/// 1: k=2,  pi1=0.3,      sigma [[0.25,0.20],[0.20,0.25]]  (strong)
/// 2: k=2,  pi1=0.2,      sigma [[1.00,0.90],[0.90,1.00]]  (weak, high rho)
/// 3: k=16, pi=0.3 x 15,  sigma [[0.25,0.10],[0.10,0.25]]  (strong, many)
/// 4: k=16, pi=0.1 x 15,  sigma [[0.25,0.20],[0.20,0.25]]  (weak, many)
DGPConfig model_preset(int id);

/// Draws one dataset. Fully determined by (cfg, seed): instrument columns
/// first (column-major), then the error pairs, all from one Philox stream.
IVDataset generate(const DGPConfig& cfg, std::uint64_t seed);

/// Population concentration parameter n ||(pi0, pi)||^2 / sigma_eta2
/// (instruments have identity population second moment).
double population_concentration(const DGPConfig& cfg);

struct EstimatorSummary {
  Estimator estimator = Estimator::Ols;
  int n_success = 0;
  int n_failed = 0;
  /// Order-statistic quantiles {0, 25, 50, 75, 100}% of beta1_hat - beta1
  /// over successful replications; lower (type-1) convention, so an even
  /// count takes the lower middle value. NaN when every replication failed.
  std::array<double, 5> quantiles{};
  double median_bias = 0.0;
  /// Share of successes with |beta1_hat - beta1| <= 1.96 SE(beta1_hat).
  double coverage95 = 0.0;
};

struct MCSummary {
  int reps = 0;
  std::uint64_t master_seed = 0;
  Eigen::Index n = 0;
  std::vector<EstimatorSummary> estimators;
};

/// Raw per-replication estimate, for distribution dumps.
struct ReplicationRecord {
  int rep = 0;
  Estimator estimator = Estimator::Ols;
  bool ok = false;
  double beta1 = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo study of cfg. Replication r draws from seed
/// derive_seed(master_seed, r); failed fits (nonexistent 2SLS, leverage-one
/// JIVE, non-finite output) are counted and excluded from the summaries.
/// Output is bit-identical for fixed inputs regardless of `workers`.
MCSummary run_mc(const DGPConfig& cfg, int reps,
                 const std::vector<Estimator>& estimators,
                 std::uint64_t master_seed, int workers = 1,
                 std::vector<ReplicationRecord>* records = nullptr);

enum class SweepAxis { Rho, R2, K };

std::string_view sweep_axis_name(SweepAxis a);
std::optional<SweepAxis> sweep_axis_from_name(std::string_view name);

/// Held-fixed design constants for the axis not being swept. sigma_eps2 is
/// pinned to 1 and sigma_eps_eta = rho * sigma_eta.
struct SweepBase {
  Eigen::Index k = 7;  // instrument columns including the constant
  double r2 = 0.1;     // limiting first-stage R^2
  double rho = 0.9;    // corr(eps, eta)
};

struct SweepRow {
  SweepAxis axis = SweepAxis::Rho;
  double value = 0.0;
  Eigen::Index n = 0;
  Estimator estimator = Estimator::Ols;
  int n_success = 0;
  int n_failed = 0;
  double median_bias = 0.0;
};

/// Design for one sweep cell. Throws InvalidSweepValue when the axis value
/// is out of range (rho in (-1,1), r2 in (0,1), k integer >= 2) or the
/// sample size cannot support the instrument count.
DGPConfig sweep_config(SweepAxis axis, double value, const SweepBase& base,
                       Eigen::Index n);

/// Grid of run_mc cells over axis values x sample sizes; each cell gets its
/// own derived master seed, so the grid is reproducible and cells are
/// independent. Rows come out value-major, then size, then estimator.
std::vector<SweepRow> run_sweep(SweepAxis axis,
                                const std::vector<double>& values,
                                const SweepBase& base,
                                const std::vector<Eigen::Index>& sizes,
                                int reps,
                                const std::vector<Estimator>& estimators,
                                std::uint64_t master_seed, int workers = 1);

/// Lower (type-1) order-statistic quantile of an ascending-sorted sample.
double order_quantile(const std::vector<double>& sorted_values, double p);

}  // namespace weakiv
