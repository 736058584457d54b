#include "weakiv/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "weakiv/errors.hpp"
#include "weakiv/rng.hpp"

namespace weakiv {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lower-triangular factor of a symmetric PSD 2x2, tolerant of zero rows.
struct Factor2 {
  double l11, l21, l22;
};

Factor2 psd_factor(const Eigen::Matrix2d& s) {
  const double scale =
      std::max({std::abs(s(0, 0)), std::abs(s(1, 1)), std::abs(s(0, 1)), 1e-300});
  if (std::abs(s(0, 1) - s(1, 0)) > 1e-12 * scale) {
    throw InvalidCovariance("sigma must be symmetric");
  }
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  if (s(0, 0) < -1e-12 * scale || s(1, 1) < -1e-12 * scale ||
      det < -1e-12 * scale * scale) {
    throw InvalidCovariance("sigma must be positive semidefinite");
  }
  Factor2 f;
  f.l11 = std::sqrt(std::max(s(0, 0), 0.0));
  f.l21 = f.l11 > 0.0 ? s(0, 1) / f.l11 : 0.0;
  f.l22 = std::sqrt(std::max(s(1, 1) - f.l21 * f.l21, 0.0));
  return f;
}

double draw_unit_variance(Philox4x32& rng, InstrumentDist dist) {
  if (dist == InstrumentDist::Uniform) {
    // uniform(-sqrt 3, sqrt 3): mean zero, unit variance
    return std::sqrt(3.0) * (2.0 * rng.next_double() - 1.0);
  }
  return rng.next_normal();
}

}  // namespace

double r2_limit(const Eigen::VectorXd& pi_excluded, double sigma_eta2) {
  if (!(sigma_eta2 > 0.0)) {
    throw NonpositiveVariance("sigma_eta2 must be strictly positive");
  }
  const double signal = pi_excluded.squaredNorm();
  if (signal == 0.0) return 0.0;
  return 1.0 / (1.0 + sigma_eta2 / signal);
}

FirstStageScale normalize_first_stage(double r2, Eigen::Index k_excluded) {
  if (k_excluded < 1) {
    throw DimensionMismatch("k_excluded must be at least 1");
  }
  if (!(r2 > 0.0) || !(r2 < 1.0)) {
    throw NonpositiveVariance(
        "r2 must lie strictly inside (0, 1) for the unit normalization");
  }
  FirstStageScale s;
  s.pi_excluded = Eigen::VectorXd::Constant(
      k_excluded, std::sqrt(r2 / static_cast<double>(k_excluded)));
  s.sigma_eta2 = 1.0 - r2;
  return s;
}

DGPConfig model_preset(int id) {
  DGPConfig cfg;
  cfg.beta0 = 1.0;
  cfg.beta1 = 1.0;
  cfg.pi0 = 0.0;
  cfg.n = 200;
  switch (id) {
    case 1:
      cfg.pi_excluded = Eigen::VectorXd::Constant(1, 0.3);
      cfg.sigma << 0.25, 0.20, 0.20, 0.25;
      break;
    case 2:
      cfg.pi_excluded = Eigen::VectorXd::Constant(1, 0.2);
      cfg.sigma << 1.0, 0.9, 0.9, 1.0;
      break;
    case 3:
      cfg.pi_excluded = Eigen::VectorXd::Constant(15, 0.3);
      cfg.sigma << 0.25, 0.10, 0.10, 0.25;
      break;
    case 4:
      cfg.pi_excluded = Eigen::VectorXd::Constant(15, 0.1);
      cfg.sigma << 0.25, 0.20, 0.20, 0.25;
      break;
    default:
      throw Error("model preset id must be 1, 2, 3, or 4");
  }
  return cfg;
}

IVDataset generate(const DGPConfig& cfg, std::uint64_t seed) {
  const Index n = cfg.n;
  const Index k = cfg.k();
  const Factor2 f = psd_factor(cfg.sigma);

  Philox4x32 rng(seed);

  MatrixXd z(n, k);
  z.col(0).setOnes();
  for (Index j = 1; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      z(i, j) = draw_unit_variance(rng, cfg.instrument_dist);
    }
  }

  VectorXd eps(n), eta(n);
  for (Index i = 0; i < n; ++i) {
    const double e1 = rng.next_normal();
    const double e2 = rng.next_normal();
    eps(i) = f.l11 * e1;
    eta(i) = f.l21 * e1 + f.l22 * e2;
  }

  VectorXd x_endog = VectorXd::Constant(n, cfg.pi0);
  if (k > 1) x_endog += z.rightCols(k - 1) * cfg.pi_excluded;
  x_endog += eta;

  const VectorXd y =
      VectorXd::Constant(n, cfg.beta0) + cfg.beta1 * x_endog + eps;

  MatrixXd x(n, 2);
  x.col(0).setOnes();
  x.col(1) = x_endog;

  std::vector<std::string> x_names{"const", "x"};
  std::vector<std::string> z_names(k);
  z_names[0] = "const";
  for (Index j = 1; j < k; ++j) z_names[j] = "z" + std::to_string(j);

  return build_dataset(y, std::move(x), z, 1, std::move(x_names),
                       std::move(z_names));
}

double population_concentration(const DGPConfig& cfg) {
  const double sigma_eta2 = cfg.sigma(1, 1);
  if (!(sigma_eta2 > 0.0)) {
    throw NonpositiveVariance("sigma_eta2 must be strictly positive");
  }
  const double signal = cfg.pi0 * cfg.pi0 + cfg.pi_excluded.squaredNorm();
  return static_cast<double>(cfg.n) * signal / sigma_eta2;
}

double order_quantile(const std::vector<double>& sorted_values, double p) {
  const auto n = static_cast<std::ptrdiff_t>(sorted_values.size());
  if (n == 0) return kNaN;
  auto idx = static_cast<std::ptrdiff_t>(
      std::ceil(p * static_cast<double>(n))) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, n - 1);
  return sorted_values[static_cast<std::size_t>(idx)];
}

MCSummary run_mc(const DGPConfig& cfg, int reps,
                 const std::vector<Estimator>& estimators,
                 std::uint64_t master_seed, int workers,
                 std::vector<ReplicationRecord>* records) {
  if (reps < 1) throw Error("reps must be at least 1");
  psd_factor(cfg.sigma);  // validate before spawning workers
  const auto ne = estimators.size();

  // Replication-indexed storage keeps aggregation independent of which
  // worker ran which replication.
  std::vector<std::vector<double>> b1(ne, std::vector<double>(reps, kNaN));
  std::vector<std::vector<double>> se(ne, std::vector<double>(reps, kNaN));
  std::vector<std::vector<std::uint8_t>> ok(
      ne, std::vector<std::uint8_t>(reps, 0));

  const int used_workers = std::clamp(workers, 1, reps);

  auto run_range = [&](int first) {
    for (int r = first; r < reps; r += used_workers) {
      IVDataset d;
      try {
        d = generate(cfg, derive_seed(master_seed, static_cast<std::uint64_t>(r)));
      } catch (const Error&) {
        continue;  // every estimator fails for this replication
      }
      const Index idx = d.n_exog();  // the endogenous coefficient
      for (std::size_t e = 0; e < ne; ++e) {
        try {
          const EstimateResult res = fit(d, estimators[e]);
          const double bb = res.beta(idx);
          const double ss = res.std_errors(idx);
          if (std::isfinite(bb) && std::isfinite(ss)) {
            b1[e][static_cast<std::size_t>(r)] = bb;
            se[e][static_cast<std::size_t>(r)] = ss;
            ok[e][static_cast<std::size_t>(r)] = 1;
          }
        } catch (const Error&) {
          // counted below as a failure
        }
      }
    }
  };

  if (used_workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> thrown(
        static_cast<std::size_t>(used_workers));
    pool.reserve(static_cast<std::size_t>(used_workers));
    for (int w = 0; w < used_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run_range(w);
        } catch (...) {
          thrown[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& ex : thrown) {
      if (ex) std::rethrow_exception(ex);
    }
  }

  MCSummary summary;
  summary.reps = reps;
  summary.master_seed = master_seed;
  summary.n = cfg.n;
  summary.estimators.reserve(ne);

  for (std::size_t e = 0; e < ne; ++e) {
    EstimatorSummary s;
    s.estimator = estimators[e];
    std::vector<double> devs;
    devs.reserve(static_cast<std::size_t>(reps));
    int covered = 0;
    for (int r = 0; r < reps; ++r) {
      if (!ok[e][static_cast<std::size_t>(r)]) continue;
      const double dev = b1[e][static_cast<std::size_t>(r)] - cfg.beta1;
      devs.push_back(dev);
      if (std::abs(dev) <= 1.96 * se[e][static_cast<std::size_t>(r)]) {
        ++covered;
      }
    }
    s.n_success = static_cast<int>(devs.size());
    s.n_failed = reps - s.n_success;
    std::sort(devs.begin(), devs.end());
    s.quantiles = {order_quantile(devs, 0.0), order_quantile(devs, 0.25),
                   order_quantile(devs, 0.50), order_quantile(devs, 0.75),
                   order_quantile(devs, 1.0)};
    s.median_bias = s.quantiles[2];
    s.coverage95 = s.n_success > 0
                       ? static_cast<double>(covered) / s.n_success
                       : kNaN;
    summary.estimators.push_back(std::move(s));
  }

  if (records) {
    records->clear();
    records->reserve(static_cast<std::size_t>(reps) * ne);
    for (int r = 0; r < reps; ++r) {
      for (std::size_t e = 0; e < ne; ++e) {
        ReplicationRecord rec;
        rec.rep = r;
        rec.estimator = estimators[e];
        rec.ok = ok[e][static_cast<std::size_t>(r)] != 0;
        rec.beta1 = b1[e][static_cast<std::size_t>(r)];
        rec.std_error = se[e][static_cast<std::size_t>(r)];
        records->push_back(rec);
      }
    }
  }
  return summary;
}

std::string_view sweep_axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Rho:
      return "rho";
    case SweepAxis::R2:
      return "r2";
    case SweepAxis::K:
      return "k";
  }
  return "unknown";
}

std::optional<SweepAxis> sweep_axis_from_name(std::string_view name) {
  if (name == "rho") return SweepAxis::Rho;
  if (name == "r2") return SweepAxis::R2;
  if (name == "k") return SweepAxis::K;
  return std::nullopt;
}

DGPConfig sweep_config(SweepAxis axis, double value, const SweepBase& base,
                       Eigen::Index n) {
  double rho = base.rho;
  double r2 = base.r2;
  Index k = base.k;

  switch (axis) {
    case SweepAxis::Rho:
      rho = value;
      break;
    case SweepAxis::R2:
      r2 = value;
      break;
    case SweepAxis::K: {
      const double rounded = std::round(value);
      if (!(std::abs(value - rounded) <= 1e-9) || rounded < 2.0 ||
          rounded > 1e6) {
        throw InvalidSweepValue("k must be an integer >= 2, got " +
                                std::to_string(value));
      }
      k = static_cast<Index>(rounded);
      break;
    }
  }

  if (!(rho > -1.0) || !(rho < 1.0)) {
    throw InvalidSweepValue("rho must lie strictly inside (-1, 1)");
  }
  if (!(r2 > 0.0) || !(r2 < 1.0)) {
    throw InvalidSweepValue("r2 must lie strictly inside (0, 1)");
  }
  if (k < 2) {
    throw InvalidSweepValue("k must be at least 2");
  }
  if (n <= k) {
    throw InvalidSweepValue("sample size " + std::to_string(n) +
                            " cannot support " + std::to_string(k) +
                            " instrument columns");
  }

  const FirstStageScale scale = normalize_first_stage(r2, k - 1);
  DGPConfig cfg;
  cfg.beta0 = 1.0;
  cfg.beta1 = 1.0;
  cfg.pi0 = 0.0;
  cfg.pi_excluded = scale.pi_excluded;
  cfg.n = n;
  const double sigma_eta = std::sqrt(scale.sigma_eta2);
  cfg.sigma << 1.0, rho * sigma_eta, rho * sigma_eta, scale.sigma_eta2;
  return cfg;
}

std::vector<SweepRow> run_sweep(SweepAxis axis,
                                const std::vector<double>& values,
                                const SweepBase& base,
                                const std::vector<Eigen::Index>& sizes,
                                int reps,
                                const std::vector<Estimator>& estimators,
                                std::uint64_t master_seed, int workers) {
  if (values.empty() || sizes.empty()) {
    throw InvalidSweepValue("sweep needs at least one axis value and size");
  }
  // Validate the whole grid before burning any compute.
  for (double v : values) {
    for (Index n : sizes) sweep_config(axis, v, base, n);
  }

  std::vector<SweepRow> rows;
  rows.reserve(values.size() * sizes.size() * estimators.size());
  std::uint64_t cell = 0;
  for (double v : values) {
    for (Index n : sizes) {
      const DGPConfig cfg = sweep_config(axis, v, base, n);
      const std::uint64_t cell_seed = derive_seed(master_seed, cell++);
      const MCSummary summary =
          run_mc(cfg, reps, estimators, cell_seed, workers);
      for (const EstimatorSummary& es : summary.estimators) {
        SweepRow row;
        row.axis = axis;
        row.value = v;
        row.n = n;
        row.estimator = es.estimator;
        row.n_success = es.n_success;
        row.n_failed = es.n_failed;
        row.median_bias = es.median_bias;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace weakiv
