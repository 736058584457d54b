#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "weakiv/dataset.hpp"

namespace weakiv {

enum class Estimator { Ols, Tsls, Liml, Jive, KClass };

/// Lowercase tag used in CLI flags and output tables ("ols", "2sls", ...).
std::string_view estimator_name(Estimator e);
std::optional<Estimator> estimator_from_name(std::string_view name);

struct EstimateResult {
  Estimator estimator;
  Eigen::VectorXd beta;
  Eigen::VectorXd std_errors;

  /// LIML reports its estimated kappa, fit_kclass echoes the requested one;
  /// empty for OLS/2SLS/JIVE. LIML's satisfies kappa >= 1 - 1e-10.
  std::optional<double> kappa;

  /// Residual variance from structural residuals y - x beta, divisor N - L.
  double sigma2_hat = 0.0;

  /// The x-hat actually used in estimation; present for 2SLS and JIVE.
  std::optional<Eigen::MatrixXd> fitted_instrument;
};

enum class JiveMethod {
  Naive,        // literal leave-one-out regression per observation
  Accelerated,  // leverage identity, identical result in exact arithmetic
};

/// k-class parameter; kappa = 0 reproduces OLS, kappa = 1 reproduces 2SLS.
struct KClassSpec {
  double kappa = 0.0;
};

/// Least squares of y on x. Throws RankDeficientDesign.
EstimateResult fit_ols(const IVDataset& d);

/// Two-stage least squares. Throws WeakRankFailure when x'P_z x is
/// numerically singular (the estimator does not exist).
EstimateResult fit_2sls(const IVDataset& d);

/// Jackknife IV: row i of x-hat uses a first stage fitted without
/// observation i; exogenous columns pass through unchanged. Throws
/// LeverageOne when some leverage reaches 1, RankDeficientDesign otherwise.
EstimateResult fit_jive(const IVDataset& d,
                        JiveMethod method = JiveMethod::Accelerated);

/// Limited-information maximum likelihood. kappa-hat is the smallest
/// eigenvalue of the variance-ratio eigenproblem; the coefficient solve then
/// reuses the k-class form. Throws SingularGram when the annihilated Gram
/// matrix is not positive definite.
EstimateResult fit_liml(const IVDataset& d);

/// beta = (x'(I - kappa M_z) x)^{-1} x'(I - kappa M_z) y.
EstimateResult fit_kclass(const IVDataset& d, const KClassSpec& spec);

/// Dispatch by tag. Estimator::KClass is rejected here: it needs a kappa.
EstimateResult fit(const IVDataset& d, Estimator which);

}  // namespace weakiv
