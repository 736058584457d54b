#include "weakiv/dataset.hpp"

#include <cmath>
#include <utility>

namespace weakiv {

IVDataset build_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                        Eigen::MatrixXd z, Eigen::Index n_exog,
                        std::vector<std::string> x_names,
                        std::vector<std::string> z_names) {
  const Eigen::Index n = y.size();
  const Eigen::Index l = x.cols();
  const Eigen::Index k = z.cols();

  if (x.rows() != n || z.rows() != n) {
    throw DimensionMismatch("row counts disagree: y has " + std::to_string(n) +
                            ", x has " + std::to_string(x.rows()) +
                            ", z has " + std::to_string(z.rows()));
  }
  if (l < 1) throw DimensionMismatch("x must have at least one column");
  if (k < l) {
    throw DimensionMismatch("underidentified: " + std::to_string(k) +
                            " instruments for " + std::to_string(l) +
                            " regressors");
  }
  if (n <= k) {
    throw DimensionMismatch("need more observations than instruments: N=" +
                            std::to_string(n) + ", K=" + std::to_string(k));
  }
  if (n_exog < 0 || n_exog > l) {
    throw DimensionMismatch("n_exog = " + std::to_string(n_exog) +
                            " outside [0, " + std::to_string(l) + "]");
  }
  if (n_exog > 0 &&
      !(x.leftCols(n_exog).array() == z.leftCols(n_exog).array()).all()) {
    throw ExogenousMismatch("first " + std::to_string(n_exog) +
                            " columns of x and z must be identical");
  }
  if (!x_names.empty() && static_cast<Eigen::Index>(x_names.size()) != l) {
    throw DimensionMismatch("x_names length does not match x columns");
  }
  if (!z_names.empty() && static_cast<Eigen::Index>(z_names.size()) != k) {
    throw DimensionMismatch("z_names length does not match z columns");
  }

  IVDataset d;
  d.y_ = std::move(y);
  d.x_ = std::move(x);
  d.z_ = std::move(z);
  d.n_exog_ = n_exog;
  d.pz_ = Projector(d.z_);  // throws RankDeficientInstruments
  d.x_names_ = std::move(x_names);
  d.z_names_ = std::move(z_names);
  return d;
}

StructuralError StructuralError::from_rho(double sigma_eps2, double sigma_eta2,
                                          double rho) {
  if (!(sigma_eps2 > 0.0) || !(sigma_eta2 > 0.0)) {
    throw NonpositiveVariance("error variances must be strictly positive");
  }
  if (!(std::abs(rho) <= 1.0)) {
    throw InvalidCovariance("|rho| must not exceed 1");
  }
  StructuralError s;
  s.sigma_eps2 = sigma_eps2;
  s.sigma_eta2 = sigma_eta2;
  s.rho = rho;
  s.sigma_eps_eta = rho * std::sqrt(sigma_eps2 * sigma_eta2);
  return s;
}

StructuralError StructuralError::from_covariance(const Eigen::Matrix2d& sigma) {
  if (sigma(0, 1) != sigma(1, 0)) {
    throw InvalidCovariance("covariance matrix must be symmetric");
  }
  if (!(sigma(0, 0) > 0.0) || !(sigma(1, 1) > 0.0)) {
    throw NonpositiveVariance("error variances must be strictly positive");
  }
  const double denom = std::sqrt(sigma(0, 0) * sigma(1, 1));
  return from_rho(sigma(0, 0), sigma(1, 1), sigma(0, 1) / denom);
}

Eigen::Matrix2d StructuralError::covariance() const {
  Eigen::Matrix2d s;
  s << sigma_eps2, sigma_eps_eta, sigma_eps_eta, sigma_eta2;
  return s;
}

}  // namespace weakiv
