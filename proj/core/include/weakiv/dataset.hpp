#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakiv/errors.hpp"
#include "weakiv/projection.hpp"

namespace weakiv {

/// Outcome, regressors, and instruments of a linear IV problem.
///
/// Shapes: y is length N, x is N x L, z is N x K with N > K >= L >= 1.
/// Columns of x are ordered exogenous-then-endogenous; the first n_exog
/// columns of x and z are the very same included-exogenous block (the
/// intercept, when wanted, must be passed explicitly as a column of ones).
/// Instances are immutable after construction and safe to share across
/// threads.
class IVDataset {
 public:
  /// Empty dataset; only useful as an assignment target.
  IVDataset() = default;

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& z() const { return z_; }

  Eigen::Index n() const { return y_.size(); }
  Eigen::Index n_regressors() const { return x_.cols(); }   // L
  Eigen::Index n_instruments() const { return z_.cols(); }  // K
  Eigen::Index n_exog() const { return n_exog_; }           // M
  Eigen::Index n_endog() const { return x_.cols() - n_exog_; }
  Eigen::Index n_excluded() const { return z_.cols() - n_exog_; }

  /// Projector onto span(z), factored at construction time.
  const Projector& pz() const { return pz_; }

  /// Column labels; empty when the caller supplied none.
  const std::vector<std::string>& x_names() const { return x_names_; }
  const std::vector<std::string>& z_names() const { return z_names_; }

  friend IVDataset build_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                                 Eigen::MatrixXd z, Eigen::Index n_exog,
                                 std::vector<std::string> x_names,
                                 std::vector<std::string> z_names);

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd z_;
  Eigen::Index n_exog_ = 0;
  Projector pz_;
  std::vector<std::string> x_names_;
  std::vector<std::string> z_names_;
};

/// Validates shapes, the shared exogenous block, and instrument rank, then
/// assembles the dataset. The first n_exog columns of x and z must be
/// bit-identical. Throws DimensionMismatch, ExogenousMismatch, or
/// RankDeficientInstruments.
IVDataset build_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                        Eigen::MatrixXd z, Eigen::Index n_exog,
                        std::vector<std::string> x_names = {},
                        std::vector<std::string> z_names = {});

/// Second moments of the structural error pair (eps, eta).
/// Both variances must be strictly positive and |rho| <= 1, which keeps the
/// implied 2x2 covariance matrix positive semidefinite.
struct StructuralError {
  double sigma_eps2;
  double sigma_eta2;
  double sigma_eps_eta;
  double rho;

  static StructuralError from_rho(double sigma_eps2, double sigma_eta2,
                                  double rho);
  static StructuralError from_covariance(const Eigen::Matrix2d& sigma);

  Eigen::Matrix2d covariance() const;
};

}  // namespace weakiv
