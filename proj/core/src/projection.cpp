#include "weakiv/projection.hpp"

#include <cmath>

namespace weakiv {

namespace {

// Count of pivoted-R diagonal entries above the relative cutoff. Column
// pivoting makes |R_kk| nonincreasing, so the first small entry ends the run.
Eigen::Index diag_rank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                       Eigen::Index cols) {
  const Eigen::VectorXd diag =
      qr.matrixQR().diagonal().head(cols).cwiseAbs();
  if (cols == 0) return 0;
  const double largest = diag(0);
  if (largest == 0.0 || !std::isfinite(largest)) return 0;
  Eigen::Index r = 0;
  while (r < cols && diag(r) > kRankTolerance * largest) ++r;
  return r;
}

}  // namespace

Eigen::Index qr_rank(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  return diag_rank(qr, std::min(a.rows(), a.cols()));
}

Projector::Projector(const Eigen::MatrixXd& basis) : rows_(basis.rows()) {
  const Eigen::Index k = basis.cols();
  if (k == 0) {
    leverages_ = Eigen::VectorXd::Zero(rows_);
    return;
  }
  if (rows_ < k) {
    throw RankDeficientInstruments("basis has more columns than rows (" +
                                   std::to_string(k) + " > " +
                                   std::to_string(rows_) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (diag_rank(qr, k) < k) {
    throw RankDeficientInstruments("basis columns are numerically dependent");
  }
  q_ = qr.householderQ() * Eigen::MatrixXd::Identity(rows_, k);
  leverages_ = q_.rowwise().squaredNorm();
}

Eigen::MatrixXd Projector::apply(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != rows_) {
    throw DimensionMismatch("projector built for " + std::to_string(rows_) +
                            " rows, got " + std::to_string(v.rows()));
  }
  if (q_.cols() == 0) return Eigen::MatrixXd::Zero(v.rows(), v.cols());
  return q_ * (q_.transpose() * v);
}

Eigen::MatrixXd Projector::annihilate(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  return v - apply(v);
}

Eigen::MatrixXd projection_apply(const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& v) {
  return Projector(z).apply(v);
}

}  // namespace weakiv
