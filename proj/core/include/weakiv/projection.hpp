#pragma once

#include <Eigen/Dense>

#include "weakiv/errors.hpp"

namespace weakiv {

/// Relative rank cutoff: a pivoted-QR diagonal entry at or below
/// kRankTolerance times the largest one marks the matrix rank-deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Effective column rank of a under the kRankTolerance rule.
Eigen::Index qr_rank(const Eigen::MatrixXd& a);

/// Orthogonal projector onto the column span of a basis matrix, held in
/// factored form (thin Q); the dense N x N projection matrix is never formed.
/// A zero-column basis is allowed and projects everything to zero.
class Projector {
 public:
  Projector() = default;

  /// Throws RankDeficientInstruments unless basis has full column rank.
  explicit Projector(const Eigen::MatrixXd& basis);

  /// P v.
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// (I - P) v.
  Eigen::MatrixXd annihilate(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// Diagonal of P; entry i is the leverage h_i of observation i.
  const Eigen::VectorXd& leverages() const { return leverages_; }

  /// Thin orthonormal basis Q with P = Q Q'.
  const Eigen::MatrixXd& q() const { return q_; }

  Eigen::Index rank() const { return q_.cols(); }
  Eigen::Index rows() const { return rows_; }

 private:
  Eigen::Index rows_ = 0;
  Eigen::MatrixXd q_;        // N x rank, orthonormal columns
  Eigen::VectorXd leverages_;
};

/// P_z v for a full-column-rank z, computed via QR.
/// Throws RankDeficientInstruments otherwise.
Eigen::MatrixXd projection_apply(const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& v);

}  // namespace weakiv
