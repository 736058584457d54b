#include <Eigen/Dense>

#include "doctest.h"
#include "weakiv/projection.hpp"
#include "weakiv/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::uint64_t seed) {
  weakiv::Philox4x32 rng(seed);
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.next_normal();
  }
  return m;
}

// Dense P = z (z'z)^{-1} z', viable only at toy sizes.
MatrixXd dense_projection(const MatrixXd& z) {
  return z * (z.transpose() * z).inverse() * z.transpose();
}

}  // namespace

TEST_SUITE_BEGIN("projection");

TEST_CASE("matches the dense textbook projector") {
  const MatrixXd z = random_matrix(6, 2, 11);
  const MatrixXd v = random_matrix(6, 3, 12);
  const MatrixXd expected = dense_projection(z) * v;
  const MatrixXd got = weakiv::projection_apply(z, v);
  CHECK((got - expected).norm() <= 1e-10 * expected.norm());
}

TEST_CASE("fixes vectors inside the span and kills the complement") {
  const MatrixXd z = random_matrix(9, 3, 21);
  const VectorXd coef = VectorXd::LinSpaced(3, 1.0, 3.0);
  const VectorXd inside = z * coef;
  CHECK((weakiv::projection_apply(z, inside) - inside).norm() <=
        1e-10 * inside.norm());

  // Gram-Schmidt complement of a random vector.
  const weakiv::Projector p(z);
  const VectorXd raw = random_matrix(9, 1, 22);
  const VectorXd outside = p.annihilate(raw);
  CHECK(p.apply(outside).norm() <= 1e-10 * raw.norm());
}

TEST_CASE("idempotency, trace, complementarity") {
  const MatrixXd z = random_matrix(40, 7, 31);
  const weakiv::Projector p(z);
  const MatrixXd v = random_matrix(40, 4, 32);

  const MatrixXd pv = p.apply(v);
  CHECK((p.apply(pv) - pv).norm() <= 1e-10 * v.norm());

  CHECK(p.leverages().sum() == doctest::Approx(7.0).epsilon(1e-8));

  const MatrixXd mv = p.annihilate(v);
  CHECK((pv + mv - v).norm() <= 1e-12 * v.norm());
}

TEST_CASE("leverages are the diagonal of the dense projector") {
  const MatrixXd z = random_matrix(12, 4, 41);
  const weakiv::Projector p(z);
  const MatrixXd dense = dense_projection(z);
  for (Eigen::Index i = 0; i < 12; ++i) {
    CHECK(p.leverages()(i) == doctest::Approx(dense(i, i)).epsilon(1e-10));
  }
}

TEST_CASE("rank deficiency is rejected") {
  MatrixXd z = random_matrix(8, 3, 51);
  z.col(2) = z.col(0);  // duplicated direction
  CHECK_THROWS_AS(weakiv::Projector{z}, weakiv::RankDeficientInstruments);

  // Near-duplicates inside the relative tolerance fail too.
  MatrixXd z2 = random_matrix(8, 2, 52);
  z2.col(1) = z2.col(0) * (1.0 + 1e-14);
  CHECK_THROWS_AS(weakiv::Projector{z2}, weakiv::RankDeficientInstruments);
}

TEST_CASE("zero-column basis projects everything to zero") {
  const weakiv::Projector p(MatrixXd(5, 0));
  const MatrixXd v = random_matrix(5, 2, 61);
  CHECK(p.apply(v).norm() == 0.0);
  CHECK((p.annihilate(v) - v).norm() == 0.0);
  CHECK(p.rank() == 0);
}

TEST_CASE("row-count mismatch is rejected") {
  const weakiv::Projector p(random_matrix(6, 2, 71));
  CHECK_THROWS_AS(p.apply(random_matrix(7, 1, 72)),
                  weakiv::DimensionMismatch);
}

TEST_CASE("qr_rank sees through scale") {
  MatrixXd a = random_matrix(10, 3, 81);
  CHECK(weakiv::qr_rank(a) == 3);
  a.col(1) = 2.0 * a.col(0);
  CHECK(weakiv::qr_rank(a) == 2);
  CHECK(weakiv::qr_rank(1e-12 * a) == 2);  // relative, not absolute
}

TEST_SUITE_END();
