#include <Eigen/Dense>

#include "doctest.h"
#include "weakiv/dataset.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Toy {
  VectorXd y;
  MatrixXd x;
  MatrixXd z;
};

// 6 observations, x = [const, endog], z = [const, z1, z2].
Toy make_toy() {
  Toy t;
  t.y = VectorXd(6);
  t.y << 1.0, 2.0, 1.5, 3.0, 2.5, 4.0;
  t.x = MatrixXd(6, 2);
  t.x << 1, 0.3, 1, 1.1, 1, 0.7, 1, 2.0, 1, 1.4, 1, 2.6;
  t.z = MatrixXd(6, 3);
  t.z << 1, 0.1, 1.0, 1, 0.9, 0.2, 1, 0.5, 0.7, 1, 1.8, 0.3, 1, 1.2, 0.9, 1,
      2.4, 0.1;
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("valid construction exposes shapes and names") {
  Toy t = make_toy();
  const weakiv::IVDataset d = weakiv::build_dataset(
      t.y, t.x, t.z, 1, {"const", "x"}, {"const", "z1", "z2"});
  CHECK(d.n() == 6);
  CHECK(d.n_regressors() == 2);
  CHECK(d.n_instruments() == 3);
  CHECK(d.n_exog() == 1);
  CHECK(d.n_endog() == 1);
  CHECK(d.n_excluded() == 2);
  CHECK(d.x_names()[1] == "x");
  CHECK(d.z_names()[2] == "z2");
  CHECK(d.pz().rank() == 3);
}

TEST_CASE("names are optional") {
  Toy t = make_toy();
  const weakiv::IVDataset d = weakiv::build_dataset(t.y, t.x, t.z, 1);
  CHECK(d.x_names().empty());
  CHECK(d.z_names().empty());
}

TEST_CASE("row count disagreements are rejected") {
  Toy t = make_toy();
  CHECK_THROWS_AS(weakiv::build_dataset(t.y.head(5), t.x, t.z, 1),
                  weakiv::DimensionMismatch);
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x.topRows(5), t.z, 1),
                  weakiv::DimensionMismatch);
}

TEST_CASE("underidentified systems are rejected") {
  Toy t = make_toy();
  // K < L: drop instruments below the regressor count.
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z.leftCols(1), 1),
                  weakiv::DimensionMismatch);
}

TEST_CASE("too few observations are rejected") {
  Toy t = make_toy();
  // N must exceed K = 3.
  CHECK_THROWS_AS(weakiv::build_dataset(t.y.head(3), t.x.topRows(3),
                                        t.z.topRows(3), 1),
                  weakiv::DimensionMismatch);
}

TEST_CASE("duplicated instrument column is flagged at construction") {
  Toy t = make_toy();
  t.z.col(2) = t.z.col(1);
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z, 1),
                  weakiv::RankDeficientInstruments);
}

TEST_CASE("shared exogenous block must match bit for bit") {
  Toy t = make_toy();
  t.z(0, 0) = 1.0 + 1e-16;  // rounds back to 1.0, still equal
  CHECK_NOTHROW(weakiv::build_dataset(t.y, t.x, t.z, 1));
  t.z(0, 0) = 1.0 + 1e-12;
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z, 1),
                  weakiv::ExogenousMismatch);
}

TEST_CASE("exogenous count is range checked") {
  Toy t = make_toy();
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z, 3),
                  weakiv::DimensionMismatch);
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z, -1),
                  weakiv::DimensionMismatch);
}

TEST_CASE("name vectors must match widths when given") {
  Toy t = make_toy();
  CHECK_THROWS_AS(weakiv::build_dataset(t.y, t.x, t.z, 1, {"just_one"}, {}),
                  weakiv::DimensionMismatch);
  CHECK_THROWS_AS(
      weakiv::build_dataset(t.y, t.x, t.z, 1, {}, {"a", "b"}),
      weakiv::DimensionMismatch);
}

TEST_CASE("structural error from correlation") {
  const auto s = weakiv::StructuralError::from_rho(4.0, 0.25, 0.5);
  CHECK(s.sigma_eps2 == 4.0);
  CHECK(s.sigma_eta2 == 0.25);
  CHECK(s.sigma_eps_eta == doctest::Approx(0.5 * 2.0 * 0.5).epsilon(1e-15));
  CHECK(s.rho == doctest::Approx(0.5).epsilon(1e-12));

  const auto cov = s.covariance();
  CHECK(cov(0, 0) == 4.0);
  CHECK(cov(1, 1) == 0.25);
  CHECK(cov(0, 1) == cov(1, 0));
}

TEST_CASE("structural error roundtrips through the covariance") {
  const auto s = weakiv::StructuralError::from_rho(1.0, 0.91, -0.3);
  const auto back = weakiv::StructuralError::from_covariance(s.covariance());
  CHECK(back.rho == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("degenerate structural errors are rejected") {
  CHECK_THROWS_AS(weakiv::StructuralError::from_rho(0.0, 1.0, 0.1),
                  weakiv::NonpositiveVariance);
  CHECK_THROWS_AS(weakiv::StructuralError::from_rho(1.0, -1.0, 0.1),
                  weakiv::NonpositiveVariance);
  CHECK_THROWS_AS(weakiv::StructuralError::from_rho(1.0, 1.0, 1.5),
                  weakiv::InvalidCovariance);
}

TEST_SUITE_END();
