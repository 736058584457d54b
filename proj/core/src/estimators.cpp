#include "weakiv/estimators.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "weakiv/errors.hpp"

namespace weakiv {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double structural_sigma2(const IVDataset& d, const VectorXd& beta) {
  const VectorXd resid = d.y() - d.x() * beta;
  return resid.squaredNorm() / static_cast<double>(d.n() - d.n_regressors());
}

// Rounding can push a covariance diagonal a hair below zero; clamp.
VectorXd se_from_cov(const MatrixXd& cov) {
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

bool full_rank_diag(const Eigen::ColPivHouseholderQR<MatrixXd>& qr, Index p) {
  if (p == 0) return false;
  const VectorXd diag = qr.matrixQR().diagonal().head(p).cwiseAbs();
  if (!diag.allFinite() || diag(0) == 0.0) return false;
  return diag(p - 1) > kRankTolerance * diag(0);
}

// Least squares of b on a plus (a'a)^{-1}, both off one pivoted QR.
struct Lstsq {
  VectorXd beta;
  MatrixXd gram_inverse;
};

std::optional<Lstsq> lstsq_with_gram_inverse(const MatrixXd& a,
                                             const VectorXd& b) {
  const Index p = a.cols();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  if (!full_rank_diag(qr, p)) return std::nullopt;
  Lstsq out;
  out.beta = qr.solve(b);
  // a P = Q R  =>  (a'a)^{-1} = P R^{-1} R^{-T} P'
  const MatrixXd rinv = qr.matrixQR()
                            .topRows(p)
                            .triangularView<Eigen::Upper>()
                            .solve(MatrixXd::Identity(p, p));
  out.gram_inverse = qr.colsPermutation() * (rinv * rinv.transpose()) *
                     qr.colsPermutation().transpose();
  return out;
}

std::optional<MatrixXd> checked_inverse(const MatrixXd& w) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(w);
  if (!full_rank_diag(qr, w.cols())) return std::nullopt;
  return qr.inverse();
}

struct KClassSolve {
  VectorXd beta;
  MatrixXd w_inverse;
};

// beta solving x'(I - kappa M_z) x beta = x'(I - kappa M_z) y, assembled as
// (1-kappa) x'x + kappa x'P_z x so only the thin instrument basis is touched.
std::optional<KClassSolve> solve_kclass(const IVDataset& d, double kappa) {
  const MatrixXd& x = d.x();
  const MatrixXd qtx = d.pz().q().transpose() * x;
  const VectorXd qty = d.pz().q().transpose() * d.y();
  const MatrixXd w =
      (1.0 - kappa) * (x.transpose() * x) + kappa * (qtx.transpose() * qtx);
  const VectorXd rhs =
      (1.0 - kappa) * (x.transpose() * d.y()) + kappa * (qtx.transpose() * qty);
  auto winv = checked_inverse(w);
  if (!winv) return std::nullopt;
  KClassSolve s;
  s.beta = *winv * rhs;
  s.w_inverse = std::move(*winv);
  return s;
}

}  // namespace

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Ols:
      return "ols";
    case Estimator::Tsls:
      return "2sls";
    case Estimator::Liml:
      return "liml";
    case Estimator::Jive:
      return "jive";
    case Estimator::KClass:
      return "kclass";
  }
  return "unknown";
}

std::optional<Estimator> estimator_from_name(std::string_view name) {
  if (name == "ols") return Estimator::Ols;
  if (name == "2sls" || name == "tsls") return Estimator::Tsls;
  if (name == "liml") return Estimator::Liml;
  if (name == "jive") return Estimator::Jive;
  if (name == "kclass" || name == "k-class") return Estimator::KClass;
  return std::nullopt;
}

EstimateResult fit_ols(const IVDataset& d) {
  auto ls = lstsq_with_gram_inverse(d.x(), d.y());
  if (!ls) throw RankDeficientDesign("x does not have full column rank");
  EstimateResult r;
  r.estimator = Estimator::Ols;
  r.beta = std::move(ls->beta);
  r.sigma2_hat = structural_sigma2(d, r.beta);
  r.std_errors = se_from_cov(r.sigma2_hat * ls->gram_inverse);
  return r;
}

EstimateResult fit_2sls(const IVDataset& d) {
  // x'P_z x = (Q'x)'(Q'x); solving the K x L least-squares problem keeps the
  // conditioning of Q'x rather than its square.
  const MatrixXd qtx = d.pz().q().transpose() * d.x();
  const VectorXd qty = d.pz().q().transpose() * d.y();
  auto ls = lstsq_with_gram_inverse(qtx, qty);
  if (!ls) {
    throw WeakRankFailure(
        "x'P_z x is numerically singular; the 2SLS estimate does not exist");
  }
  EstimateResult r;
  r.estimator = Estimator::Tsls;
  r.beta = std::move(ls->beta);
  r.sigma2_hat = structural_sigma2(d, r.beta);
  r.std_errors = se_from_cov(r.sigma2_hat * ls->gram_inverse);
  r.fitted_instrument = d.pz().q() * qtx;  // P_z x
  return r;
}

EstimateResult fit_jive(const IVDataset& d, JiveMethod method) {
  const Index n = d.n();
  const Index l = d.n_regressors();
  const Index l1 = d.n_endog();

  if (qr_rank(d.x()) < l) {
    throw RankDeficientDesign("x does not have full column rank");
  }
  const VectorXd& h = d.pz().leverages();
  for (Index i = 0; i < n; ++i) {
    if (h(i) >= 1.0 - 1e-10) {
      throw LeverageOne("observation " + std::to_string(i) +
                        " has leverage 1; leave-one-out fit undefined");
    }
  }

  // Exogenous columns pass through; only the endogenous block is refit.
  MatrixXd xhat = d.x();
  if (l1 > 0) {
    const MatrixXd x1 = d.x().rightCols(l1);
    if (method == JiveMethod::Accelerated) {
      const MatrixXd num = d.pz().apply(x1) - h.asDiagonal() * x1;
      xhat.rightCols(l1) = num.array().colwise() / (1.0 - h.array());
    } else {
      MatrixXd zdrop(n - 1, d.n_instruments());
      MatrixXd x1drop(n - 1, l1);
      for (Index i = 0; i < n; ++i) {
        zdrop.topRows(i) = d.z().topRows(i);
        zdrop.bottomRows(n - 1 - i) = d.z().bottomRows(n - 1 - i);
        x1drop.topRows(i) = x1.topRows(i);
        x1drop.bottomRows(n - 1 - i) = x1.bottomRows(n - 1 - i);
        const MatrixXd pi = zdrop.colPivHouseholderQr().solve(x1drop);
        xhat.row(i).tail(l1) = d.z().row(i) * pi;
      }
    }
  }

  const MatrixXd g = xhat.transpose() * d.x();
  auto ginv = checked_inverse(g);
  if (!ginv) throw RankDeficientDesign("x-hat' x is numerically singular");

  EstimateResult r;
  r.estimator = Estimator::Jive;
  r.beta = *ginv * (xhat.transpose() * d.y());
  r.sigma2_hat = structural_sigma2(d, r.beta);
  const MatrixXd cov =
      r.sigma2_hat * (*ginv) * (xhat.transpose() * xhat) * ginv->transpose();
  r.std_errors = se_from_cov(cov);
  r.fitted_instrument = std::move(xhat);
  return r;
}

EstimateResult fit_liml(const IVDataset& d) {
  const Index m = d.n_exog();
  const Index l1 = d.n_endog();

  MatrixXd ystar(d.n(), 1 + l1);
  ystar.col(0) = d.y();
  if (l1 > 0) ystar.rightCols(l1) = d.x().rightCols(l1);

  // Gram matrices of the annihilated blocks; forming them as squares of
  // residuals keeps them exactly symmetric PSD.
  const MatrixXd mz_ystar = d.pz().annihilate(ystar);
  const MatrixXd b = mz_ystar.transpose() * mz_ystar;
  const Projector p_exog(d.x().leftCols(m));
  const MatrixXd mx0_ystar = p_exog.annihilate(ystar);
  const MatrixXd a = mx0_ystar.transpose() * mx0_ystar;

  Eigen::SelfAdjointEigenSolver<MatrixXd> bes(b);
  const VectorXd beig = bes.eigenvalues();  // ascending
  const double bmax = beig(beig.size() - 1);
  // Scale-aware PD check: the annihilated component must be nonzero relative
  // to the data, not merely relative to its own largest eigenvalue.
  if (!(bmax > 0.0) || bmax <= 1e-13 * ystar.squaredNorm() ||
      beig(0) <= 1e-12 * bmax) {
    throw SingularGram("y*'M_z y* is not numerically positive definite");
  }

  const MatrixXd b_inv_sqrt = bes.eigenvectors() *
                              beig.cwiseSqrt().cwiseInverse().asDiagonal() *
                              bes.eigenvectors().transpose();
  const MatrixXd c_raw = b_inv_sqrt * a * b_inv_sqrt;
  const MatrixXd c = 0.5 * (c_raw + c_raw.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> ces(c);
  const double kappa = ces.eigenvalues()(0);
  if (!(kappa >= 1.0 - 1e-10)) {
    throw SingularGram("variance-ratio eigenvalue below 1; instruments and "
                       "exogenous block are inconsistent");
  }

  auto s = solve_kclass(d, kappa);
  if (!s) throw SingularGram("liml coefficient solve is singular");

  EstimateResult r;
  r.estimator = Estimator::Liml;
  r.beta = std::move(s->beta);
  r.kappa = kappa;
  r.sigma2_hat = structural_sigma2(d, r.beta);
  r.std_errors = se_from_cov(r.sigma2_hat * s->w_inverse);
  return r;
}

EstimateResult fit_kclass(const IVDataset& d, const KClassSpec& spec) {
  if (!(spec.kappa >= 0.0)) {
    throw Error("k-class kappa must be nonnegative");
  }
  auto s = solve_kclass(d, spec.kappa);
  if (!s) throw RankDeficientDesign("k-class normal equations are singular");
  EstimateResult r;
  r.estimator = Estimator::KClass;
  r.beta = std::move(s->beta);
  r.kappa = spec.kappa;
  r.sigma2_hat = structural_sigma2(d, r.beta);
  r.std_errors = se_from_cov(r.sigma2_hat * s->w_inverse);
  return r;
}

EstimateResult fit(const IVDataset& d, Estimator which) {
  switch (which) {
    case Estimator::Ols:
      return fit_ols(d);
    case Estimator::Tsls:
      return fit_2sls(d);
    case Estimator::Liml:
      return fit_liml(d);
    case Estimator::Jive:
      return fit_jive(d);
    case Estimator::KClass:
      throw Error("k-class dispatch needs an explicit kappa; call fit_kclass");
  }
  throw Error("unknown estimator tag");
}

}  // namespace weakiv
