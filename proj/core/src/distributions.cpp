#include "weakiv/distributions.hpp"

#include <cmath>
#include <limits>

#include "weakiv/errors.hpp"

namespace weakiv {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
// Converges quickly when x < (a + 1) / (a + b + 2); the caller switches to
// the symmetric tail otherwise.
double beta_cf(double a, double b, double x) {
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta continued fraction failed to converge");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// d/dx I_x(a, b) = x^(a-1) (1-x)^(b-1) / B(a, b).
double beta_density(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  log_beta(a, b));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error("incomplete_beta requires a > 0 and b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error("incomplete_beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) -
                                log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw Error("f_cdf requires positive degrees of freedom");
  }
  if (std::isnan(x)) throw Error("f_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  // Written to avoid w -> 1 cancellation for large x.
  const double w = d1 * x / (d1 * x + d2);
  if (w < 0.5) return incomplete_beta(d1 / 2.0, d2 / 2.0, w);
  const double omw = d2 / (d1 * x + d2);
  return 1.0 - incomplete_beta(d2 / 2.0, d1 / 2.0, omw);
}

double f_quantile(double p, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw Error("f_quantile requires positive degrees of freedom");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw Error("f_quantile requires p strictly inside (0, 1)");
  }

  // Invert the beta CDF in w = d1 x / (d1 x + d2), then map back.
  const double a = d1 / 2.0;
  const double b = d2 / 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double w = a / (a + b);  // mean of Beta(a, b)

  for (int it = 0; it < 200; ++it) {
    const double err = incomplete_beta(a, b, w) - p;
    if (err > 0.0) {
      hi = w;
    } else {
      lo = w;
    }
    const double dens = beta_density(a, b, w);
    double next;
    if (dens > 0.0 && std::isfinite(dens)) {
      next = w - err / dens;
    } else {
      next = 0.5 * (lo + hi);
    }
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - w);
    w = next;
    if (step <= 1e-15 * std::max(w, 1e-300) || hi - lo <= 1e-16 * hi) break;
  }

  const double denom = 1.0 - w;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return (d2 * w) / (d1 * denom);
}

}  // namespace weakiv
