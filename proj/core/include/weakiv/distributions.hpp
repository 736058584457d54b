#pragma once

namespace weakiv {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
/// Continued-fraction evaluation, absolute accuracy around 1e-14.
double incomplete_beta(double a, double b, double x);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);

/// Quantile of the F distribution: the x with f_cdf(x, d1, d2) = p,
/// p in (0, 1). Safeguarded Newton inversion, relative accuracy ~1e-12.
double f_quantile(double p, double d1, double d2);

}  // namespace weakiv
