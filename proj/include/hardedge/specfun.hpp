#pragma once

// Special functions used by the exact and asymptotic edge formulas:
// log-gamma, the regularized incomplete gamma pair P/Q, the standard normal
// CDF, the hard-edge plasma function H, and the normal/Edgeworth
// approximations to the Gamma((n-k)/d, 1) law evaluated at n/d.
//
// Everything is evaluated in log space where magnitudes can leave the double
// range; gamma(a, x) and Gamma(a) are never formed separately.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "hardedge/errors.hpp"

namespace hardedge::specfun {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2*pi)
inline constexpr double kLogSqrt2Pi = 0.5 * kLog2Pi;

namespace detail {

// log(k!) for k = 0..20, exact to double precision.
inline constexpr std::array<double, 21> kLogFactorial = {
    0.0,
    0.0,
    0.69314718055994530942,
    1.79175946922805500081,
    3.17805383034794561965,
    4.78749174278204599425,
    6.57925121201010099506,
    8.52516136106541430017,
    10.6046029027452502284,
    12.8018274800814696112,
    15.1044125730755152952,
    17.5023078458738858393,
    19.9872144956618861495,
    22.5521638531234228856,
    25.1912211827386815001,
    27.8992713838408915661,
    30.6718601060806728038,
    33.5050734501368888840,
    36.3954452080330535762,
    39.3398841871994940362,
    42.3356164607534850297,
};

// Stirling correction log Gamma(a) - [(a - 1/2) log a - a + log sqrt(2 pi)],
// asymptotic series, accurate to ~1e-17 for a >= 10.
inline double stirling_tail(double a) {
  const double r = 1.0 / a;
  const double r2 = r * r;
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 +
                                r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))));
}

}  // namespace detail

/// Natural log of Gamma(a) for a > 0.
inline double log_gamma(double a) {
  hardedge::detail::require(a > 0.0 && std::isfinite(a), "log_gamma: argument must be positive and finite");
  if (a == std::floor(a) && a <= 21.0) return detail::kLogFactorial[static_cast<std::size_t>(a) - 1];
  if (a >= 10.0) return (a - 0.5) * std::log(a) - a + kLogSqrt2Pi + detail::stirling_tail(a);
  // Shift up into the Stirling range: Gamma(a) = Gamma(a + m) / prod_{i<m}(a + i).
  double shifted = a;
  double prod = 1.0;
  while (shifted < 10.0) {
    prod *= shifted;
    shifted += 1.0;
  }
  return (shifted - 0.5) * std::log(shifted) - shifted + kLogSqrt2Pi + detail::stirling_tail(shifted) -
         std::log(prod);
}

/// log Gamma(a + 1) - [(a + 1/2) log a - a + log sqrt(2 pi)], the Stirling
/// remainder used by the Poisson-type density below.
inline double stirling_error(double a) {
  if (a > 15.0) {
    return detail::stirling_tail(a);
  }
  return log_gamma(a + 1.0) - (a + 0.5) * std::log(a) + a - kLogSqrt2Pi;
}

/// a*log(a/x) + x - a, evaluated without cancellation when a ~ x.
inline double deviance_term(double a, double x) {
  if (std::abs(a - x) < 0.1 * (a + x)) {
    const double v = (a - x) / (a + x);
    double s = (a - x) * v;
    double ej = 2.0 * a * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return a * std::log(a / x) + x - a;
}

/// log of x^a e^{-x} / Gamma(a + 1) for a >= 0, x >= 0 (the Poisson pmf
/// generalized to real a). Returns -inf where the value is exactly zero.
inline double log_poisson_density(double a, double x) {
  hardedge::detail::require(a >= 0.0 && x >= 0.0, "log_poisson_density: arguments must be nonnegative");
  if (x == 0.0) return a == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (a == 0.0) return -x;
  if (!std::isfinite(x)) return -std::numeric_limits<double>::infinity();
  return -stirling_error(a) - deviance_term(a, x) - 0.5 * (kLog2Pi + std::log(a));
}

inline double poisson_density(double a, double x) { return std::exp(log_poisson_density(a, x)); }

namespace detail {

inline constexpr int kMaxIterations = 10'000'000;

// sum_{k>=0} x^k / ((a+1)...(a+k)); P(a, x) = D(a, x) * series.
inline double lower_series(double a, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * 1e-17) return sum;
  }
  throw NumericalError("reg_lower_gamma: series did not converge");
}

// Continued fraction for Q(a, x) / (x^a e^{-x} / Gamma(a)), modified Lentz.
inline double upper_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return h;
  }
  throw NumericalError("reg_upper_gamma: continued fraction did not converge");
}

inline void check_gamma_args(double a, double x) {
  hardedge::detail::require(a > 0.0 && std::isfinite(a), "incomplete gamma: a must be positive and finite");
  hardedge::detail::require(x >= 0.0 && !std::isnan(x), "incomplete gamma: x must be nonnegative");
}

}  // namespace detail

/// log P(a, x), P = gamma(a, x) / Gamma(a). Stays finite when P underflows.
inline double log_reg_lower_gamma(double a, double x) {
  detail::check_gamma_args(a, x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (!std::isfinite(x)) return 0.0;
  if (x < a + 1.0) return log_poisson_density(a, x) + std::log(detail::lower_series(a, x));
  const double q = a * poisson_density(a, x) * detail::upper_fraction(a, x);
  return std::log1p(-q);
}

/// Regularized lower incomplete gamma P(a, x). Series for x < a + 1,
/// continued fraction for the complement.
inline double reg_lower_gamma(double a, double x) {
  detail::check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  if (x < a + 1.0) return poisson_density(a, x) * detail::lower_series(a, x);
  return 1.0 - a * poisson_density(a, x) * detail::upper_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double reg_upper_gamma(double a, double x) {
  detail::check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (!std::isfinite(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - poisson_density(a, x) * detail::lower_series(a, x);
  return a * poisson_density(a, x) * detail::upper_fraction(a, x);
}

/// P(a, hi) - P(a, lo) for 0 <= lo <= hi, taken from whichever tail keeps
/// both terms small so the difference does not cancel.
inline double reg_gamma_interval(double a, double lo, double hi) {
  hardedge::detail::require(lo <= hi, "reg_gamma_interval: lo > hi");
  if (lo == hi) return 0.0;
  if (lo >= a) return reg_upper_gamma(a, lo) - reg_upper_gamma(a, hi);
  return reg_lower_gamma(a, hi) - reg_lower_gamma(a, lo);
}

/// Standard normal CDF via erfc.
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// log(1 - Phi(x)), with an asymptotic Mills-ratio expansion once erfc underflows.
inline double log_normal_upper_tail(double x) {
  if (x < 0.0) return std::log1p(-std_normal_cdf(x));
  if (x < 30.0) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double r = 1.0 / (x * x);
  const double series = r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 - 945.0 * r))));
  return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log1p(series);
}

/// Hard-edge plasma function H(x) = -log(1 - Phi(x)); H(0) = log 2.
inline double plasma_H(double x) { return -log_normal_upper_tail(x); }

enum class ApproxMethod { exact, clt, edgeworth };

inline std::string to_string(ApproxMethod m) {
  switch (m) {
    case ApproxMethod::exact: return "exact";
    case ApproxMethod::clt: return "clt";
    case ApproxMethod::edgeworth: return "edgeworth";
  }
  return "unknown";
}

struct GammaApproxResult {
  double value = 0.0;
  ApproxMethod method = ApproxMethod::exact;
  std::optional<double> estimated_error;  // empty when unknown
};

/// Lower bound on how far k may approach n in the normal approximations.
inline constexpr double kApproxEpsilon = 1e-3;

namespace detail {

inline void check_approx_args(long long n, long long k, double d) {
  hardedge::detail::require(n >= 1, "gamma approximation: n must be positive");
  hardedge::detail::require(d >= 1.0, "gamma approximation: d must be >= 1");
  hardedge::detail::require(k >= 0 && static_cast<double>(k) < (1.0 - kApproxEpsilon) * static_cast<double>(n),
                            "gamma approximation: k outside [0, (1 - eps) n)");
}

}  // namespace detail

/// Normal approximation Phi(k / sqrt((n-k) d)) to P((n-k)/d, n/d).
inline GammaApproxResult gamma_cdf_clt(long long n, long long k, double d) {
  detail::check_approx_args(n, k, d);
  const double z = static_cast<double>(k) / std::sqrt(static_cast<double>(n - k) * d);
  return {std_normal_cdf(z), ApproxMethod::clt, 1.0 / std::sqrt(static_cast<double>(n))};
}

/// First Edgeworth coefficient for the Gamma family in the c/sqrt(n) form:
/// skewness/6 = (1/3) sqrt(d/(n-k)) ~ (sqrt(d)/3) / sqrt(n) for k << n.
inline double default_edgeworth_coefficient(double d) { return std::sqrt(d) / 3.0; }

/// Edgeworth approximation to the Gamma((n-k)/d, 1) density at t + n/d.
/// Pass c = 0 for the plain local-CLT density.
inline GammaApproxResult gamma_pdf_edgeworth(long long n, long long k, double d, double t,
                                             std::optional<double> c = std::nullopt) {
  detail::check_approx_args(n, k, d);
  const double coef = c.value_or(default_edgeworth_coefficient(d));
  const double m = static_cast<double>(n - k);
  const double z = (t * d + static_cast<double>(k)) / std::sqrt(m * d);
  const double h3 = z * z * z - 3.0 * z;
  const double value = std::sqrt(d / m) * std::exp(-0.5 * z * z - kLogSqrt2Pi) *
                       (1.0 + coef / std::sqrt(static_cast<double>(n)) * h3);
  return {value, coef == 0.0 ? ApproxMethod::clt : ApproxMethod::edgeworth, std::nullopt};
}

/// Exact Gamma(a, 1) density at y, from the log-space Poisson form.
inline double gamma_density(double a, double y) {
  hardedge::detail::require(a > 0.0 && y >= 0.0, "gamma_density: domain");
  if (y == 0.0) return a == 1.0 ? 1.0 : (a < 1.0 ? std::numeric_limits<double>::infinity() : 0.0);
  // y^{a-1} e^{-y} / Gamma(a) = (a / y) * y^a e^{-y} / Gamma(a + 1)
  return std::exp(std::log(a / y) + log_poisson_density(a, y));
}

}  // namespace hardedge::specfun
