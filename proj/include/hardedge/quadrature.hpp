#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hardedge/errors.hpp"

namespace hardedge::quadrature {

inline constexpr int kGaussOrder = 20;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};    // on [-1, 1]
  std::array<double, kGaussOrder> weights{};
};

/// 20-point Gauss-Legendre rule, built once by Newton iteration on P_20.
inline const GaussRule& gauss_legendre() {
  static const GaussRule rule = [] {
    GaussRule g;
    constexpr int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      g.nodes[i] = x;
      g.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
  }();
  return rule;
}

/// Composite Gauss-Legendre sum of exp(log_f(r) - shift) over [lo, hi] with
/// `panels` equal panels.
template <class LogF>
double composite_exp(const LogF& log_f, double shift, double lo, double hi, int panels) {
  const auto& g = gauss_legendre();
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) s += g.weights[i] * std::exp(log_f(mid + 0.5 * h * g.nodes[i]) - shift);
    total += 0.5 * h * s;
  }
  return total;
}

/// Adaptive panel doubling on one segment until two successive estimates
/// agree to abs_tol.
template <class LogF>
double integrate_segment(const LogF& log_f, double shift, double lo, double hi, double abs_tol,
                         int max_panels = 4096) {
  if (!(hi > lo)) return 0.0;
  int panels = 1;
  double prev = composite_exp(log_f, shift, lo, hi, panels);
  while (true) {
    panels *= 2;
    const double cur = composite_exp(log_f, shift, lo, hi, panels);
    if (std::abs(cur - prev) <= abs_tol) return cur;
    if (panels >= max_panels)
      throw NumericalError("quadrature did not converge on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    prev = cur;
  }
}

/// Integral of exp(log_f - shift) over [lo, hi] split at the given sorted
/// breakpoints (those outside (lo, hi) are ignored).
template <class LogF>
double integrate_split(const LogF& log_f, double shift, double lo, double hi, std::span<const double> breaks,
                       double abs_tol) {
  double total = 0.0;
  double a = lo;
  for (double b : breaks) {
    if (b <= a) continue;
    if (b >= hi) break;
    total += integrate_segment(log_f, shift, a, b, abs_tol);
    a = b;
  }
  total += integrate_segment(log_f, shift, a, hi, abs_tol);
  return total;
}

}  // namespace hardedge::quadrature
