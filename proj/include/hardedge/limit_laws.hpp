#pragma once

// Limiting laws at the hard edge and the maps that zoom into it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hardedge/errors.hpp"
#include "hardedge/gap_engine.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

/// F_hard(xi) = e^xi for xi <= 0.
inline double f_hard(double xi) {
  detail::require(xi <= 0.0, "f_hard: xi must be <= 0");
  return std::exp(xi);
}

/// F^(l)_hard(xi) = e^xi sum_{k<l} (-xi)^k / k!.
inline double f_hard_order(std::size_t l, double xi) {
  detail::require(l >= 1, "f_hard_order: l must be >= 1");
  detail::require(xi <= 0.0, "f_hard_order: xi must be <= 0");
  const double m = -xi;
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 1; k < l; ++k) {
    term *= m / static_cast<double>(k);
    sum += term;
  }
  return std::exp(xi) * sum;
}

/// Limit CDF of the l-th largest rescaled modulus.
struct LimitLaw {
  std::size_t l = 1;
  double cdf(double xi) const { return f_hard_order(l, xi); }
};

enum class RescalingKind { power, radial };

/// Affine zoom x -> xi = slope * (x - R0) with its inverse. The power kind
/// uses n d (d^{1/(2d)} x - 1) log 4, the radial kind R0 n delta (x - R0) log 4.
class RescalingMap {
 public:
  RescalingMap(RescalingKind kind, long long n, double slope, double offset, double edge)
      : kind_(kind), n_(n), slope_(slope), offset_(offset), edge_(edge) {}

  RescalingKind kind() const { return kind_; }
  long long n() const { return n_; }
  double edge() const { return edge_; }

  double forward(double x) const { return slope_ * x - offset_; }
  double inverse(double xi) const { return (xi + offset_) / slope_; }

 private:
  RescalingKind kind_;
  long long n_;
  double slope_;
  double offset_;
  double edge_;
};

inline RescalingMap make_rescaling(const EnsembleSpec& spec, RescalingKind kind) {
  const double nd = static_cast<double>(spec.n);
  const double log4 = std::log(4.0);
  if (kind == RescalingKind::power) {
    const auto d = spec.potential.power_d();
    detail::require(d.has_value(), "power rescaling requires a power potential");
    const double scale = std::pow(*d, 1.0 / (2.0 * *d));
    return RescalingMap(kind, spec.n, nd * *d * scale * log4, nd * *d * log4, 1.0 / scale);
  }
  const double R0 = spec.drop.R0;
  const double slope = R0 * nd * spec.drop.delta * log4;
  return RescalingMap(kind, spec.n, slope, slope * R0, R0);
}

inline RescalingKind default_rescaling(const EnsembleSpec& spec) {
  return spec.potential.is_power() ? RescalingKind::power : RescalingKind::radial;
}

struct SumDecomposition {
  double S_n = 0.0;   // k in [0, alpha sqrt(n)]
  double eps1 = 0.0;  // k in (alpha sqrt(n), n/2]
  double eps2 = 0.0;  // k in (n/2, n-1]
};

/// Term k of sum_k g_{(n-k)/d}(t + n/d) / P((n-k)/d, n/d), with g the
/// Gamma((n-k)/d, 1) density.
inline double hard_edge_sum_term(long long n, long long k, double d, double t) {
  const double a = static_cast<double>(n - k) / d;
  const double b = static_cast<double>(n) / d;
  const double y = t + b;
  if (y <= 0.0) return 0.0;
  const double log_density = std::log(a / y) + specfun::log_poisson_density(a, y);
  return std::exp(log_density - specfun::log_reg_lower_gamma(a, b));
}

/// Splits the mode sum at k = alpha sqrt(n) and k = n/2. alpha defaults to log n.
inline SumDecomposition hard_edge_sum_decomposition(long long n, double d, double t,
                                                    std::optional<double> alpha = std::nullopt) {
  detail::require(n >= 2, "sum decomposition: n must be >= 2");
  detail::require(d >= 1.0, "sum decomposition: d must be >= 1");
  const double nd = static_cast<double>(n);
  const double al = alpha.value_or(std::log(nd));
  const double cut1 = al * std::sqrt(nd);
  detail::require(cut1 > 0.0 && cut1 < nd / 2.0, "sum decomposition: need 0 < alpha sqrt(n) < n/2");
  detail::require(t <= 0.0 && t + nd / d > 0.0, "sum decomposition: t must lie in (-n/d, 0]");

  std::vector<double> terms(static_cast<std::size_t>(n));
  parallel_for(terms.size(), [&](std::size_t k) {
    terms[k] = hard_edge_sum_term(n, static_cast<long long>(k), d, t);
  });
  const auto k1 = static_cast<std::size_t>(std::floor(cut1)) + 1;  // [0, floor(cut1)]
  const auto k2 = static_cast<std::size_t>(n / 2) + 1;              // (cut1, n/2]
  const std::span<const double> all(terms);
  SumDecomposition out;
  out.S_n = pairwise_sum(all.first(k1));
  out.eps1 = pairwise_sum(all.subspan(k1, k2 - k1));
  out.eps2 = pairwise_sum(all.subspan(k2));
  return out;
}

/// Finite-n CDF of the l-th largest modulus at the rescaled point xi.
inline double rescaled_order_cdf(const EnsembleSpec& spec, const ModeTable& table, const RescalingMap& map,
                                 std::size_t l, double xi) {
  const double x = map.inverse(xi);
  return l == 1 ? gap_cdf(spec, table, x) : order_cdf(spec, table, l, x);
}

/// max over the grid of |finite-n CDF - limit CDF| under the given zoom.
inline double sup_deviation(const EnsembleSpec& spec, const ModeTable& table, const LimitLaw& law,
                            RescalingKind kind, std::span<const double> grid) {
  for (double xi : grid) detail::require(xi <= 0.0, "sup_deviation: grid must lie in (-inf, 0]");
  const auto map = make_rescaling(spec, kind);
  std::vector<double> dev(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    dev[i] = std::abs(rescaled_order_cdf(spec, table, map, law.l, grid[i]) - law.cdf(grid[i]));
  });
  return dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
}

struct ComparisonRow {
  double xi = 0.0;
  double finite_n = 0.0;
  double limit = 0.0;
  double abs_err = 0.0;
};

inline std::vector<ComparisonRow> compare_with_limit(const EnsembleSpec& spec, const ModeTable& table,
                                                     const LimitLaw& law, RescalingKind kind,
                                                     std::span<const double> grid) {
  const auto map = make_rescaling(spec, kind);
  std::vector<ComparisonRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto& row = rows[i];
    row.xi = grid[i];
    row.finite_n = rescaled_order_cdf(spec, table, map, law.l, grid[i]);
    row.limit = law.cdf(grid[i]);
    row.abs_err = std::abs(row.finite_n - row.limit);
  });
  return rows;
}

}  // namespace hardedge
