#pragma once

// Exact finite-n distributions for hard-edge radial ensembles.
//
// For a radial potential the orthonormal polynomials are monomials, so the
// gap probability factorizes over modes:
//
//   P[max |z_j| <= x] = prod_{j<n} (1 - x_{n,j}(x)),
//   x_{n,j}(x) = int_x^{R0} r^{2j+1} e^{-nQ} dr / int_{r0}^{R0} r^{2j+1} e^{-nQ} dr.
//
// The same overlaps are the success probabilities of independent Bernoulli
// indicators "mode j lies beyond x", which gives the order statistics as a
// Poisson-binomial law.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/errors.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/potential.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

/// Which route computes per-mode norms and overlaps.
enum class ModePath {
  automatic,   // closed form (incomplete gamma) for power potentials, quadrature otherwise
  quadrature,  // always the saddle-centered quadrature kernel
};

struct EnsembleSpec {
  RadialPotential potential;
  long long n = 1;
  Droplet drop;
  bool closed_form = false;
};

inline EnsembleSpec make_ensemble(RadialPotential potential, long long n, ModePath path = ModePath::automatic) {
  detail::require(n >= 1, "ensemble size n must be positive");
  Droplet drop = droplet(potential);
  const bool closed = path == ModePath::automatic && potential.is_power();
  if (closed) drop.r0 = 0.0;
  return EnsembleSpec{std::move(potential), n, drop, closed};
}

/// Per-mode data, indexed by the monomial degree j (k = n - 1 - j).
struct ModeTable {
  long long n = 0;
  bool closed_form = false;
  std::vector<double> log_norm;   // log int_{r0}^{R0} r^{2j} e^{-nQ} 2r dr
  std::vector<double> saddle;     // t_k
  std::vector<double> width;      // 1 / sqrt(n Laplacian(Q)(t_k))
  std::vector<double> log_peak;   // log of the integrand 2 r^{2j+1} e^{-nQ} at t_k
  std::vector<double> lower_fraction;  // closed form only: P((j+1)/d, n/d)
  /// norm / (sqrt(2 pi) * width * peak): 1 for a perfectly Gaussian mode,
  /// about 1/2 for a mode cut in half by the hard edge.
  std::vector<double> laplace_ratio;

  std::size_t modes() const { return log_norm.size(); }
};

namespace detail {

inline double mode_log_integrand(const EnsembleSpec& spec, std::size_t j, double r) {
  return std::numbers::ln2 + static_cast<double>(2 * j + 1) * std::log(r) -
         static_cast<double>(spec.n) * spec.potential.q(r);
}

inline constexpr int kSaddleBands = 6;

inline std::vector<double> mode_breakpoints(const EnsembleSpec& spec, double t, double w) {
  std::vector<double> breaks;
  breaks.reserve(2 * kSaddleBands + 1);
  for (int m = -kSaddleBands; m <= kSaddleBands; ++m) {
    const double b = t + m * w;
    if (b > spec.drop.r0 && b < spec.drop.R0) breaks.push_back(b);
  }
  return breaks;
}

inline double mode_tolerance(double w) { return 1e-13 * w; }

inline double mode_width(const EnsembleSpec& spec, double t) {
  const double span = spec.drop.R0 - spec.drop.r0;
  const double curvature = static_cast<double>(spec.n) * spec.potential.lap(t);
  const double w = curvature > 0.0 ? 1.0 / std::sqrt(curvature) : span;
  return std::isfinite(w) ? std::min(w, span) : span;
}

inline void check_table(const EnsembleSpec& spec, const ModeTable& table) {
  if (table.n != spec.n || table.modes() != static_cast<std::size_t>(spec.n) ||
      table.closed_form != spec.closed_form)
    throw InvalidArgument("mode table does not belong to this ensemble");
}

}  // namespace detail

inline ModeTable build_mode_table(const EnsembleSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.n);
  ModeTable table;
  table.n = spec.n;
  table.closed_form = spec.closed_form;
  table.log_norm.resize(n);
  table.saddle.resize(n);
  table.width.resize(n);
  table.log_peak.resize(n);
  table.laplace_ratio.resize(n);
  if (spec.closed_form) table.lower_fraction.resize(n);

  const double nd = static_cast<double>(spec.n);
  parallel_for(n, [&](std::size_t j) {
    const auto k = static_cast<long long>(n - 1 - j);
    const double t = saddle_tk(spec.potential, spec.drop, spec.n, k).value_or(spec.drop.r0);
    const double w = detail::mode_width(spec, t);
    table.saddle[j] = t;
    table.width[j] = w;
    table.log_peak[j] = t > 0.0 ? detail::mode_log_integrand(spec, j, t) : 0.0;

    if (spec.closed_form) {
      const double d = *spec.potential.power_d();
      const double a = static_cast<double>(j + 1) / d;
      const double b = nd / d;
      const double lower = specfun::reg_lower_gamma(a, b);
      table.lower_fraction[j] = lower;
      table.log_norm[j] = std::log(lower) + specfun::log_gamma(a) - std::log(d) - a * std::log(nd);
    } else {
      const auto log_f = [&](double r) { return detail::mode_log_integrand(spec, j, r); };
      const auto breaks = detail::mode_breakpoints(spec, t, w);
      double mass = 0.0;
      try {
        mass = quadrature::integrate_split(log_f, table.log_peak[j], spec.drop.r0, spec.drop.R0, breaks,
                                           detail::mode_tolerance(w));
      } catch (const NumericalError& e) {
        throw NumericalError("mode norm j = " + std::to_string(j) + ": " + e.what());
      }
      table.log_norm[j] = std::log(mass) + table.log_peak[j];
    }
    table.laplace_ratio[j] =
        std::exp(table.log_norm[j] - table.log_peak[j]) / (std::sqrt(2.0 * std::numbers::pi) * w);
  });
  return table;
}

/// Probability mass of mode j beyond radius x.
inline double overlap_mode(const EnsembleSpec& spec, const ModeTable& table, std::size_t j, double x) {
  if (x <= spec.drop.r0) return 1.0;
  if (x >= spec.drop.R0) return 0.0;
  if (spec.closed_form) {
    const double d = *spec.potential.power_d();
    const double nd = static_cast<double>(spec.n);
    const double a = static_cast<double>(j + 1) / d;
    const double b = nd / d;
    const double y = std::min(b, nd * std::pow(x, 2.0 * d));
    const double tail = specfun::reg_gamma_interval(a, y, b);
    return std::clamp(tail / table.lower_fraction[j], 0.0, 1.0);
  }
  const double t = table.saddle[j];
  const double shift = table.log_peak[j];
  const auto log_f = [&](double r) { return detail::mode_log_integrand(spec, j, r); };
  // The integrand is unimodal with its peak at t; skip tails that underflow.
  if (log_f(std::max(x, t)) - shift < -745.0) return 0.0;
  const double w = table.width[j];
  const auto breaks = detail::mode_breakpoints(spec, t, w);
  double tail = 0.0;
  try {
    tail = quadrature::integrate_split(log_f, shift, x, spec.drop.R0, breaks, detail::mode_tolerance(w));
  } catch (const NumericalError& e) {
    throw NumericalError("mode tail j = " + std::to_string(j) + ": " + e.what());
  }
  return std::clamp(tail * std::exp(shift - table.log_norm[j]), 0.0, 1.0);
}

/// x_{n,k}: the overlap of mode j = n - 1 - k beyond x.
inline double overlap_xnk(const EnsembleSpec& spec, const ModeTable& table, long long k, double x) {
  detail::check_table(spec, table);
  detail::require(k >= 0 && k < spec.n, "overlap_xnk: k outside [0, n-1]");
  return overlap_mode(spec, table, static_cast<std::size_t>(spec.n - 1 - k), x);
}

/// All overlaps x_{n,j}(x), indexed by j.
inline std::vector<double> overlaps(const EnsembleSpec& spec, const ModeTable& table, double x) {
  detail::check_table(spec, table);
  std::vector<double> out(table.modes());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = overlap_mode(spec, table, j, x);
  return out;
}

/// prod_j (1 - x_j), evaluated as exp(sum log1p(-x_j)) with a fixed summation tree.
inline double product_of_complements(std::span<const double> xs) {
  std::vector<double> logs(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (xs[j] >= 1.0) return 0.0;
    logs[j] = std::log1p(-xs[j]);
  }
  return std::exp(pairwise_sum(logs));
}

/// P_n[|z|_n <= x].
inline double gap_cdf(const EnsembleSpec& spec, const ModeTable& table, double x) {
  detail::check_table(spec, table);
  if (x <= spec.drop.r0) return 0.0;
  if (x >= spec.drop.R0) return 1.0;
  const auto xs = overlaps(spec, table, x);
  return product_of_complements(xs);
}

/// Radius R0 + xi / (n C0) of the radial edge zoom.
inline double radial_edge_point(const EnsembleSpec& spec, double xi) {
  return spec.drop.R0 + xi / (static_cast<double>(spec.n) * spec.drop.C0);
}

/// F_n(xi) = gap_cdf at x = R0 + xi / (n C0), xi <= 0.
inline double rescaled_gap_cdf(const EnsembleSpec& spec, const ModeTable& table, double xi) {
  detail::require(xi <= 0.0, "rescaled_gap_cdf: xi must be <= 0");
  const double x = radial_edge_point(spec, xi);
  if (const auto d = spec.potential.power_d()) {
    const double x_power =
        std::pow(1.0 / *d, 1.0 / (2.0 * *d)) * (1.0 + xi / (*d * static_cast<double>(spec.n) * std::log(4.0)));
    if (std::abs(x - x_power) > 1e-10 * std::max(1.0, std::abs(x)))
      throw std::logic_error("radial and power edge parametrizations disagree");
  }
  return gap_cdf(spec, table, x);
}

/// Poisson-binomial pmf of the number of successes among independent
/// Bernoulli(probs[j]), truncated to counts 0..kmax.
inline std::vector<double> poisson_binomial(std::span<const double> probs, std::size_t kmax) {
  std::vector<double> pmf(kmax + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t top = 0;
  for (double p : probs) {
    top = std::min(top + 1, kmax);
    for (std::size_t k = top; k > 0; --k) pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

/// Default truncation of the order-statistic counts.
inline std::size_t default_kmax(const EnsembleSpec& spec) {
  return static_cast<std::size_t>(std::min<long long>(spec.n, 64));
}

/// p_{n,k}(x) = P[exactly k moduli exceed x], k = 0..kmax (default min(n, 64)).
/// Entry 0 is the log-space gap probability.
inline std::vector<double> order_counts(const EnsembleSpec& spec, const ModeTable& table, double x,
                                        std::optional<std::size_t> kmax = std::nullopt) {
  detail::check_table(spec, table);
  const std::size_t top = std::min<std::size_t>(kmax.value_or(default_kmax(spec)), table.modes());
  if (x <= spec.drop.r0) {
    std::vector<double> pmf(top + 1, 0.0);
    if (top == table.modes()) pmf[top] = 1.0;
    return pmf;
  }
  const auto xs = overlaps(spec, table, x);
  auto pmf = poisson_binomial(xs, top);
  pmf[0] = x >= spec.drop.R0 ? 1.0 : product_of_complements(xs);
  return pmf;
}

/// P_n[|z|^{(l)}_n <= x] = sum_{k<l} p_{n,k}(x).
inline double order_cdf(const EnsembleSpec& spec, const ModeTable& table, std::size_t l, double x) {
  detail::require(l >= 1 && l <= default_kmax(spec), "order_cdf: l outside [1, min(n, 64)]");
  // Every modulus exceeds r0 almost surely, so no order statistic lies below it.
  if (x <= spec.drop.r0) return 0.0;
  if (x >= spec.drop.R0) return 1.0;
  const auto pmf = order_counts(spec, table, x, l - 1);
  double s = 0.0;
  for (double p : pmf) s += p;
  return std::min(1.0, s);
}

/// One-point function of the hard-edge Ginibre ensemble (Q = |z|^2 on the
/// unit disk), R_n(r) = sum_j n (n r^2)^j e^{-n r^2} / (j! P(j+1, n)).
class GinibreIntensity {
 public:
  explicit GinibreIntensity(long long n) : n_(n) {
    detail::require(n >= 1, "ginibre intensity: n must be positive");
    log_lower_.resize(static_cast<std::size_t>(n));
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j < log_lower_.size(); ++j)
      log_lower_[j] = std::log(specfun::reg_lower_gamma(static_cast<double>(j + 1), nd));
  }

  long long n() const { return n_; }

  /// R_n(r) for 0 <= r <= 1.
  double operator()(double r) const {
    detail::require(r >= 0.0 && r <= 1.0, "ginibre intensity: r outside [0, 1]");
    const double nd = static_cast<double>(n_);
    const double mu = nd * r * r;
    std::vector<double> terms(log_lower_.size());
    for (std::size_t j = 0; j < terms.size(); ++j)
      terms[j] = std::exp(specfun::log_poisson_density(static_cast<double>(j), mu) - log_lower_[j]);
    return nd * pairwise_sum(terms);
  }

  /// (1/n) R_n(1 + zeta / sqrt(n)).
  double rescaled(double zeta) const {
    detail::require(zeta <= 0.0, "ginibre intensity: zeta must be <= 0");
    const double r = 1.0 + zeta / std::sqrt(static_cast<double>(n_));
    detail::require(r > 0.0, "ginibre intensity: 1 + zeta/sqrt(n) must be positive");
    return (*this)(r) / static_cast<double>(n_);
  }

 private:
  long long n_;
  std::vector<double> log_lower_;
};

inline double ginibre_rescaled_intensity(long long n, double zeta) { return GinibreIntensity(n).rescaled(zeta); }

struct LogProductLinearization {
  double sum_log1p_neg = 0.0;  // sum log(1 - x_j)
  double neg_sum = 0.0;        // -sum x_j
  double discrepancy = 0.0;    // |difference|
};

/// Compares sum log(1 - x_j) against its linearization -sum x_j.
inline LogProductLinearization log_product_linearization(std::span<const double> xs) {
  std::vector<double> logs(xs.size());
  std::vector<double> negs(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    detail::require(xs[j] >= 0.0 && xs[j] < 1.0, "log_product_linearization: element outside [0, 1)");
    logs[j] = std::log1p(-xs[j]);
    negs[j] = -xs[j];
  }
  LogProductLinearization out;
  out.sum_log1p_neg = pairwise_sum(logs);
  out.neg_sum = pairwise_sum(negs);
  out.discrepancy = std::abs(out.sum_log1p_neg - out.neg_sum);
  return out;
}

enum class TableKind { gap, order, rescaled_gap, rescaled_order };

/// Sampled CDF on an increasing grid of x (raw) or xi (rescaled) values.
struct DistributionTable {
  TableKind kind = TableKind::gap;
  std::size_t l = 1;  // order, for the order kinds
  std::string potential;
  long long n = 0;
  std::vector<double> grid;
  std::vector<double> probs;

  std::string kind_name() const {
    switch (kind) {
      case TableKind::gap: return "gap";
      case TableKind::order: return "order(" + std::to_string(l) + ")";
      case TableKind::rescaled_gap: return "rescaled-gap";
      case TableKind::rescaled_order: return "rescaled-order(" + std::to_string(l) + ")";
    }
    return "unknown";
  }
};

/// Tabulates the gap (l = 1) or l-th order CDF on a grid, raw x or rescaled
/// xi. Points are evaluated in parallel; each is a deterministic function of
/// its abscissa.
inline DistributionTable tabulate(const EnsembleSpec& spec, const ModeTable& table, std::span<const double> grid,
                                  bool rescaled, std::size_t l = 1) {
  detail::require(std::is_sorted(grid.begin(), grid.end()), "grid must be increasing");
  DistributionTable out;
  out.kind = l == 1 ? (rescaled ? TableKind::rescaled_gap : TableKind::gap)
                    : (rescaled ? TableKind::rescaled_order : TableKind::order);
  out.l = l;
  out.potential = spec.potential.descriptor();
  out.n = spec.n;
  out.grid.assign(grid.begin(), grid.end());
  out.probs.resize(grid.size());
  if (rescaled)
    for (double xi : grid) detail::require(xi <= 0.0, "rescaled grid must lie in (-inf, 0]");
  parallel_for(grid.size(), [&](std::size_t i) {
    if (rescaled && l == 1) {
      out.probs[i] = rescaled_gap_cdf(spec, table, grid[i]);
      return;
    }
    const double x = rescaled ? radial_edge_point(spec, grid[i]) : grid[i];
    out.probs[i] = l == 1 ? gap_cdf(spec, table, x) : order_cdf(spec, table, l, x);
  });
  return out;
}

}  // namespace hardedge
