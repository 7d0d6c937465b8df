#pragma once

// Radially symmetric potentials Q(r), their droplet geometry and the
// per-mode effective potentials V_k(r) = Q(r) - (2 - (2k+1)/n) log r.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hardedge/errors.hpp"

namespace hardedge {

/// Q(r) = r^{2d}, d >= 1.
struct PowerFamily {
  double d = 1.0;
};

/// Q(r) = sum_j c_j r^{2j}; c_j >= 0 for j >= 1, c_0 any sign.
struct EvenPolyFamily {
  std::vector<double> coeffs;
};

using PotentialFamily = std::variant<PowerFamily, EvenPolyFamily>;

class RadialPotential {
 public:
  double q(double r) const {
    if (const auto* p = std::get_if<PowerFamily>(&family_)) return std::pow(r, 2.0 * p->d);
    const auto& c = std::get<EvenPolyFamily>(family_).coeffs;
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::pow(r, 2.0 * static_cast<double>(j));
    return s;
  }

  /// Q'(r).
  double dq(double r) const {
    if (const auto* p = std::get_if<PowerFamily>(&family_)) return (2.0 * p->d) * std::pow(r, 2.0 * p->d - 1.0);
    const auto& c = std::get<EvenPolyFamily>(family_).coeffs;
    double s = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double jj = static_cast<double>(j);
      s += (2.0 * jj * c[j]) * std::pow(r, 2.0 * jj - 1.0);
    }
    return s;
  }

  /// Laplacian (r Q'(r))' / r.
  double lap(double r) const {
    if (const auto* p = std::get_if<PowerFamily>(&family_))
      return (4.0 * p->d * p->d) * std::pow(r, 2.0 * p->d - 2.0);
    const auto& c = std::get<EvenPolyFamily>(family_).coeffs;
    double s = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double jj = static_cast<double>(j);
      s += (4.0 * jj * jj * c[j]) * std::pow(r, 2.0 * jj - 2.0);
    }
    return s;
  }

  const PotentialFamily& family() const { return family_; }
  bool is_power() const { return std::holds_alternative<PowerFamily>(family_); }
  /// Exponent d for power potentials.
  std::optional<double> power_d() const {
    if (const auto* p = std::get_if<PowerFamily>(&family_)) return p->d;
    return std::nullopt;
  }

  /// Round-trippable CLI descriptor, e.g. "power:2" or "evenpoly:0,1,0.25".
  std::string descriptor() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* p = std::get_if<PowerFamily>(&family_)) {
      os << "power:" << p->d;
    } else {
      os << "evenpoly:";
      const auto& c = std::get<EvenPolyFamily>(family_).coeffs;
      for (std::size_t j = 0; j < c.size(); ++j) os << (j ? "," : "") << c[j];
    }
    return os.str();
  }

 private:
  explicit RadialPotential(PotentialFamily family) : family_(std::move(family)) {}
  friend RadialPotential make_potential(PotentialFamily family);

  PotentialFamily family_;
};

namespace detail {

// Log-spaced scan grid over (1e-6, 1e3].
inline constexpr int kScanPoints = 10'000;
inline constexpr double kScanMin = 1e-6;
inline constexpr double kScanMax = 1e3;

inline double scan_point(int i) {
  const double t = static_cast<double>(i + 1) / kScanPoints;
  return kScanMin * std::pow(kScanMax / kScanMin, t);
}

}  // namespace detail

/// Validates the family parameters and the subharmonicity scan.
inline RadialPotential make_potential(PotentialFamily family) {
  if (const auto* p = std::get_if<PowerFamily>(&family)) {
    detail::require(std::isfinite(p->d) && p->d >= 1.0, "power potential requires d >= 1");
  } else {
    const auto& c = std::get<EvenPolyFamily>(family).coeffs;
    detail::require(!c.empty(), "evenpoly potential requires coefficients");
    bool positive = false;
    for (std::size_t j = 0; j < c.size(); ++j) {
      detail::require(std::isfinite(c[j]), "evenpoly coefficients must be finite");
      if (j == 0) continue;
      detail::require(c[j] >= 0.0, "evenpoly non-constant coefficients must be nonnegative");
      positive = positive || c[j] > 0.0;
    }
    detail::require(positive, "evenpoly potential requires a positive non-constant coefficient");
  }
  RadialPotential pot(std::move(family));

  double prev_flux = 0.0;
  for (int i = 0; i < detail::kScanPoints; ++i) {
    const double r = detail::scan_point(i);
    const double lap = pot.lap(r);
    detail::require(!(lap < 0.0), "potential is not subharmonic at r = " + std::to_string(r));
    const double flux = r * pot.dq(r);
    detail::require(!(flux < prev_flux), "r Q'(r) is not nondecreasing at r = " + std::to_string(r));
    prev_flux = flux;
  }
  return pot;
}

inline RadialPotential make_power(double d) { return make_potential(PowerFamily{d}); }
inline RadialPotential make_evenpoly(std::vector<double> coeffs) {
  return make_potential(EvenPolyFamily{std::move(coeffs)});
}

namespace detail {

inline double parse_real(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    throw InvalidArgument("cannot parse " + std::string(what) + ": '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("trailing characters in " + std::string(what) + ": '" + s + "'");
  return v;
}

}  // namespace detail

/// Parses `power:<d>` or `evenpoly:<c0>,<c1>,...`.
inline RadialPotential parse_potential(std::string_view text) {
  const auto colon = text.find(':');
  detail::require(colon != std::string_view::npos, "potential descriptor needs a ':' (power:<d> | evenpoly:<c0>,...)");
  const auto family = text.substr(0, colon);
  auto rest = text.substr(colon + 1);
  if (family == "power") return make_power(detail::parse_real(rest, "power exponent"));
  if (family == "evenpoly") {
    std::vector<double> coeffs;
    while (true) {
      const auto comma = rest.find(',');
      coeffs.push_back(detail::parse_real(rest.substr(0, comma), "evenpoly coefficient"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return make_evenpoly(std::move(coeffs));
  }
  throw InvalidArgument("unknown potential family '" + std::string(family) + "'");
}

/// Ring {r0 <= |z| <= R0} carrying the equilibrium measure, with the edge
/// density delta = Laplacian(Q)(R0) / 4 and the zoom constant C0 = R0 delta log 4.
struct Droplet {
  double r0 = 0.0;
  double R0 = 0.0;
  double delta = 0.0;
  double C0 = 0.0;
};

namespace detail {

// Bisection to full double resolution on a bracket where pred(lo) is false
// and pred(hi) is true.
template <class Pred>
double bisect(double lo, double hi, Pred pred) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// Largest t in [r0, R0] with t Q'(t) = level, for level in [0, 2].
inline double solve_flux(const RadialPotential& p, double r0, double R0, double level) {
  if (level <= 0.0) return r0;
  if (R0 * p.dq(R0) <= level) return R0;
  // r Q' is nondecreasing, so the largest root is the supremum of {r Q' <= level}.
  return detail::bisect(r0, R0, [&](double r) { return r * p.dq(r) > level; });
}

inline Droplet droplet(const RadialPotential& p) {
  Droplet drop;
  // Inner radius: infimum of {r : Q'(s) > 0 for all s > r}.
  if (!p.is_power()) {
    int last_nonpositive = -1;
    for (int i = 0; i < detail::kScanPoints; ++i)
      if (!(p.dq(detail::scan_point(i)) > 0.0)) last_nonpositive = i;
    if (last_nonpositive >= 0) {
      const double lo = detail::scan_point(last_nonpositive);
      const double hi = detail::scan_point(last_nonpositive + 1);
      drop.r0 = detail::bisect(lo, hi, [&](double r) { return p.dq(r) > 0.0; });
    }
  }

  double hi = std::max(1.0, 2.0 * drop.r0);
  while (hi * p.dq(hi) < 2.0) {
    hi *= 2.0;
    if (hi > 1e12) throw InvalidArgument("non-admissible growth: r Q'(r) = 2 has no solution");
  }
  const double lo = drop.r0;
  drop.R0 = detail::bisect(lo, hi, [&](double r) { return r * p.dq(r) >= 2.0; });

  drop.delta = p.lap(drop.R0) / 4.0;
  detail::require(drop.delta > 0.0, "potential is not strictly subharmonic at the outer edge");
  drop.C0 = drop.R0 * drop.delta * std::log(4.0);

  // Admissibility: Q(r) - 2 log r must keep growing.
  const auto excess = [&](double r) { return p.q(r) - 2.0 * std::log(r); };
  const double e1 = excess(drop.R0);
  const double e10 = excess(10.0 * drop.R0);
  const double e100 = excess(100.0 * drop.R0);
  detail::require(e10 > e1 && e100 > e10, "non-admissible growth: Q(r) - 2 log r does not diverge");
  return drop;
}

/// Log coefficient 2 - (2k+1)/n of the effective potential for mode k.
inline double flux_level(long long n, long long k) {
  return 2.0 - static_cast<double>(2 * k + 1) / static_cast<double>(n);
}

/// V_k(r) = Q(r) - (2 - (2k+1)/n) log r.
inline double effective_potential_vk(const RadialPotential& p, long long n, long long k, double r) {
  detail::require(n >= 1, "effective potential: n must be positive");
  detail::require(r > 0.0, "effective potential: r must be positive");
  return p.q(r) - flux_level(n, k) * std::log(r);
}

/// V_k'(r) = Q'(r) - (2 - (2k+1)/n) / r.
inline double effective_potential_vk_deriv(const RadialPotential& p, long long n, long long k, double r) {
  detail::require(n >= 1, "effective potential: n must be positive");
  detail::require(r > 0.0, "effective potential: r must be positive");
  return p.dq(r) - flux_level(n, k) / r;
}

/// Critical point t_k of V_k in [r0, R0], or nothing when 2 - (2k+1)/n < 0.
inline std::optional<double> saddle_tk(const RadialPotential& p, const Droplet& drop, long long n, long long k) {
  detail::require(n >= 1, "saddle: n must be positive");
  const double level = flux_level(n, k);
  if (level < 0.0) return std::nullopt;
  return solve_flux(p, drop.r0, drop.R0, level);
}

inline std::optional<double> saddle_tk(const RadialPotential& p, long long n, long long k) {
  return saddle_tk(p, droplet(p), n, k);
}

}  // namespace hardedge
