#pragma once

// Monte Carlo for the eigenvalue moduli of a hard-edge radial ensemble.
//
// The gap probability factorizes over the monomial modes, and the same
// factorization holds for every radial event: the moduli are independent
// and mode j has density 2 r^{2j+1} e^{-nQ(r)} / norm_j on [r0, R0]. A trial
// therefore draws one modulus per mode.
//
// Each mode is drawn by rejection from a Gaussian proposal centered at the
// saddle t_k; modes whose exact acceptance rate falls under a threshold use
// a monotone-interpolated inverse-CDF table instead.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hardedge/errors.hpp"
#include "hardedge/gap_engine.hpp"
#include "hardedge/limit_laws.hpp"
#include "hardedge/parallel.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/random.hpp"

namespace hardedge {

struct SamplerConfig {
  double proposal_inflation = 1.2;  // proposal sd = inflation / sqrt(n Laplacian(Q)(t_k))
  double min_acceptance = 0.1;      // below this expected rate, use the inverse-CDF table
  int table_knots = 512;
  int rejection_cap = 10'000;
  bool force_table = false;
};

namespace detail {

// Fritsch-Carlson monotone cubic through (u_i, r_i), u strictly increasing.
class MonotoneInverse {
 public:
  MonotoneInverse() = default;
  MonotoneInverse(std::vector<double> u, std::vector<double> r) : u_(std::move(u)), r_(std::move(r)) {
    const std::size_t m = u_.size();
    slope_.assign(m, 0.0);
    std::vector<double> secant(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) secant[i] = (r_[i + 1] - r_[i]) / (u_[i + 1] - u_[i]);
    slope_[0] = secant[0];
    slope_[m - 1] = secant[m - 2];
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (secant[i - 1] * secant[i] <= 0.0) continue;
      // Weighted harmonic mean keeps the interpolant monotone.
      const double h0 = u_[i] - u_[i - 1];
      const double h1 = u_[i + 1] - u_[i];
      const double w0 = 2.0 * h1 + h0;
      const double w1 = h1 + 2.0 * h0;
      slope_[i] = (w0 + w1) / (w0 / secant[i - 1] + w1 / secant[i]);
    }
  }

  double operator()(double u) const {
    auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t i = it == u_.begin() ? 0 : static_cast<std::size_t>(it - u_.begin()) - 1;
    i = std::min(i, u_.size() - 2);
    const double h = u_[i + 1] - u_[i];
    const double s = std::clamp((u - u_[i]) / h, 0.0, 1.0);
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * r_[i] + (s3 - 2 * s2 + s) * h * slope_[i] + (-2 * s3 + 3 * s2) * r_[i + 1] +
           (s3 - s2) * h * slope_[i + 1];
  }

 private:
  std::vector<double> u_, r_, slope_;
};

}  // namespace detail

/// Per-mode proposal data.
struct ModeProposal {
  double center = 0.0;
  double sigma = 0.0;
  double log_bound = 0.0;  // log sup f/g, f and g both normalized to 1 at the center
  double acceptance = 0.0; // exact expected acceptance rate of the rejection step
  bool use_table = false;
  detail::MonotoneInverse inverse;
};

class ModulusSampler {
 public:
  ModulusSampler(const EnsembleSpec& spec, const ModeTable& table, SamplerConfig config = {})
      : spec_(spec), table_(table), config_(config) {
    detail::check_table(spec, table);
    proposals_.resize(table.modes());
    parallel_for(proposals_.size(), [&](std::size_t j) { proposals_[j] = build(j); });
  }

  const EnsembleSpec& spec() const { return spec_; }
  const ModeProposal& proposal(std::size_t j) const { return proposals_[j]; }

  /// One draw of the modulus of mode j.
  double draw_mode(std::size_t j, random::Stream& rng) const {
    const auto& p = proposals_[j];
    if (!p.use_table) {
      const double lo = spec_.drop.r0;
      const double hi = spec_.drop.R0;
      for (int attempt = 0; attempt < config_.rejection_cap; ++attempt) {
        const double z = rng.normal();
        const double r = p.center + p.sigma * z;
        if (!(r > lo && r <= hi)) continue;
        const double log_ratio = log_target(j, r) + 0.5 * z * z - p.log_bound;
        if (std::log(rng.uniform()) < log_ratio) return r;
      }
      return fallback_draw(j, rng);
    }
    return p.inverse(rng.uniform());
  }

  /// One modulus per mode, indexed by j.
  std::vector<double> sample_moduli(random::Stream& rng) const {
    std::vector<double> out(proposals_.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = draw_mode(j, rng);
    return out;
  }

 private:
  // log of the mode-j integrand relative to its value at the saddle.
  double log_target(std::size_t j, double r) const {
    return detail::mode_log_integrand(spec_, j, r) - table_.log_peak[j];
  }

  ModeProposal build(std::size_t j) const {
    ModeProposal p;
    p.center = table_.saddle[j];
    p.sigma = config_.proposal_inflation * table_.width[j];
    const double lo = spec_.drop.r0;
    const double hi = spec_.drop.R0;
    const auto h = [&](double r) {
      if (r <= 0.0) return -std::numeric_limits<double>::infinity();
      const double z = (r - p.center) / p.sigma;
      return log_target(j, r) + 0.5 * z * z;
    };
    // Grid scan over the whole support plus a dense scan near the saddle,
    // then golden-section refinement around the best point.
    double best_r = p.center;
    double best = h(p.center);
    const auto scan = [&](double a, double b, int points) {
      for (int i = 0; i <= points; ++i) {
        const double r = a + (b - a) * i / points;
        const double v = h(r);
        if (v > best) {
          best = v;
          best_r = r;
        }
      }
    };
    scan(lo, hi, 4096);
    scan(std::max(lo, p.center - 12 * p.sigma), std::min(hi, p.center + 12 * p.sigma), 1024);
    const double step = std::max((hi - lo) / 4096, 24 * p.sigma / 1024);
    double a = std::max(lo, best_r - step);
    double b = std::min(hi, best_r + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100 && b - a > 1e-15 * std::max(1.0, b); ++it) {
      const double c = b - g * (b - a);
      const double d = a + g * (b - a);
      (h(c) > h(d) ? b : a) = (h(c) > h(d) ? d : c);
    }
    best = std::max({best, h(a), h(b)});
    p.log_bound = best + 1e-6;

    const double log_mass = table_.log_norm[j] - table_.log_peak[j];
    p.acceptance = std::exp(log_mass - p.log_bound) / (std::sqrt(2.0 * std::numbers::pi) * p.sigma);
    p.use_table = config_.force_table || !(p.acceptance >= config_.min_acceptance);
    if (p.use_table) p.inverse = build_table(j);
    return p;
  }

  detail::MonotoneInverse build_table(std::size_t j) const {
    const double lo = spec_.drop.r0;
    const double hi = spec_.drop.R0;
    const double t = table_.saddle[j];
    constexpr double cut = -40.0;
    // The integrand is unimodal around t: locate where it drops below e^cut.
    double left = lo;
    if (t > lo && !(log_target(j, std::max(lo, 1e-300)) >= cut))
      left = hardedge::detail::bisect(lo, t, [&](double r) { return r > 0.0 && log_target(j, r) >= cut; });
    double right = hi;
    if (t < hi && !(log_target(j, hi) >= cut))
      right = hardedge::detail::bisect(t, hi, [&](double r) { return !(log_target(j, r) >= cut); });
    if (!(right > left)) right = std::min(hi, left + table_.width[j]);

    const int m = std::max(config_.table_knots, 2);
    std::vector<double> r(m), u(m);
    const auto log_f = [&](double x) { return log_target(j, x); };
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      r[i] = left + (right - left) * i / (m - 1);
      if (i > 0) acc += quadrature::composite_exp(log_f, 0.0, r[i - 1], r[i], 1);
      u[i] = acc;
    }
    // Normalize and drop flat stretches so u stays strictly increasing.
    std::vector<double> uu{0.0}, rr{r[0]};
    for (int i = 1; i < m; ++i) {
      const double v = u[i] / acc;
      if (v > uu.back()) {
        uu.push_back(v);
        rr.push_back(r[i]);
      }
    }
    if (uu.size() < 2) {
      uu = {0.0, 1.0};
      rr = {left, right};
    }
    uu.back() = 1.0;
    return detail::MonotoneInverse(std::move(uu), std::move(rr));
  }

  double fallback_draw(std::size_t j, random::Stream& rng) const {
    // Rejection cap exceeded: draw from a table built on the spot.
    const auto inverse = build_table(j);
    return inverse(rng.uniform());
  }

  EnsembleSpec spec_;
  ModeTable table_;
  SamplerConfig config_;
  std::vector<ModeProposal> proposals_;
};

/// Draws the n moduli of one configuration.
inline std::vector<double> sample_moduli(const EnsembleSpec& spec, const ModeTable& table, random::Stream& rng,
                                         SamplerConfig config = {}) {
  return ModulusSampler(spec, table, config).sample_moduli(rng);
}

/// Per-trial statistic: the l-th largest modulus (l = 1 is the spectral radius).
struct Statistic {
  std::size_t l = 1;
  std::string name() const { return l == 1 ? "max" : "order(" + std::to_string(l) + ")"; }
};

struct EmpiricalSample {
  std::string potential;
  long long n = 0;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  Statistic statistic;
  std::vector<double> raw;    // l-th largest modulus per trial
  std::vector<double> omega;  // R0 n delta (raw - R0) log 4
};

/// Runs `trials` independent configurations. Trial i uses the stream seeded
/// by random::stream_seed(master_seed, i).
inline EmpiricalSample sample_statistic(const ModulusSampler& sampler, Statistic statistic, std::size_t trials,
                                        std::uint64_t master_seed, unsigned threads = 0) {
  detail::require(trials >= 1, "sample_statistic: trials must be >= 1");
  const auto& spec = sampler.spec();
  detail::require(statistic.l >= 1 && statistic.l <= static_cast<std::size_t>(spec.n),
                  "sample_statistic: l outside [1, n]");
  EmpiricalSample out;
  out.potential = spec.potential.descriptor();
  out.n = spec.n;
  out.trials = trials;
  out.master_seed = master_seed;
  out.statistic = statistic;
  out.raw.resize(trials);
  out.omega.resize(trials);
  const auto map = make_rescaling(spec, RescalingKind::radial);
  parallel_for(
      trials,
      [&](std::size_t i) {
        random::Stream rng(random::stream_seed(master_seed, i));
        auto moduli = sampler.sample_moduli(rng);
        const auto nth = moduli.begin() + static_cast<std::ptrdiff_t>(statistic.l - 1);
        std::nth_element(moduli.begin(), nth, moduli.end(), std::greater<>());
        out.raw[i] = *nth;
        out.omega[i] = map.forward(*nth);
      },
      threads);
  return out;
}

inline EmpiricalSample sample_statistic(const EnsembleSpec& spec, const ModeTable& table, Statistic statistic,
                                        std::size_t trials, std::uint64_t master_seed, unsigned threads = 0,
                                        SamplerConfig config = {}) {
  return sample_statistic(ModulusSampler(spec, table, config), statistic, trials, master_seed, threads);
}

struct KsStatistic {
  double d = 0.0;        // max(d_plus, d_minus)
  double d_plus = 0.0;   // sup (F_emp - F)
  double d_minus = 0.0;  // sup (F - F_emp)
};

/// KS statistic of a sample against a CDF. For a CDF with jumps, pass its
/// left limit F(x-) as `cdf_left`; by default the CDF is taken as continuous.
inline KsStatistic ks_statistic(std::span<const double> values, const std::function<double(double)>& cdf,
                                unsigned threads = 0, const std::function<double(double)>& cdf_left = {}) {
  detail::require(!values.empty(), "ks_distance: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> f(sorted.size()), f_left;
  parallel_for(sorted.size(), [&](std::size_t i) { f[i] = cdf(sorted[i]); }, threads);
  if (cdf_left) {
    f_left.resize(sorted.size());
    parallel_for(sorted.size(), [&](std::size_t i) { f_left[i] = cdf_left(sorted[i]); }, threads);
  }
  const double m = static_cast<double>(sorted.size());
  KsStatistic ks;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Ties: the empirical CDF jumps once, to its value after the last copy.
    std::size_t last = i;
    while (last + 1 < sorted.size() && sorted[last + 1] == sorted[i]) ++last;
    const double below = cdf_left ? f_left[i] : f[i];
    ks.d_plus = std::max(ks.d_plus, static_cast<double>(last + 1) / m - f[i]);
    ks.d_minus = std::max(ks.d_minus, below - static_cast<double>(i) / m);
    i = last;
  }
  ks.d = std::max(ks.d_plus, ks.d_minus);
  return ks;
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_distance(std::span<const double> values, const std::function<double(double)>& cdf,
                          unsigned threads = 0) {
  return ks_statistic(values, cdf, threads).d;
}

inline double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf,
                          unsigned threads = 0) {
  return ks_distance(sample.omega, cdf, threads);
}

/// Exact finite-n CDF of omega = R0 n delta (|z|^{(l)} - R0) log 4.
inline std::function<double(double)> exact_omega_cdf(const EnsembleSpec& spec, const ModeTable& table,
                                                     std::size_t l = 1) {
  const auto map = make_rescaling(spec, RescalingKind::radial);
  return [&spec, &table, map, l](double omega) {
    if (omega >= 0.0) return 1.0;
    const double x = map.inverse(omega);
    return l == 1 ? gap_cdf(spec, table, x) : order_cdf(spec, table, l, x);
  };
}

}  // namespace hardedge
