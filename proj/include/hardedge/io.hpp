#pragma once

// Text formats: grid specs, potential JSON, and the CSV/JSON tables the CLI
// writes. CSV numbers use 15 significant digits with '\n' line endings;
// JSON numbers use nlohmann's shortest round-trip form.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hardedge/errors.hpp"
#include "hardedge/gap_engine.hpp"
#include "hardedge/limit_laws.hpp"
#include "hardedge/potential.hpp"
#include "hardedge/sampler.hpp"
#include "json.hpp"

namespace hardedge::io {

/// %.15g formatting.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// Parses either a single number or `min:max:step` (inclusive of max when
/// it lies on the lattice, up to rounding).
inline std::vector<double> parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return {detail::parse_real(text, "grid value")};
  const auto c2 = text.find(':', c1 + 1);
  detail::require(c2 != std::string_view::npos, "grid spec must be <min>:<max>:<step>");
  const double lo = detail::parse_real(text.substr(0, c1), "grid min");
  const double hi = detail::parse_real(text.substr(c1 + 1, c2 - c1 - 1), "grid max");
  const double step = detail::parse_real(text.substr(c2 + 1), "grid step");
  detail::require(step > 0.0, "grid step must be positive");
  detail::require(hi >= lo, "grid max must be >= min");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  detail::require(count <= 10'000'000, "grid has too many points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  if (std::abs(grid.back() - hi) <= 1e-9 * step) grid.back() = hi;
  return grid;
}

/// Comma-separated list of positive integers, e.g. "64,256,1024".
inline std::vector<long long> parse_int_list(std::string_view text) {
  std::vector<long long> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string item(text.substr(0, comma));
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (...) {
      throw InvalidArgument("cannot parse integer '" + item + "'");
    }
    detail::require(used == item.size(), "cannot parse integer '" + item + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

/// {"family":"power","d":2.0} or {"family":"evenpoly","coeffs":[...]}.
inline nlohmann::json potential_to_json(const RadialPotential& p) {
  if (const auto d = p.power_d()) return {{"family", "power"}, {"d", *d}};
  return {{"family", "evenpoly"}, {"coeffs", std::get<EvenPolyFamily>(p.family()).coeffs}};
}

inline RadialPotential potential_from_json(const nlohmann::json& j) {
  try {
    const auto family = j.at("family").get<std::string>();
    if (family == "power") return make_power(j.at("d").get<double>());
    if (family == "evenpoly") return make_evenpoly(j.at("coeffs").get<std::vector<double>>());
    throw InvalidArgument("unknown potential family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed potential JSON: ") + e.what());
  }
}

inline nlohmann::json droplet_to_json(const Droplet& d) {
  return {{"r0", d.r0}, {"R0", d.R0}, {"delta", d.delta}, {"C0", d.C0}};
}

inline void write_csv(std::ostream& os, const DistributionTable& t) {
  os << "grid,prob\n";
  for (std::size_t i = 0; i < t.grid.size(); ++i) os << format_number(t.grid[i]) << ',' << format_number(t.probs[i]) << '\n';
}

inline nlohmann::json to_json(const DistributionTable& t) {
  return {{"kind", t.kind_name()}, {"potential", t.potential}, {"n", t.n}, {"grid", t.grid}, {"probs", t.probs}};
}

inline void write_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
  os << "xi,finite_n,limit,abs_err\n";
  for (const auto& r : rows)
    os << format_number(r.xi) << ',' << format_number(r.finite_n) << ',' << format_number(r.limit) << ','
       << format_number(r.abs_err) << '\n';
}

inline nlohmann::json to_json(const std::vector<ComparisonRow>& rows, const std::string& potential, long long n) {
  nlohmann::json j = {{"potential", potential}, {"n", n}};
  std::vector<double> xi, fin, lim, err;
  for (const auto& r : rows) {
    xi.push_back(r.xi);
    fin.push_back(r.finite_n);
    lim.push_back(r.limit);
    err.push_back(r.abs_err);
  }
  j["xi"] = xi;
  j["finite_n"] = fin;
  j["limit"] = lim;
  j["abs_err"] = err;
  return j;
}

inline void write_csv(std::ostream& os, const EmpiricalSample& s) {
  os << "trial,omega\n";
  for (std::size_t i = 0; i < s.omega.size(); ++i) os << i << ',' << format_number(s.omega[i]) << '\n';
}

/// Metadata sidecar for a sample CSV.
inline nlohmann::json sample_metadata(const EmpiricalSample& s) {
  return {{"potential", s.potential},
          {"n", s.n},
          {"trials", s.trials},
          {"master_seed", s.master_seed},
          {"statistic", s.statistic.name()}};
}

}  // namespace hardedge::io
