// rnm: command-line front end for the hard-edge library.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardedge/hardedge.hpp"
#include "hardedge/io.hpp"

namespace {

using namespace hardedge;

struct Options {
  std::string potential = "power:1";
  std::string n = "1";
  std::string x;
  std::string xi;
  std::string zeta = "-4:0:0.5";
  std::size_t l = 1;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  bool rescaled = false;
  bool compare_limit = false;
  double d = 1.0;
  double t = 0.0;
  std::optional<double> alpha;
  std::string eval;
  double a = 1.0;
};

long long single_n(const Options& o) {
  const auto ns = io::parse_int_list(o.n);
  detail::require(ns.size() == 1, "--n takes a single value for this command");
  detail::require(ns[0] >= 1, "--n must be positive");
  return ns[0];
}

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  detail::require(static_cast<bool>(f), "cannot open output file '" + o.out + "'");
  f << text;
  detail::require(static_cast<bool>(f), "failed writing '" + o.out + "'");
}

std::string dump(const nlohmann::json& j) { return j.dump() + "\n"; }

int cmd_droplet(const Options& o) {
  const auto p = parse_potential(o.potential);
  emit(o, dump(io::droplet_to_json(droplet(p))));
  return 0;
}

// Shared body of `gap` and `order`.
int cmd_distribution(const Options& o, std::size_t l) {
  detail::require(o.x.empty() != o.xi.empty(), "give exactly one of --x (raw grid) or --xi (rescaled grid)");
  const bool rescaled = !o.xi.empty();
  detail::require(!o.rescaled || rescaled, "--rescaled needs an --xi grid");
  detail::require(!o.compare_limit || rescaled, "--compare-limit needs an --xi grid");
  const auto spec = make_ensemble(parse_potential(o.potential), single_n(o));
  detail::require(l >= 1 && l <= default_kmax(spec), "--l must lie in [1, min(n, 64)]");
  const auto table = build_mode_table(spec);
  const auto grid = io::parse_grid(rescaled ? o.xi : o.x);

  std::ostringstream os;
  if (o.compare_limit) {
    const auto rows = compare_with_limit(spec, table, LimitLaw{l}, default_rescaling(spec), grid);
    if (o.format == "json")
      os << dump(io::to_json(rows, spec.potential.descriptor(), spec.n));
    else
      io::write_csv(os, rows);
  } else {
    const auto dist = tabulate(spec, table, grid, rescaled, l);
    if (o.format == "json")
      os << dump(io::to_json(dist));
    else
      io::write_csv(os, dist);
  }
  emit(o, os.str());
  return 0;
}

int cmd_intensity(const Options& o) {
  const auto p = parse_potential(o.potential);
  const auto d = p.power_d();
  detail::require(d && *d == 1.0, "intensity is defined for the Ginibre potential power:1 only");
  const GinibreIntensity intensity(single_n(o));
  const auto grid = io::parse_grid(o.zeta);
  std::vector<double> values(grid.size()), limits(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = intensity.rescaled(grid[i]);
    limits[i] = specfun::plasma_H(2.0 * grid[i]);
  }
  std::ostringstream os;
  if (o.format == "json") {
    os << dump({{"n", intensity.n()}, {"zeta", grid}, {"intensity", values}, {"plasma_H", limits}});
  } else {
    os << "zeta,intensity,plasma_H\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      os << io::format_number(grid[i]) << ',' << io::format_number(values[i]) << ','
         << io::format_number(limits[i]) << '\n';
  }
  emit(o, os.str());
  return 0;
}

int cmd_sum(const Options& o) {
  const long long n = single_n(o);
  const auto s = hard_edge_sum_decomposition(n, o.d, o.t, o.alpha);
  const double target = o.d * std::log(2.0);
  std::ostringstream os;
  if (o.format == "json") {
    os << dump({{"n", n}, {"d", o.d}, {"t", o.t}, {"S_n", s.S_n}, {"eps1", s.eps1}, {"eps2", s.eps2},
                {"d_log2", target}});
  } else {
    os << "n,d,t,S_n,eps1,eps2,d_log2\n"
       << n << ',' << io::format_number(o.d) << ',' << io::format_number(o.t) << ','
       << io::format_number(s.S_n) << ',' << io::format_number(s.eps1) << ',' << io::format_number(s.eps2) << ','
       << io::format_number(target) << '\n';
  }
  emit(o, os.str());
  return 0;
}

int cmd_sample(const Options& o) {
  detail::require(o.trials >= 1, "--trials must be positive");
  const auto spec = make_ensemble(parse_potential(o.potential), single_n(o));
  detail::require(o.l >= 1 && o.l <= static_cast<std::size_t>(spec.n), "--l must lie in [1, n]");
  const auto table = build_mode_table(spec);
  const auto sample = sample_statistic(spec, table, Statistic{o.l}, o.trials, o.seed);
  std::ostringstream os;
  if (o.format == "json") {
    auto j = io::sample_metadata(sample);
    j["omega"] = sample.omega;
    os << dump(j);
  } else {
    io::write_csv(os, sample);
  }
  emit(o, os.str());
  if (!o.out.empty() && o.format != "json") {
    Options side = o;
    side.out = o.out + ".json";
    emit(side, dump(io::sample_metadata(sample)));
  }
  return 0;
}

// Single special-function value as JSON.
int cmd_specfun(const Options& o) {
  nlohmann::json j{{"function", o.eval}, {"x", o.x.empty() ? 0.0 : std::stod(o.x)}};
  const double x = j["x"];
  if (o.eval == "H") {
    j["value"] = specfun::plasma_H(x);
  } else if (o.eval == "Phi") {
    j["value"] = specfun::std_normal_cdf(x);
  } else if (o.eval == "lgamma") {
    j["value"] = specfun::log_gamma(x);
  } else {
    j["a"] = o.a;
    j["value"] = specfun::reg_lower_gamma(o.a, x);
  }
  emit(o, dump(j));
  return 0;
}

int cmd_converge(const Options& o) {
  const auto ns = io::parse_int_list(o.n);
  const auto grid = io::parse_grid(o.xi.empty() ? "-8:0:0.05" : o.xi);
  const auto potential = parse_potential(o.potential);
  std::vector<double> sups;
  for (long long n : ns) {
    detail::require(n >= 1, "--n entries must be positive");
    const auto spec = make_ensemble(potential, n);
    detail::require(o.l <= default_kmax(spec), "--l must lie in [1, min(n, 64)]");
    const auto table = build_mode_table(spec);
    sups.push_back(sup_deviation(spec, table, LimitLaw{o.l}, default_rescaling(spec), grid));
  }
  std::ostringstream os;
  if (o.format == "json") {
    os << dump({{"potential", potential.descriptor()}, {"l", o.l}, {"n", ns}, {"sup_deviation", sups}});
  } else {
    os << "n,sup_deviation\n";
    for (std::size_t i = 0; i < ns.size(); ++i) os << ns[i] << ',' << io::format_number(sups[i]) << '\n';
  }
  emit(o, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-edge random normal matrix ensembles: exact gap and order-statistic CDFs, limit laws, sampling"};
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* c) {
    c->add_option("--potential", o.potential, "power:<d> or evenpoly:<c0>,<c1>,...")->capture_default_str();
    c->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    c->add_option("--out", o.out, "output file (default stdout)");
  };

  auto* droplet_cmd = app.add_subcommand("droplet", "droplet radii and edge constants as JSON");
  droplet_cmd->add_option("--potential", o.potential, "potential descriptor")->capture_default_str();
  droplet_cmd->add_option("--out", o.out, "output file (default stdout)");

  std::vector<CLI::App*> dist_cmds;
  auto* gap_cmd = app.add_subcommand("gap", "CDF of the spectral radius");
  auto* order_cmd = app.add_subcommand("order", "CDF of the l-th largest modulus");
  for (auto* c : {gap_cmd, order_cmd}) {
    add_common(c);
    c->add_option("--n", o.n, "number of eigenvalues")->required();
    c->add_option("--x", o.x, "raw radius grid: value or min:max:step");
    c->add_option("--xi", o.xi, "rescaled grid: value or min:max:step, all <= 0");
    c->add_flag("--rescaled", o.rescaled, "tabulate on the rescaled --xi grid");
    c->add_flag("--compare-limit", o.compare_limit, "add limit-law and absolute-error columns");
  }
  order_cmd->add_option("--l", o.l, "order (1 = largest)")->capture_default_str();

  auto* intensity_cmd = app.add_subcommand("intensity", "rescaled one-point intensity of the hard-edge Ginibre ensemble");
  add_common(intensity_cmd);
  intensity_cmd->add_option("--n", o.n, "number of eigenvalues")->required();
  intensity_cmd->add_option("--zeta", o.zeta, "zeta grid, all <= 0")->capture_default_str();

  auto* sum_cmd = app.add_subcommand("sum", "mode sum split at alpha sqrt(n) and n/2");
  sum_cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sum_cmd->add_option("--out", o.out, "output file (default stdout)");
  sum_cmd->add_option("--n", o.n, "number of modes")->required();
  sum_cmd->add_option("--d", o.d, "power exponent d >= 1")->capture_default_str();
  sum_cmd->add_option("--t", o.t, "shift t <= 0")->capture_default_str();
  sum_cmd->add_option("--alpha", o.alpha, "first split is alpha sqrt(n) (default log n)");

  auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo draws of the rescaled l-th largest modulus");
  add_common(sample_cmd);
  sample_cmd->add_option("--n", o.n, "number of eigenvalues")->required();
  sample_cmd->add_option("--trials", o.trials, "number of configurations")->capture_default_str();
  sample_cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  sample_cmd->add_option("--l", o.l, "order (1 = largest)")->capture_default_str();

  auto* converge_cmd = app.add_subcommand("converge", "sup deviation from the limit law over a list of n");
  add_common(converge_cmd);
  converge_cmd->add_option("--n", o.n, "comma-separated n values")->required();
  converge_cmd->add_option("--xi", o.xi, "rescaled grid (default -8:0:0.05)");
  converge_cmd->add_option("--l", o.l, "order (1 = largest)")->capture_default_str();

  auto* specfun_cmd = app.add_subcommand("specfun", "evaluate one special function");
  specfun_cmd->add_option("--eval", o.eval, "H, Phi, lgamma or P")
      ->required()
      ->check(CLI::IsMember({"H", "Phi", "lgamma", "P"}));
  specfun_cmd->add_option("--x", o.x, "argument")->required()->check(CLI::Number);
  specfun_cmd->add_option("--a", o.a, "shape parameter for P(a, x)")->capture_default_str();
  specfun_cmd->add_option("--out", o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (droplet_cmd->parsed()) return cmd_droplet(o);
    if (gap_cmd->parsed()) return cmd_distribution(o, 1);
    if (order_cmd->parsed()) return cmd_distribution(o, o.l);
    if (intensity_cmd->parsed()) return cmd_intensity(o);
    if (sum_cmd->parsed()) return cmd_sum(o);
    if (sample_cmd->parsed()) return cmd_sample(o);
    if (converge_cmd->parsed()) return cmd_converge(o);
    if (specfun_cmd->parsed()) return cmd_specfun(o);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
