#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "btoep/convergence.hpp"
#include "btoep/curves.hpp"
#include "btoep/errors.hpp"
#include "btoep/io.hpp"
#include "btoep/measures.hpp"
#include "btoep/potential.hpp"
#include "btoep/roots.hpp"
#include "btoep/symbol.hpp"
#include "btoep/toeplitz.hpp"

namespace btoep {

struct RunConfig {
  std::string symbol_path;
  std::string command;
  int k = 0;
  int n = 50;
  std::vector<int> ns = {20, 40, 80, 160};
  int trials = 100;
  int nodes = 256;
  double r_max = 10.0;
  double grid_step = 0.0;
  double tol = 0.0;  // 0: per-command default
  std::string out;
  std::string format;

  void validate(const LaurentSymbol& a, bool needs_k) const {
    if (needs_k && (k < -a.q() + 1 || k > a.p() - 1))
      throw UsageError("--k must lie in [-q+1, p-1] = [" + std::to_string(-a.q() + 1) + ", " +
                       std::to_string(a.p() - 1) + "]");
    if (!(r_max > 0.0)) throw UsageError("--rmax must be positive");
    if (grid_step < 0.0) throw UsageError("--grid must be positive");
    if (n < 1) throw UsageError("--n must be positive");
    for (int m : ns)
      if (m < 1) throw UsageError("--ns entries must be positive");
    if (trials < 1) throw UsageError("--trials must be positive");
    if (nodes < 8) throw UsageError("--nodes must be at least 8");
  }
};

namespace detail {

inline CurveFamily trace_with(const RunConfig& cfg, const LaurentSymbol& a, int k) {
  TraceOptions opts;
  opts.r_max = cfg.r_max;
  opts.grid_step = cfg.grid_step;
  if (cfg.tol > 0.0) opts.on_curve_tol = cfg.tol;
  return trace_curve(a, k, opts);
}

inline QuadratureOptions quad_with(const RunConfig& cfg) {
  QuadratureOptions opts;
  opts.nodes_per_arc = cfg.nodes;
  if (cfg.tol > 0.0) opts.mass_tol = cfg.tol;
  return opts;
}

/// Probes between consecutive support nodes of one component, offset by a
/// sixth of the local gap; midgap placement keeps the direct log sums
/// representative of the smooth potential.
inline std::vector<cplx> residual_probes(const DiscreteMeasure& m, int count) {
  std::vector<cplx> out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    bool same_arc = m.arc.size() != m.size() || m.arc[i] == m.arc[i + 1];
    double gap = std::abs(m.points[i + 1] - m.points[i]);
    bool local = m.spacing.size() != m.size() || gap < 4.0 * (m.spacing[i] + 1e-300) ||
                 gap < 4.0 * m.spacing[i + 1];
    if (same_arc && local && gap > 0.0) idx.push_back(i);
  }
  if (idx.empty()) return out;
  for (int j = 0; j < count; ++j) {
    std::size_t pick = idx[static_cast<std::size_t>(
        (static_cast<long long>(j) + 1) * (idx.size() - 1) / (count + 1))];
    out.push_back(m.points[pick] + (m.points[pick + 1] - m.points[pick]) / 6.0);
  }
  return out;
}

inline int cmd_symbol_info(const RunConfig& cfg, const LaurentSymbol& a) {
  nlohmann::json j = symbol_to_json(a);
  j["p"] = a.p();
  j["q"] = a.q();
  nlohmann::json bp = nlohmann::json::array();
  for (const auto& [where, mult] : branch_points_unique(a))
    bp.push_back({{"lambda", {where.real(), where.imag()}}, {"multiplicity", mult}});
  j["branch_points"] = bp;
  write_text(cfg.out, j.dump(2) + "\n");
  return 0;
}

inline int cmd_curves(const RunConfig& cfg, const LaurentSymbol& a) {
  CurveFamily fam = trace_with(cfg, a, cfg.k);
  if (cfg.format == "svg") {
    SvgPlot plot(1.1 * cfg.r_max);
    plot.add_family(fam);
    write_text(cfg.out, plot.str());
  } else {
    write_text(cfg.out, curves_csv(fam));
  }
  return 0;
}

inline int cmd_density(const RunConfig& cfg, const LaurentSymbol& a) {
  CurveFamily fam = trace_with(cfg, a, cfg.k);
  DiscreteMeasure m = discretize_measure(a, cfg.k, fam, quad_with(cfg));
  write_text(cfg.out, measure_csv(cfg.k, m));
  return 0;
}

inline int cmd_masses(const RunConfig& cfg, const LaurentSymbol& a) {
  std::map<int, double> masses;
  for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
    CurveFamily fam = trace_with(cfg, a, k);
    masses[k] = discretize_measure(a, k, fam, quad_with(cfg)).total_mass();
  }
  write_text(cfg.out, masses_json(a, masses).dump(2) + "\n");
  return 0;
}

inline int cmd_spectrum(const RunConfig& cfg, const LaurentSymbol& a) {
  SpectralSet s = generalized_spectrum(a, cfg.k, cfg.n);
  if (cfg.format == "svg") {
    double extent = 0.0;
    for (cplx z : s.zeros) extent = std::max(extent, std::abs(z));
    SvgPlot plot(1.2 * std::max(extent, 1.0));
    plot.add_spectrum(s);
    write_text(cfg.out, plot.str());
  } else {
    write_text(cfg.out, spectrum_csv(s));
  }
  return 0;
}

inline int cmd_widom_check(const RunConfig& cfg, const LaurentSymbol& a) {
  double scale = 0.0;
  for (cplx bp : branch_points(a)) scale = std::max(scale, std::abs(bp));
  scale = std::max(1.0, scale);
  std::mt19937 rng(871209u);
  std::uniform_real_distribution<double> u(-2.5 * scale, 2.5 * scale);
  double worst = 0.0;
  int used = 0;
  for (int trial = 0; trial < cfg.trials * 20 && used < cfg.trials; ++trial) {
    cplx lambda(u(rng), u(rng));
    int n = 1 + trial % cfg.n;
    WidomDet wd;
    try {
      wd = widom_det(a, cfg.k, lambda, n);
    } catch (const DegenerateRoots&) {
      continue;
    }
    LogComplex lu = det_eval(a, cfg.k, lambda, n);
    cplx ref = wd.det.value();
    double rel = std::abs(lu.value() - ref) / (1e-300 + std::abs(ref));
    worst = std::max(worst, rel);
    ++used;
  }
  if (used < cfg.trials) throw RootSolverFailure("not enough usable probes away from root ties");
  nlohmann::json j{{"k", cfg.k},
                   {"n_max", cfg.n},
                   {"trials", used},
                   {"max_relative_discrepancy", worst}};
  write_text(cfg.out, j.dump(2) + "\n");
  return 0;
}

inline int cmd_energy(const RunConfig& cfg, const LaurentSymbol& a) {
  MeasureVector v = MeasureVector::zeros(a.p(), a.q());
  for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
    CurveFamily fam = trace_with(cfg, a, k);
    v.at(k) = discretize_measure(a, k, fam, quad_with(cfg));
  }
  EnergyValues e = energy_J(v);
  std::map<int, double> l_constants;
  std::vector<ElResidualRecord> residuals;
  for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
    l_constants[k] = el_constant(a, k);
    for (cplx probe : residual_probes(v.at(k), 10))
      residuals.push_back({k, probe, el_residual(a, v, k, probe)});
  }
  write_text(cfg.out, energy_json(e.direct, e.alt, e.matrix, l_constants, residuals).dump(2) + "\n");
  return 0;
}

inline int cmd_converge(const RunConfig& cfg, const LaurentSymbol& a) {
  CurveFamily fam = trace_with(cfg, a, cfg.k);
  ConvergenceReport rep = convergence_report(a, cfg.k, cfg.ns, fam);
  write_text(cfg.out, convergence_csv(rep));
  return 0;
}

}  // namespace detail

/// Command-line front end; returns the process exit code: 0 on success,
/// 1 on a validation or usage error, 2 on a numerical failure.
inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"limiting spectra of banded Toeplitz matrices"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&](CLI::App* cmd, bool needs_k, const char* formats) {
    cmd->add_option("--symbol", cfg.symbol_path, "symbol JSON file")->required();
    if (needs_k) cmd->add_option("--k", cfg.k, "curve index in [-q+1, p-1]");
    cmd->add_option("--rmax", cfg.r_max, "truncation radius (default 10)");
    cmd->add_option("--grid", cfg.grid_step, "tracer grid step (default: diameter/400)");
    cmd->add_option("--tol", cfg.tol, "tolerance override for this command");
    cmd->add_option("--out", cfg.out, "output path (default: stdout)");
    cmd->add_option("--format", cfg.format, std::string("output format: ") + formats);
  };

  CLI::App* c_info = app.add_subcommand("symbol-info", "validate a symbol, list branch points");
  add_common(c_info, false, "json");
  CLI::App* c_curves = app.add_subcommand("curves", "trace Gamma_k as polylines");
  add_common(c_curves, true, "csv|svg");
  CLI::App* c_density = app.add_subcommand("density", "discretized measure with densities");
  add_common(c_density, true, "csv");
  c_density->add_option("--nodes", cfg.nodes, "quadrature nodes per arc");
  CLI::App* c_masses = app.add_subcommand("masses", "total masses and alpha constants");
  add_common(c_masses, false, "json");
  c_masses->add_option("--nodes", cfg.nodes, "quadrature nodes per arc");
  CLI::App* c_spectrum = app.add_subcommand("spectrum", "zeros of P_{k,n}");
  add_common(c_spectrum, true, "csv|svg");
  c_spectrum->add_option("--n", cfg.n, "matrix dimension")->required();
  CLI::App* c_widom = app.add_subcommand("widom-check", "banded determinant vs Widom's formula");
  add_common(c_widom, true, "json");
  c_widom->add_option("--n", cfg.n, "largest matrix dimension");
  c_widom->add_option("--trials", cfg.trials, "number of random probes");
  CLI::App* c_energy = app.add_subcommand("energy", "energy functional and Euler-Lagrange report");
  add_common(c_energy, false, "json");
  c_energy->add_option("--nodes", cfg.nodes, "quadrature nodes per arc");
  CLI::App* c_converge = app.add_subcommand("converge", "empirical-measure convergence report");
  add_common(c_converge, true, "csv");
  c_converge->add_option("--ns", cfg.ns, "dimension schedule")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::puts(app.help().c_str());
      return 0;
    }
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }

  try {
    LaurentSymbol a = load_symbol(cfg.symbol_path);
    auto dispatch = [&](CLI::App* cmd, bool needs_k, const char* def_fmt,
                        const char* allowed) -> int {
      if (!app.got_subcommand(cmd)) return -1;
      cfg.command = cmd->get_name();
      if (cfg.format.empty()) cfg.format = def_fmt;
      if (std::string(allowed).find(cfg.format) == std::string::npos)
        throw UsageError("--format " + cfg.format + " is not valid for " + cfg.command +
                         " (expected one of: " + allowed + ")");
      cfg.validate(a, needs_k);
      if (cmd == c_info) return detail::cmd_symbol_info(cfg, a);
      if (cmd == c_curves) return detail::cmd_curves(cfg, a);
      if (cmd == c_density) return detail::cmd_density(cfg, a);
      if (cmd == c_masses) return detail::cmd_masses(cfg, a);
      if (cmd == c_spectrum) return detail::cmd_spectrum(cfg, a);
      if (cmd == c_widom) return detail::cmd_widom_check(cfg, a);
      if (cmd == c_energy) return detail::cmd_energy(cfg, a);
      return detail::cmd_converge(cfg, a);
    };
    for (auto [cmd, needs_k, def_fmt, allowed] :
         {std::tuple{c_info, false, "json", "json"}, std::tuple{c_curves, true, "csv", "csv svg"},
          std::tuple{c_density, true, "csv", "csv"}, std::tuple{c_masses, false, "json", "json"},
          std::tuple{c_spectrum, true, "csv", "csv svg"},
          std::tuple{c_widom, true, "json", "json"}, std::tuple{c_energy, false, "json", "json"},
          std::tuple{c_converge, true, "csv", "csv"}}) {
      int rc = dispatch(cmd, needs_k, def_fmt, allowed);
      if (rc >= 0) return rc;
    }
    throw UsageError("no subcommand selected");
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const GcdViolation& e) {
    std::fprintf(stderr, "invalid symbol: %s\n", e.what());
    return 1;
  } catch (const ExtremeCoefficientZero& e) {
    std::fprintf(stderr, "invalid symbol: %s\n", e.what());
    return 1;
  } catch (const DegenerateRange& e) {
    std::fprintf(stderr, "invalid symbol: %s\n", e.what());
    return 1;
  } catch (const IndexOutOfRange& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace btoep
