// nsda: command-line front end for truth runs, data assimilation runs and
// the interpolant / filter audits.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nsda/config.hpp"
#include "nsda/errors.hpp"

namespace fs = std::filesystem;
using namespace nsda;

namespace {

struct Globals {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  bool override_audit = false;
  int jobs = 1;
};

RunConfig load_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = RunConfig::load(g.config);
  if (g.seed) cfg.set("seed", std::to_string(*g.seed));
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::string type_name(InterpolantType t) { return t == InterpolantType::I ? "I" : "II"; }

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Config echo first, then run-derived values under a "run." prefix.
Metadata with_echo(const RunConfig& cfg, const Metadata& derived) {
  Metadata md = cfg.echo();
  for (const auto& [k, v] : derived) md.emplace_back("run." + k, v);
  return md;
}

std::string snapshot_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "omega_%06ld.bin", index);
  return buf;
}

int cmd_truth(const Globals& g) {
  const RunConfig cfg = load_config(g);
  const TruthConfig tc = cfg.truth();
  const fs::path out = prepare_out(g.out);
  const fs::path snaps = out / "snapshots";
  fs::create_directories(snaps);
  long count = 0;
  const TruthRun run = run_truth(tc, [&](const State& s) { write_snapshot(snaps / snapshot_name(count++), s.omega, s.t); });
  const Grid& grid = tc.solver.grid;
  const double F = tc.solver.forcing.sup_L2_squared(grid);
  double max_AU = 0.0;
  for (const auto& r : run.rows) max_AU = std::max(max_AU, r.norm_H2);
  write_truth(out / "truth.csv", run.rows,
              with_echo(cfg, {{"version", kVersion},
                              {"F", format_double(F)},
                              {"snapshots", std::to_string(count)},
                              {"max_AU", format_double(max_AU)}}));
  std::printf("truth: %zu rows, %ld snapshots, final t = %s, energy = %s, enstrophy = %s\n", run.rows.size(), count,
              format_double(run.final_state.t).c_str(), format_double(run.rows.back().energy).c_str(),
              format_double(run.rows.back().enstrophy).c_str());
  std::printf("max |AU| past spin-up = %s\n", format_double(max_AU).c_str());
  return 0;
}

void print_audit(const AuditReport& a) {
  std::printf("audit: type %s, c1 = %s, h = %s, lambda = %s, eps_I = %s, eps_II = %s, ensemble = %d\n",
              type_name(a.type).c_str(), format_double(a.c1).c_str(), format_double(a.h).c_str(),
              format_double(a.lambda).c_str(), format_double(a.epsilon_I).c_str(),
              format_double(a.epsilon_II).c_str(), a.ensemble);
  for (const auto& c : a.checks) {
    std::printf("  %-4s %s  worst %s  limit %s\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                format_double(c.worst_ratio).c_str(), format_double(c.limit).c_str());
  }
  std::printf("audit %s\n", a.passed ? "passed" : "failed");
}

int cmd_assimilate(const Globals& g) {
  const RunConfig cfg = load_config(g);
  AssimilationConfig ac = cfg.assimilation();
  ac.override_audit = g.override_audit;
  const fs::path out = prepare_out(g.out);
  AssimilationResult r = run_assimilation(ac);
  print_audit(r.audit);
  r.series.metadata = with_echo(cfg, r.series.metadata);
  write_series(out / "series.csv", r.series);
  write_insertions(out / "insertions.csv", r.series);
  write_snapshot(out / "truth_final.bin", r.truth.omega, r.truth.t);
  write_snapshot(out / "approx_final.bin", r.approx.omega, r.approx.t);

  const double t_start = cfg.get_double("fit_t_start", ac.t0);
  for (auto col : {SeriesColumn::ErrL2, SeriesColumn::ErrH1, SeriesColumn::ErrH2}) {
    const auto v = r.series.column(col);
    const double first = v.front();
    std::printf("%s: initial %s, final %s", column_name(col), format_double(first).c_str(),
                format_double(v.back()).c_str());
    try {
      const DecayFit fit = fit_decay_rate(r.series, col, t_start);
      std::printf(", alpha %s, r2 %s\n", format_double(fit.alpha).c_str(), format_double(fit.r_squared).c_str());
    } catch (const ConfigError& e) {
      std::printf(", no fit (%s)\n", e.what());
    }
  }
  std::printf("contraction factor per insertion: %s\n", format_double(contraction_factor(r.series)).c_str());
  return 0;
}

int cmd_verify_interpolant(const Globals& g) {
  const RunConfig cfg = load_config(g);
  const Grid grid = cfg.grid();
  const InterpolantSpec spec = cfg.interpolant(grid);
  const C1Estimate est = estimate_c1(spec, static_cast<int>(cfg.get_long("c1_ensemble", 64)),
                                     cfg.get_u64("seed", 0), grid);
  std::printf("interpolant %s: type %s, h = %s, c1 = %s, ensemble = %d, verdict = %s\n", spec.describe().c_str(),
              type_name(est.type).c_str(), format_double(est.h).c_str(), format_double(est.c1).c_str(),
              est.ensemble, est.verdict ? "holds" : "violated");
  return est.verdict ? 0 : 3;
}

int cmd_audit_filter(const Globals& g) {
  const RunConfig cfg = load_config(g);
  const Grid grid = cfg.grid();
  FilterSpec fs = cfg.filter(grid);
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  if (!fs.interpolant.c1) {
    const C1Estimate est = estimate_c1(fs.interpolant, static_cast<int>(cfg.get_long("c1_ensemble", 64)), seed, grid);
    fs.interpolant.c1 = est.c1;
    std::printf("c1 estimated at %s\n", format_double(est.c1).c_str());
  }
  const AuditReport a = audit_E(fs, static_cast<int>(cfg.get_long("audit_ensemble", 64)), seed, grid);
  print_audit(a);
  return a.passed || g.override_audit ? 0 : 3;
}

int cmd_rho(const Globals& g, std::optional<double> delta) {
  const RunConfig cfg = load_config(g);
  const SolverParams p = cfg.solver();
  const Grid& grid = p.grid;
  const double d = delta.value_or(cfg.get_double("delta", 1.0));
  const double F = p.forcing.sup_L2_squared(grid);
  const RhoBounds rb = rho_bounds(F, p.nu, grid.lambda1(), d);
  std::printf("F = %s\nrho_H = %s\nrho_V = %s\nwindow integral bound (delta = %s) = %s\n", format_double(F).c_str(),
              format_double(rb.rho_H).c_str(), format_double(rb.rho_V).c_str(), format_double(d).c_str(),
              format_double(rb.integral_AU_bound).c_str());
  std::printf("G = %s (informational)\nF_* <= %s (informational)\n",
              format_double(p.forcing.sup_H1_squared(grid)).c_str(),
              format_double(p.forcing.sup_dt_Hm1_squared(grid)).c_str());
  return 0;
}

int cmd_fit(const std::string& path, const std::string& column, double t_start) {
  const ErrorSeries s = read_series(path);
  const DecayFit fit = fit_decay_rate(s, parse_column(column), t_start);
  std::printf("alpha = %s\nr2 = %s\npoints = %zu\n", format_double(fit.alpha).c_str(),
              format_double(fit.r_squared).c_str(), fit.points);
  return 0;
}

int cmd_sweep(const Globals& g) {
  const RunConfig base = load_config(g);
  const std::vector<double> deltas = base.get_list("sweep_delta");
  if (deltas.empty()) throw ConfigError("sweep needs a sweep_delta list in the config");
  const fs::path out = prepare_out(g.out);

  // Validate every variant up front so a bad delta fails before any run.
  std::vector<RunConfig> variants;
  for (double d : deltas) {
    RunConfig c = base;
    c.set("delta", format_double(d));
    c.assimilation();
    variants.push_back(std::move(c));
  }

  std::vector<std::optional<SweepEntry>> entries(deltas.size());
  std::vector<std::string> failures(deltas.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < deltas.size(); i = next++) {
      try {
        AssimilationConfig ac = variants[i].assimilation();
        ac.override_audit = g.override_audit;
        AssimilationResult r = run_assimilation(ac);
        r.series.metadata = with_echo(variants[i], r.series.metadata);
        const fs::path dir = out / ("delta_" + format_double(deltas[i]));
        fs::create_directories(dir);
        write_series(dir / "series.csv", r.series);
        write_insertions(dir / "insertions.csv", r.series);
        entries[i] = summarize_sweep_run(deltas[i], r.series);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      std::lock_guard lock(print_mu);
      std::fprintf(stderr, "delta %s done\n", format_double(deltas[i]).c_str());
    }
  };
  const int jobs = std::max(1, std::min<int>(g.jobs, static_cast<int>(deltas.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream rep(out / "sweep.csv", std::ios::binary);
  rep << "delta,contraction,alpha,r2,terminal_ratio,verdict\n";
  std::printf("%-10s %-12s %-12s %-8s %-14s %s\n", "delta", "contraction", "alpha", "r2", "final/initial", "verdict");
  int status = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!entries[i]) {
      std::printf("%-10s failed: %s\n", format_double(deltas[i]).c_str(), failures[i].c_str());
      rep << format_double(deltas[i]) << ",,,,,failed\n";
      status = 2;
      continue;
    }
    const SweepEntry& e = *entries[i];
    const char* verdict = e.contracting ? "contracting" : "non-contracting";
    std::printf("%-10.4g %-12.5g %-12.5g %-8.4f %-14.4g %s\n", e.delta, e.contraction, e.fit.alpha, e.fit.r_squared,
                e.terminal_ratio, verdict);
    rep << format_double(e.delta) << ',' << format_double(e.contraction) << ',' << format_double(e.fit.alpha) << ','
        << format_double(e.fit.r_squared) << ',' << format_double(e.terminal_ratio) << ',' << verdict << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete data assimilation for the 2D periodic Navier-Stokes equations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "run configuration file");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "override the config seed");
  app.add_flag("--override-audit", g.override_audit, "run even if the filter audit fails");
  app.add_option("--jobs", g.jobs, "concurrent runs for sweep")->check(CLI::PositiveNumber);

  auto* truth = app.add_subcommand("truth", "spin up and record a truth trajectory");
  auto* assim = app.add_subcommand("assimilate", "run the insertion scheme against a truth run");
  auto* verify = app.add_subcommand("verify-interpolant", "estimate c1 for the configured interpolant");
  auto* audit = app.add_subcommand("audit-filter", "check the E-bounds over a random ensemble");
  auto* rho = app.add_subcommand("rho", "absorbing-ball radii for the configured forcing");
  std::optional<double> rho_delta;
  rho->add_option("--delta", rho_delta, "window length for the |AU|^2 integral bound");
  auto* fit = app.add_subcommand("fit", "fit an exponential decay rate to an error series");
  std::string series_path, column = "err_H1";
  double t_start = 0.0;
  fit->add_option("series", series_path, "series CSV")->required();
  fit->add_option("--column", column, "column to fit");
  fit->add_option("--t-start", t_start, "ignore rows before this time");
  auto* sweep = app.add_subcommand("sweep", "assimilation runs over the sweep_delta list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*truth) return cmd_truth(g);
    if (*assim) return cmd_assimilate(g);
    if (*verify) return cmd_verify_interpolant(g);
    if (*audit) return cmd_audit_filter(g);
    if (*rho) return cmd_rho(g, rho_delta);
    if (*fit) return cmd_fit(series_path, column, t_start);
    if (*sweep) return cmd_sweep(g);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    return 2;
  } catch (const AuditError& e) {
    std::fprintf(stderr, "audit failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
