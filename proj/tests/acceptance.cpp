// Acceptance harness: one PASS/FAIL line per criterion, using the recipes in
// configs/. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nsda/config.hpp"

using namespace nsda;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string body;  // CSV body compared by the determinism criterion
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunConfig recipe(const std::string& name) { return RunConfig::load(fs::path(NSDA_CONFIG_DIR) / name); }

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "nsda_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// File contents without the '#' metadata lines.
std::string csv_body(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line + '\n';
  }
  return out;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1 ---------------------------------------------------------------------------

Outcome taylor_green() {
  const RunConfig cfg = recipe("taylor_green.conf");
  const TruthConfig tc = cfg.truth();
  const auto start = Clock::now();
  const TruthRun run = run_truth(tc);
  const double secs = seconds_since(start);
  const auto [m1, m2] = *tc.init.mode;
  const double k2 = tc.solver.grid.k0() * tc.solver.grid.k0() * (m1 * m1 + m2 * m2);
  const double z0 = run.rows.front().enstrophy;
  double worst = 0.0;
  for (const auto& r : run.rows) {
    const double exact = z0 * std::exp(-2.0 * tc.solver.nu * k2 * r.t);
    worst = std::max(worst, std::abs(r.enstrophy / exact - 1.0));
  }
  const fs::path p = scratch() / "taylor_green.csv";
  write_truth(p, run.rows, cfg.echo());
  Outcome o;
  o.pass = worst < 1e-6 && secs < 30.0 && std::abs(run.rows.back().t - 5.0) < 1e-9;
  o.detail = fmt("worst relative enstrophy error %.3e (limit 1e-6), %.1f s (limit 30 s)", worst, secs);
  o.body = csv_body(p);
  return o;
}

// --- 2 ---------------------------------------------------------------------------

Outcome spectral_identities() {
  const Grid g(64, 2.0 * 3.141592653589793);
  const double l1 = g.lambda1();
  const std::vector<double> lambdas{1.0, 2.0, 5.0, 10.0, 50.0, 200.0};
  const double tol = 1e-12;
  double worst_iso = 0.0;
  long violations = 0, checks = 0;
  auto le = [&](double a, double b) {
    ++checks;
    if (a > b * (1.0 + tol) + 1e-300) ++violations;
  };
  std::ostringstream body;
  for (int i = 0; i < 200; ++i) {
    const SpectralVelocity v = ensemble_member(g, i, 2024);
    const SpectralScalar xi = curl(v);
    const double H = norm_alpha(v, 0.0), V = norm_alpha(v, 1.0), A = norm_alpha(v, 2.0);
    worst_iso = std::max(worst_iso, std::abs(norm_alpha(xi, 0.0) - V) / V);
    worst_iso = std::max(worst_iso, std::abs(norm_alpha(xi, 1.0) - A) / A);
    le(l1 * H * H, V * V);
    le(l1 * l1 * H * H, l1 * V * V);
    le(l1 * V * V, A * A);
    for (double lam : lambdas) {
      const double lambda = lam * l1;
      const SpectralVelocity q = project_high(v, lambda), p = project_low(v, lambda);
      const double qH = norm_alpha(q, 0.0), qV = norm_alpha(q, 1.0), qA = norm_alpha(q, 2.0);
      const double pH = norm_alpha(p, 0.0), pV = norm_alpha(p, 1.0), pA = norm_alpha(p, 2.0);
      le(lambda * qH * qH, qV * qV);
      le(lambda * lambda * qH * qH, lambda * qV * qV);
      le(lambda * qV * qV, qA * qA);
      le(pV * pV, lambda * pH * pH);
      le(pA * pA, lambda * lambda * pH * pH);
    }
    body << i << ',' << format_double(H) << ',' << format_double(V) << ',' << format_double(A) << '\n';
  }
  Outcome o;
  o.pass = worst_iso < 1e-12 && violations == 0;
  o.detail = fmt("worst isometry defect %.3e (limit 1e-12), %ld of %ld inequality checks violated", worst_iso,
                 violations, checks);
  o.body = body.str();
  return o;
}

// --- 3 ---------------------------------------------------------------------------

Outcome interpolant_audit() {
  const auto start = Clock::now();
  const Grid g(128, 2.0 * 3.141592653589793);
  const int ensemble = 64;
  const double lam_obs = 64.0;
  const C1Estimate modal = estimate_c1({ModalProjection{lam_obs}, std::nullopt}, ensemble, 3, g);
  const bool modal_ok = modal.type == InterpolantType::I && modal.verdict && modal.c1 <= 1.0 + 1e-10 &&
                        std::abs(modal.h - 1.0 / std::sqrt(lam_obs)) < 1e-15;
  std::vector<double> c1s;
  bool vor_ok = true;
  std::ostringstream body;
  body << "modal," << format_double(modal.c1) << '\n';
  for (int m : {8, 16, 32}) {
    const C1Estimate e = estimate_c1({NodalVoronoi{regular_lattice(g, m)}, std::nullopt}, ensemble, 3, g);
    vor_ok = vor_ok && e.type == InterpolantType::II && e.verdict && std::isfinite(e.c1);
    c1s.push_back(e.c1);
    body << "voronoi_" << m << ',' << format_double(e.h) << ',' << format_double(e.c1) << '\n';
  }
  const bool stable = refinement_stable(c1s, 2.0);
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = modal_ok && vor_ok && stable && secs < 120.0;
  o.detail = fmt("modal c1 %.12f (limit 1+1e-10); voronoi c1 m=8,16,32: %.4f %.4f %.4f, spread %.3f (limit 2); %.1f s",
                 modal.c1, c1s[0], c1s[1], c1s[2],
                 *std::max_element(c1s.begin(), c1s.end()) / *std::min_element(c1s.begin(), c1s.end()), secs);
  o.body = body.str();
  return o;
}

// --- 4 ---------------------------------------------------------------------------

Outcome filter_audit() {
  const auto start = Clock::now();
  std::ostringstream body;
  std::string detail;
  bool pass = true;
  for (const char* name : {"type1_modal.conf", "type2_voronoi.conf"}) {
    const RunConfig cfg = recipe(name);
    const Grid g = cfg.grid();
    FilterSpec f = cfg.filter(g);
    const std::uint64_t seed = cfg.get_u64("seed", 0);
    f.interpolant.c1 = estimate_c1(f.interpolant, 64, seed, g).c1;
    const AuditReport a = audit_E(f, 64, seed, g);
    const std::size_t expected = a.type == InterpolantType::I ? 5 : 3;
    pass = pass && a.passed && a.checks.size() == expected && a.ensemble == 64;
    double worst = 0.0;
    for (const auto& c : a.checks) {
      worst = std::max(worst, c.worst_ratio / c.limit);
      body << name << ',' << c.name << ',' << format_double(c.worst_ratio) << ',' << format_double(c.limit) << '\n';
    }
    detail += fmt("type %s lambda %g h %.4f eps_I %.4g eps_II %.4g: %zu bounds, worst ratio/(1+eps) %.4f (limit 1); ",
                  a.type == InterpolantType::I ? "I" : "II", a.lambda, a.h, a.epsilon_I, a.epsilon_II,
                  a.checks.size(), worst);
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = pass && secs < 120.0;
  o.detail = detail + fmt("%.1f s", secs);
  o.body = body.str();
  return o;
}

// --- 5 ---------------------------------------------------------------------------

Outcome containment() {
  const RunConfig cfg = recipe("containment.conf");
  const TruthConfig tc = cfg.truth();
  const auto start = Clock::now();
  const TruthRun run = run_truth(tc);
  const double secs = seconds_since(start);
  const Grid& g = tc.solver.grid;
  const double F = tc.solver.forcing.sup_L2_squared(g);
  const double delta = cfg.get_double("delta", 1.0);
  const ContainmentReport c = check_containment(run.rows, F, tc.solver.nu, g.lambda1(), delta, tc.t0);
  const fs::path p = scratch() / "containment.csv";
  write_truth(p, run.rows, cfg.echo());
  Outcome o;
  o.pass = c.passed && tc.horizon >= 50.0 && secs < 600.0;
  o.detail = fmt("max|U| %.4g <= rho_H %.4g, max||U|| %.4g <= rho_V %.4g, window int|AU|^2 %.4g <= %.4g, "
                 "horizon %g, %.1f s",
                 c.max_L2, c.rho.rho_H, c.max_H1, c.rho.rho_V, c.max_window_AU2, c.rho.integral_AU_bound, tc.horizon,
                 secs);
  o.body = csv_body(p);
  return o;
}

// --- 6, 7 --------------------------------------------------------------------------

struct DecayRun {
  DecayFit fit;
  double initial = 0.0, terminal = 0.0;
  long bad_insertions = 0;
  double secs = 0.0;
  std::string body;
};

DecayRun decay_run(const RunConfig& cfg, SeriesColumn col, const std::string& tag) {
  const AssimilationConfig ac = cfg.assimilation();
  const auto start = Clock::now();
  const AssimilationResult r = run_assimilation(ac);
  DecayRun d;
  d.secs = seconds_since(start);
  d.fit = fit_decay_rate(r.series, col, cfg.get_double("fit_t_start", ac.t0));
  const auto v = r.series.column(col);
  d.initial = v.front();
  d.terminal = v.back();
  // Pre/post |v| at each insertion; slack at the roundoff floor only.
  const double floor = 1e-13 * std::max(1.0, r.series.rows.front().energy_truth);
  for (const auto& ins : r.series.insertions) {
    if (ins.post_L2 > ins.pre_L2 * (1.0 + 1e-12) + floor) ++d.bad_insertions;
  }
  const fs::path p = scratch() / (tag + ".csv");
  write_series(p, r.series);
  write_insertions(scratch() / (tag + "_insertions.csv"), r.series);
  d.body = csv_body(p) + csv_body(scratch() / (tag + "_insertions.csv"));
  return d;
}

Outcome type1() {
  const RunConfig cfg = recipe("type1_modal.conf");
  const DecayRun d = decay_run(cfg, SeriesColumn::ErrH1, "type1");
  RunConfig exact = cfg;
  exact.set("exact_start", "true");
  const AssimilationResult r = run_assimilation(exact.assimilation());
  double worst = 0.0;
  for (const auto& row : r.series.rows) worst = std::max(worst, row.err_L2);
  std::ostringstream body;
  for (const auto& row : r.series.rows) body << format_double(row.err_L2) << '\n';
  Outcome o;
  o.pass = d.fit.alpha > 0.0 && d.fit.r_squared > 0.95 && d.terminal < 1e-8 * d.initial && worst <= 1e-12 &&
           d.bad_insertions == 0;
  o.detail = fmt("err_H1 alpha %.4f r2 %.4f, terminal/initial %.3e (limit 1e-8), non-improving insertions %ld, "
                 "exact-start max err_L2 %.3e (limit 1e-12), %.1f s",
                 d.fit.alpha, d.fit.r_squared, d.terminal / d.initial, d.bad_insertions, worst, d.secs);
  o.body = d.body + body.str();
  return o;
}

Outcome type2() {
  const RunConfig cfg = recipe("type2_voronoi.conf");
  const DecayRun d = decay_run(cfg, SeriesColumn::ErrH2, "type2");
  Outcome o;
  o.pass = d.fit.alpha > 0.0 && d.fit.r_squared > 0.95 && d.terminal < 1e-6 * d.initial && d.bad_insertions == 0 &&
           d.secs < 900.0;
  o.detail = fmt("err_H2 alpha %.4f r2 %.4f, terminal/initial %.3e (limit 1e-6), non-improving insertions %ld, "
                 "%.1f s (limit 900 s)",
                 d.fit.alpha, d.fit.r_squared, d.terminal / d.initial, d.bad_insertions, d.secs);
  o.body = d.body;
  return o;
}

// --- 8 ---------------------------------------------------------------------------

Outcome sweep() {
  const RunConfig base = recipe("delta_sweep.conf");
  std::vector<double> deltas = base.get_list("sweep_delta");
  std::sort(deltas.begin(), deltas.end());
  std::vector<SweepEntry> entries;
  std::string detail;
  for (double d : deltas) {
    RunConfig c = base;
    c.set("delta", format_double(d));
    const AssimilationResult r = run_assimilation(c.assimilation());
    entries.push_back(summarize_sweep_run(d, r.series));
    const SweepEntry& e = entries.back();
    detail += fmt("delta %g: contraction %.4g alpha %.4g r2 %.3f -> %s; ", d, e.contraction, e.fit.alpha,
                  e.fit.r_squared, e.contracting ? "contracting" : "non-contracting");
  }
  const bool some = std::any_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.contracting; });
  Outcome o;
  o.pass = !entries.empty() && some && !entries.back().contracting;
  o.detail = detail;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{{1, taylor_green},   {2, spectral_identities}, {3, interpolant_audit},
                                        {4, filter_audit},   {5, containment},         {6, type1},
                                        {7, type2},          {8, sweep}};
  std::vector<std::string> bodies(8);
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    bodies[c.id - 1] = o.body;
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }

  // Determinism: repeat 1-7 and compare the CSV bodies byte for byte.
  std::string mismatched;
  bool all_nonempty = true;
  for (const auto& c : criteria) {
    if (c.id > 7) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception&) {
    }
    all_nonempty = all_nonempty && !o.body.empty();
    if (o.body != bodies[c.id - 1]) mismatched += " " + std::to_string(c.id);
  }
  const bool det = mismatched.empty() && all_nonempty;
  failed += det ? 0 : 1;
  std::printf("criterion 9: %s  re-ran 1-7 with the same seeds; %s\n", det ? "PASS" : "FAIL",
              det ? "all CSV bodies byte-identical" : ("differing or empty bodies:" + mismatched).c_str());
  fs::remove_all(scratch());
  return failed == 0 ? 0 : 1;
}
