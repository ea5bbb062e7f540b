#include "nsda/solver.hpp"

#include <cmath>
#include <string>

#include "nsda/errors.hpp"
#include "nsda/fft.hpp"
#include "nsda/kernels.hpp"
#include "nsda/random.hpp"

namespace nsda {
namespace {

constexpr cplx kI{0.0, 1.0};

bool dealias_keep(const Grid& grid, std::size_t idx, Dealias rule) {
  if (grid.excluded(idx)) return false;
  if (rule == Dealias::None) return true;
  // |m| < n/3 on both axes: quadratic products then alias only onto
  // discarded modes.
  return 3 * std::abs(grid.m1(idx)) < grid.n() && 3 * std::abs(grid.m2(idx)) < grid.n();
}

void require_finite(const SpectralScalar& omega, double t) {
  for (const cplx& v : omega.coeffs()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw BlowUpError("non-finite vorticity coefficient at t = " + std::to_string(t), t);
    }
  }
}

}  // namespace

// --- ForcingSpec ----------------------------------------------------------------

ForcingSpec& ForcingSpec::add_pair(int m1, int m2, cplx amplitude, double omega) {
  modes_.push_back({m1, m2, amplitude, omega});
  modes_.push_back({-m1, -m2, std::conj(amplitude), omega});
  return *this;
}

ForcingSpec ForcingSpec::low_mode(double amplitude) {
  ForcingSpec f;
  f.add_pair(1, 0, amplitude);
  f.add_pair(0, 1, amplitude);
  f.add_pair(1, 1, amplitude);
  f.add_pair(1, -1, amplitude);
  return f;
}

void ForcingSpec::validate(const Grid& grid) const {
  for (const auto& m : modes_) {
    if (m.m1 == 0 && m.m2 == 0) throw ConfigError("forcing on the mean mode is not allowed");
    grid.index_of(m.m1, m.m2);  // throws when out of band
    bool paired = false;
    for (const auto& o : modes_) {
      if (o.m1 == -m.m1 && o.m2 == -m.m2 && o.amplitude == std::conj(m.amplitude) &&
          o.omega == m.omega) {
        paired = true;
        break;
      }
    }
    if (!paired) {
      throw ConfigError("forcing mode (" + std::to_string(m.m1) + "," + std::to_string(m.m2) +
                        ") has no Hermitian partner");
    }
  }
}

SpectralScalar ForcingSpec::vorticity_at(const Grid& grid, double t) const {
  SpectralScalar g(grid);
  for (const auto& m : modes_) {
    const double factor = m.omega == 0.0 ? 1.0 : std::cos(m.omega * t);
    g[grid.index_of(m.m1, m.m2)] += m.amplitude * factor;
  }
  return g;
}

SpectralVelocity ForcingSpec::velocity_at(const Grid& grid, double t) const {
  return curl_inv(vorticity_at(grid, t));
}

double ForcingSpec::sup_L2_squared(const Grid& grid) const {
  const double f = norm_alpha(vorticity_at(grid, 0.0), -1.0);
  return f * f;
}

double ForcingSpec::sup_H1_squared(const Grid& grid) const {
  const double f = norm_alpha(vorticity_at(grid, 0.0), 0.0);
  return f * f;
}

double ForcingSpec::sup_dt_Hm1_squared(const Grid& grid) const {
  // df/dt = -omega sin(omega t) f_k per mode. Summing omega^2 |f_k|^2 is an
  // upper bound, attained when all the sines can peak together.
  SpectralScalar d(grid);
  for (const auto& m : modes_) d[grid.index_of(m.m1, m.m2)] += m.amplitude * m.omega;
  const double v = norm_alpha(d, -2.0);
  return v * v;
}

// --- SolverParams --------------------------------------------------------------------

void SolverParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("viscosity nu must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step dt must be positive");
  forcing.validate(grid);
}

bool SolverParams::viscous_step_warning() const { return dt * nu * grid.max_k2() > 2.0; }

// --- dynamics ----------------------------------------------------------------------------

SpectralScalar nonlinear_term(const SpectralScalar& omega, Dealias rule) {
  const Grid& grid = omega.grid();
  const std::size_t size = grid.size();
  std::vector<cplx> vel(size), grad(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    if (!dealias_keep(grid, idx, rule)) continue;
    const double kx = grid.kx(idx);
    const double ky = grid.ky(idx);
    const cplx w = omega[idx];
    const double k2 = kx * kx + ky * ky;
    const cplx s = kI * w / k2;
    const cplx u1 = ky * s;
    const cplx u2 = -kx * s;
    vel[idx] = u1 + kI * u2;
    grad[idx] = kI * kx * w + kI * (kI * ky * w);
  }
  std::vector<cplx> vel_x(size), grad_x(size), prod(size);
  fft::backward(grid, vel, vel_x);
  fft::backward(grid, grad, grad_x);
  kernels::active::advect(vel_x, grad_x, prod);
  SpectralScalar out(grid);
  fft::forward(grid, prod, out.coeffs());
  for (std::size_t idx = 0; idx < size; ++idx) {
    if (!dealias_keep(grid, idx, rule)) out[idx] = 0.0;
  }
  return out;
}

State step(const State& state, const SolverParams& params) {
  const Grid& grid = params.grid;
  const double dt = params.dt;
  const double t1 = state.t + dt;
  const SpectralScalar& w = state.omega;

  const SpectralScalar n0 = nonlinear_term(w, params.dealias);
  const bool forced = !params.forcing.empty();
  const SpectralScalar g0 = forced ? params.forcing.vorticity_at(grid, state.t) : SpectralScalar(grid);
  const SpectralScalar g1 = forced ? params.forcing.vorticity_at(grid, t1) : SpectralScalar(grid);

  SpectralScalar predictor(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    const double a = 0.5 * params.nu * dt * grid.k2(idx);
    predictor[idx] = ((1.0 - a) * w[idx] + dt * (g0[idx] - n0[idx])) / (1.0 + a);
  }
  const SpectralScalar n1 = nonlinear_term(predictor, params.dealias);

  State next{t1, SpectralScalar(grid)};
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    const double a = 0.5 * params.nu * dt * grid.k2(idx);
    const cplx rhs = 0.5 * (g0[idx] + g1[idx]) - 0.5 * (n0[idx] + n1[idx]);
    next.omega[idx] = ((1.0 - a) * w[idx] + dt * rhs) / (1.0 + a);
  }
  require_finite(next.omega, t1);
  return next;
}

void advance(State& state, const SolverParams& params, long steps) {
  for (long s = 0; s < steps; ++s) state = step(state, params);
}

long step_count(double t0, double t1, double dt) {
  if (t1 < t0) throw ConfigError("integration end precedes start");
  const double ratio = (t1 - t0) / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError("interval " + std::to_string(t1 - t0) + " is not a whole number of steps dt = " +
                      std::to_string(dt));
  }
  return static_cast<long>(rounded);
}

SpectralVelocity semi_process(const SpectralVelocity& u0, double t0, double t1,
                              const SolverParams& params) {
  const long steps = step_count(t0, t1, params.dt);
  if (steps == 0) return u0;
  State s{t0, curl(u0)};
  advance(s, params, steps);
  return curl_inv(s.omega);
}

SpectralScalar initial_vorticity(const Grid& grid, const InitialCondition& init, std::uint64_t seed) {
  if (!(init.energy >= 0.0)) throw ConfigError("initial energy must be non-negative");
  SpectralVelocity u(grid);
  if (init.mode) {
    const auto [m1, m2] = *init.mode;
    if (std::abs(m1) >= grid.n() / 2 || std::abs(m2) >= grid.n() / 2 || grid.excluded(grid.index_of(m1, m2))) {
      throw ConfigError("initial mode is not a resolved wavevector");
    }
    SpectralScalar w(grid);
    w[grid.index_of(m1, m2)] = 0.5;
    w[grid.index_of(-m1, -m2)] = 0.5;
    u = curl_inv(w);
  } else {
    const double cutoff = init.cutoff > 0.0 ? init.cutoff : 16.0 * grid.lambda1();
    u = random_field(grid, init.slope, cutoff, mix_seed(seed, 0x696e6974, 0));
  }
  const double e = 0.5 * std::pow(norm_alpha(u, 0.0), 2);
  if (e > 0.0) u *= std::sqrt(init.energy / e);
  return curl(u);
}

void TruthConfig::validate() const {
  solver.validate();
  if (spinup < 0.0) throw ConfigError("spin-up length must be non-negative");
  if (horizon < 0.0) throw ConfigError("horizon must be non-negative");
  if (snapshot_interval < 0.0) throw ConfigError("snapshot interval must be non-negative");
  step_count(0.0, spinup, solver.dt);
  step_count(0.0, horizon, solver.dt);
  if (snapshot_interval > 0.0 && step_count(0.0, snapshot_interval, solver.dt) < 1) {
    throw ConfigError("snapshot interval must span at least one step");
  }
}

TruthRow truth_row(const State& state) {
  const double l2 = norm_alpha(state.omega, -1.0);
  const double h1 = norm_alpha(state.omega, 0.0);
  const double h2 = norm_alpha(state.omega, 1.0);
  return {state.t, 0.5 * l2 * l2, 0.5 * h1 * h1, l2, h1, h2};
}

TruthRun run_truth(const TruthConfig& config, const std::function<void(const State&)>& on_snapshot) {
  config.validate();
  const double dt = config.solver.dt;
  State s{config.t0 - config.spinup, initial_vorticity(config.solver.grid, config.init, config.seed)};
  advance(s, config.solver, step_count(0.0, config.spinup, dt));
  s.t = config.t0;

  const long steps = step_count(0.0, config.horizon, dt);
  const long cadence = config.snapshot_interval > 0.0 ? step_count(0.0, config.snapshot_interval, dt) : 0;
  TruthRun run{{}, s};
  run.rows.reserve(static_cast<std::size_t>(steps + 1));
  run.rows.push_back(truth_row(s));
  if (on_snapshot) on_snapshot(s);
  for (long i = 1; i <= steps; ++i) {
    s = step(s, config.solver);
    s.t = config.t0 + dt * static_cast<double>(i);
    run.rows.push_back(truth_row(s));
    const bool due = cadence > 0 ? i % cadence == 0 || i == steps : i == steps;
    if (on_snapshot && due) on_snapshot(s);
  }
  run.final_state = std::move(s);
  return run;
}

double energy(const SpectralScalar& omega) {
  const double v = norm_alpha(omega, -1.0);
  return 0.5 * v * v;
}

double enstrophy(const SpectralScalar& omega) {
  const double v = norm_alpha(omega, 0.0);
  return 0.5 * v * v;
}

}  // namespace nsda
