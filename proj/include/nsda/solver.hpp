#pragma once

// Pseudo-spectral integration of the 2D Navier-Stokes equations in vorticity
// form, dW/dt - nu Lap W + (U . grad) W = g, with U = curl_inv W.
//
// Time scheme: Crank-Nicolson on the viscous term, Heun (explicit
// trapezoidal) on advection and forcing. It is a one-step method, so the
// solution operator is a true semi-process: composing two integrations gives
// bit-for-bit the one-shot result.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nsda/diagnostics.hpp"
#include "nsda/spectral.hpp"

namespace nsda {

enum class Dealias { TwoThirds, None };

struct ForcingMode {
  int m1 = 0;
  int m2 = 0;
  cplx amplitude;     ///< coefficient of exp(i k.x) in the vorticity forcing g
  double omega = 0.0; ///< 0 for constant forcing, else amplitude * cos(omega t)
};

/// Vorticity forcing g = curl f given as a Hermitian-closed list of modes.
class ForcingSpec {
 public:
  ForcingSpec() = default;

  /// Adds mode (m1, m2) and its conjugate partner.
  ForcingSpec& add_pair(int m1, int m2, cplx amplitude, double omega = 0.0);
  /// The low-mode default: constant forcing on |k|^2 in {lambda1, 2 lambda1}.
  static ForcingSpec low_mode(double amplitude);

  const std::vector<ForcingMode>& modes() const noexcept { return modes_; }
  bool empty() const noexcept { return modes_.empty(); }

  /// Throws ConfigError unless every mode is resolved, non-zero and paired.
  void validate(const Grid& grid) const;

  SpectralScalar vorticity_at(const Grid& grid, double t) const;
  SpectralVelocity velocity_at(const Grid& grid, double t) const;

  /// F = sup_t |f(t)|^2. Modes are orthogonal and each cos^2 peaks at 1
  /// together at t = 0, so the supremum is the t = 0 value.
  double sup_L2_squared(const Grid& grid) const;
  /// G = sup_t ||f(t)||^2.
  double sup_H1_squared(const Grid& grid) const;
  /// Upper bound on F_* = sup_t ||df/dt||_{-1}^2.
  double sup_dt_Hm1_squared(const Grid& grid) const;

 private:
  std::vector<ForcingMode> modes_;
};

struct SolverParams {
  double nu;
  Grid grid;
  double dt;
  Dealias dealias = Dealias::TwoThirds;
  ForcingSpec forcing{};

  /// Throws ConfigError on nu <= 0, dt <= 0 or a bad forcing list.
  void validate() const;
  /// dt * nu * |k_max|^2 > 2: the viscous scale of the top mode is under-resolved.
  bool viscous_step_warning() const;
};

struct State {
  double t = 0.0;
  SpectralScalar omega;
};

/// Dealiased coefficients of (U . grad) W with U = curl_inv(omega).
SpectralScalar nonlinear_term(const SpectralScalar& omega, Dealias rule = Dealias::TwoThirds);

/// One CN/Heun step. Throws BlowUpError on a non-finite coefficient.
State step(const State& state, const SolverParams& params);

/// Advances `steps` steps in place.
void advance(State& state, const SolverParams& params, long steps);

/// Number of solver steps spanning [t0, t1]; throws ConfigError unless
/// (t1 - t0) / dt is an integer within 1e-9 relative.
long step_count(double t0, double t1, double dt);

/// S(t1, t0; u0): converts to vorticity, integrates, converts back.
SpectralVelocity semi_process(const SpectralVelocity& u0, double t0, double t1,
                              const SolverParams& params);

/// Random start with spectrum |m|^slope below |k|^2 <= cutoff, or a single
/// Laplacian eigenfunction cos(k.x) when `mode` is set. Either way the
/// velocity is rescaled to the requested energy |U|^2 / 2.
struct InitialCondition {
  double slope = -1.0;
  double cutoff = 0.0;  ///< 0: 16 lambda1
  double energy = 0.5;
  std::optional<std::pair<int, int>> mode;
};

SpectralScalar initial_vorticity(const Grid& grid, const InitialCondition& init, std::uint64_t seed);

struct TruthConfig {
  SolverParams solver;
  InitialCondition init{};
  double t0 = 0.0;
  double spinup = 0.0;
  double horizon = 0.0;
  double snapshot_interval = 0.0;  ///< 0: first and last state only
  std::uint64_t seed = 0;

  void validate() const;
};

struct TruthRun {
  std::vector<TruthRow> rows;  ///< one per step from t0 on
  State final_state;
};

TruthRow truth_row(const State& state);

/// Spins up over [t0 - spinup, t0] and records [t0, t0 + horizon]. The
/// callback sees the state at t0 and at every snapshot time after it.
TruthRun run_truth(const TruthConfig& config, const std::function<void(const State&)>& on_snapshot = {});

/// |U|^2 / 2 with U = curl_inv(omega).
double energy(const SpectralScalar& omega);
/// |omega|^2 / 2, equal to ||U||^2 / 2.
double enstrophy(const SpectralScalar& omega);

}  // namespace nsda
