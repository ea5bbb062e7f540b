#pragma once

// Spectrally filtered observations J = P_lambda P_sigma I_h, the complement
// E = I - J, the audits of the E-bounds, and the discrete-in-time insertion
// loop u_{n+1} = E S(t_{n+1}, t_n; u_n) + J U(t_{n+1}).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsda/diagnostics.hpp"
#include "nsda/observables.hpp"
#include "nsda/solver.hpp"

namespace nsda {

struct FilterSpec {
  double lambda = 0.0;
  InterpolantSpec interpolant;

  /// lambda1 <= lambda <= (k0 n / 3)^2.
  void validate(const Grid& grid) const;
};

class Filter {
 public:
  Filter(FilterSpec spec, const Grid& grid);

  const FilterSpec& spec() const noexcept { return spec_; }
  const Interpolant& interpolant() const noexcept { return interp_; }
  double lambda() const noexcept { return spec_.lambda; }

  /// P_lambda P_sigma I_h U: supported on |k|^2 <= lambda, divergence-free.
  SpectralVelocity J(const SpectralVelocity& u) const;
  /// U - J U.
  SpectralVelocity E(const SpectralVelocity& u) const;

 private:
  FilterSpec spec_;
  Interpolant interp_;
};

SpectralVelocity apply_J(const FilterSpec& filter, const SpectralVelocity& u);
SpectralVelocity apply_E(const FilterSpec& filter, const SpectralVelocity& u);

/// c1 lambda h^2.
double epsilon_type1(double c1, double lambda, double h);
/// c1 lambda^2 h^2 (1 + lambda1 h^2) / lambda1.
double epsilon_type2(double c1, double lambda, double h, double lambda1);

struct BoundCheck {
  std::string name;      ///< e.g. "|EU|^2 <= (lambda lambda1)^-1 (1+eps) |AU|^2"
  double worst_ratio;    ///< max over the ensemble of lhs / (rhs without 1+eps)
  double limit;          ///< 1 + eps
  bool passed;
};

struct AuditReport {
  InterpolantType type = InterpolantType::I;
  double c1 = 0.0;
  double h = 0.0;
  double lambda = 0.0;
  double epsilon_I = 0.0;   ///< only meaningful for type-I interpolants
  double epsilon_II = 0.0;
  int ensemble = 0;
  std::vector<BoundCheck> checks;
  bool passed = false;
};

/// Evaluates every applicable E-bound over a seeded ensemble: the two type-I
/// bounds (type-I interpolants only) and the three type-II bounds (all
/// interpolants, since type I implies type II with the same c1). Requires a
/// certified c1 on the interpolant.
AuditReport audit_E(const FilterSpec& filter, int ensemble_size, std::uint64_t seed, const Grid& grid);

/// E S(t_{n+1}, t_n; u_n) + J truth_next, evaluated as S + J(truth_next - S)
/// so that exact data is an exact fixed point.
SpectralVelocity assimilation_step(const Filter& filter, const SpectralVelocity& u_n,
                                   const SpectralVelocity& truth_next, const SolverParams& solver,
                                   double t_n, double t_next);

struct AssimilationConfig {
  SolverParams solver;
  FilterSpec filter;
  double delta = 0.0;     ///< insertion interval
  double t0 = 0.0;        ///< assimilation start; truth spin-up ends here
  double horizon = 0.0;   ///< assimilation window length
  double spinup = 0.0;    ///< truth spin-up length before t0
  std::uint64_t seed = 0;
  InitialCondition init{};       ///< truth at t0 - spinup
  bool exact_start = false;      ///< u_0 = U(t_0) instead of J U(t_0)
  bool override_audit = false;
  int audit_ensemble = 64;
  int c1_ensemble = 64;

  /// Step multiples and positivity; throws ConfigError.
  void validate() const;
  long steps_per_window() const;
  long windows() const;
};

struct AssimilationResult {
  ErrorSeries series;
  AuditReport audit;
  std::optional<C1Estimate> c1_estimate;  ///< set when c1 was estimated here
  State truth;                            ///< final truth state
  State approx;                           ///< final assimilated state
};

/// Truth spin-up, then lockstep truth/assimilated runs with insertions every
/// delta, recording the errors after every solver step.
AssimilationResult run_assimilation(const AssimilationConfig& config);

/// Geometric-mean per-insertion factor of the post-insertion |v|; < 1 means
/// the insertions contract the error.
double contraction_factor(const ErrorSeries& series);

/// One row of a delta sweep at fixed (lambda, h).
struct SweepEntry {
  double delta = 0.0;
  double contraction = 0.0;     ///< contraction_factor of the run
  DecayFit fit;                 ///< err_L2 over the whole window
  double terminal_ratio = 0.0;  ///< final err_L2 / initial err_L2
  bool contracting = false;     ///< alpha > 0 with r^2 >= 0.5
};

SweepEntry summarize_sweep_run(double delta, const ErrorSeries& series);

}  // namespace nsda
