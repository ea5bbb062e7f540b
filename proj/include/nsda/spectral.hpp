#pragma once

// Fourier-space fields on the periodic square and the operators built on
// them: transforms, alpha-norms, Leray projection, spectral truncation, curl
// and its inverse, and the seeded random-field generator.
//
// Norm convention: ||U||_alpha^2 = L^2 * sum_k |k|^(2 alpha) |U_k|^2, so
// alpha = 0, 1, 2 give |U|, ||U|| and |AU|.

#include <cstdint>
#include <span>
#include <vector>

#include "nsda/grid.hpp"

namespace nsda {

/// Real samples of a scalar (1 component) or vector (2 components) field.
class PhysicalField {
 public:
  PhysicalField(Grid grid, int components);
  PhysicalField(Grid grid, int components, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::span<double> component(int c);
  std::span<const double> component(int c) const;
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

 private:
  Grid grid_;
  int components_;
  std::vector<double> values_;
};

/// Scalar coefficients (vorticity and friends). Invariants: Hermitian
/// symmetry, zero mean, zero Nyquist row/column.
class SpectralScalar {
 public:
  explicit SpectralScalar(Grid grid);
  SpectralScalar(Grid grid, std::vector<cplx> coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<cplx> coeffs() noexcept { return c_; }
  std::span<const cplx> coeffs() const noexcept { return c_; }
  cplx& operator[](std::size_t idx) { return c_[idx]; }
  const cplx& operator[](std::size_t idx) const { return c_[idx]; }

  SpectralScalar& operator+=(const SpectralScalar& o);
  SpectralScalar& operator-=(const SpectralScalar& o);
  SpectralScalar& operator*=(double s);

  friend bool operator==(const SpectralScalar&, const SpectralScalar&) = default;

 private:
  Grid grid_;
  std::vector<cplx> c_;
};

/// Velocity coefficients. Invariants as SpectralScalar, plus k . U_k = 0 for
/// fields produced by leray_project, curl_inv and random_field.
class SpectralVelocity {
 public:
  explicit SpectralVelocity(Grid grid);
  SpectralVelocity(Grid grid, std::vector<cplx> u1, std::vector<cplx> u2);

  const Grid& grid() const noexcept { return grid_; }
  std::span<cplx> u1() noexcept { return u1_; }
  std::span<cplx> u2() noexcept { return u2_; }
  std::span<const cplx> u1() const noexcept { return u1_; }
  std::span<const cplx> u2() const noexcept { return u2_; }

  SpectralVelocity& operator+=(const SpectralVelocity& o);
  SpectralVelocity& operator-=(const SpectralVelocity& o);
  SpectralVelocity& operator*=(double s);

  friend bool operator==(const SpectralVelocity&, const SpectralVelocity&) = default;

 private:
  Grid grid_;
  std::vector<cplx> u1_, u2_;
};

SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b);
SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b);
SpectralScalar operator*(double s, SpectralScalar a);
SpectralVelocity operator+(SpectralVelocity a, const SpectralVelocity& b);
SpectralVelocity operator-(SpectralVelocity a, const SpectralVelocity& b);
SpectralVelocity operator*(double s, SpectralVelocity a);

// --- transforms -------------------------------------------------------------

/// Analysis of a 1-component field. Mean and Nyquist content are dropped.
SpectralScalar transform_forward_scalar(const PhysicalField& field);
/// Analysis of a 2-component field. Mean and Nyquist content are dropped; the
/// result is not projected onto divergence-free fields (see leray_project).
SpectralVelocity transform_forward_velocity(const PhysicalField& field);
PhysicalField transform_backward(const SpectralScalar& field);
PhysicalField transform_backward(const SpectralVelocity& field);

// --- norms and pairings -----------------------------------------------------

double norm_alpha(const SpectralScalar& field, double alpha);
double norm_alpha(const SpectralVelocity& field, double alpha);
/// L^2 pairing L^2 * Re sum_k a_k conj(b_k).
double inner(const SpectralScalar& a, const SpectralScalar& b);
double inner(const SpectralVelocity& a, const SpectralVelocity& b);

// --- projections ------------------------------------------------------------

/// U_k <- U_k - (k . U_k) k / |k|^2; mean and Nyquist zeroed.
SpectralVelocity leray_project(const SpectralVelocity& field);
/// Keeps modes with |k|^2 <= lambda (inclusive).
SpectralScalar project_low(const SpectralScalar& field, double lambda);
SpectralVelocity project_low(const SpectralVelocity& field, double lambda);
/// field - project_low(field, lambda).
SpectralScalar project_high(const SpectralScalar& field, double lambda);
SpectralVelocity project_high(const SpectralVelocity& field, double lambda);

// --- curl ---------------------------------------------------------------------

/// xi_k = i (k1 U_k,2 - k2 U_k,1).
SpectralScalar curl(const SpectralVelocity& u);
/// U_k = i (k2, -k1) xi_k / |k|^2.
SpectralVelocity curl_inv(const SpectralScalar& xi);

// --- generators and checks -----------------------------------------------------

/// Divergence-free random field with |U_k| = |m|^slope for 0 < |k|^2 <= cutoff
/// (m the integer wavevector) and phases drawn from a SplitMix64 stream keyed
/// by (seed, m1, m2). Bit-identical for equal arguments.
SpectralVelocity random_field(const Grid& grid, double spectrum_slope, double cutoff,
                              std::uint64_t seed);

struct InvariantDefects {
  double hermitian = 0.0;   ///< max |U_k - conj(U_-k)|
  double mean = 0.0;        ///< |U_0|
  double nyquist = 0.0;     ///< max |U_k| on the Nyquist row/column
  double divergence = 0.0;  ///< max |k . U_k| / |k| (velocity only)
};
InvariantDefects invariant_defects(const SpectralScalar& field);
InvariantDefects invariant_defects(const SpectralVelocity& field);

/// sup_x |U(x)| / (|U|^(1/2) |AU|^(1/2)) on the grid samples; a lower bound on
/// the best constant in Agmon's inequality.
double agmon_ratio(const SpectralVelocity& u);

}  // namespace nsda
