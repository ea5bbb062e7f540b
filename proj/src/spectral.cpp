#include "nsda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsda/errors.hpp"
#include "nsda/fft.hpp"
#include "nsda/kernels.hpp"
#include "nsda/random.hpp"

namespace nsda {
namespace {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw ConfigError("fields live on different grids");
}

void drop_excluded(const Grid& grid, std::span<cplx> c) {
  for (std::size_t idx = 0; idx < c.size(); ++idx) {
    if (grid.excluded(idx)) c[idx] = 0.0;
  }
}

constexpr cplx kI{0.0, 1.0};

// q^(slope/2) for integer q > 0. Quarter-integer exponents use sqrt and
// repeated products only, which IEEE 754 rounds identically everywhere.
double lattice_amplitude(int q, double slope) {
  const double twice = 2.0 * slope;
  if (twice == std::round(twice) && std::abs(twice) <= 64.0) {
    const double root4 = std::sqrt(std::sqrt(static_cast<double>(q)));
    const int reps = static_cast<int>(std::abs(twice));
    double v = 1.0;
    for (int r = 0; r < reps; ++r) v *= root4;
    return twice < 0 ? 1.0 / v : v;
  }
  return std::pow(static_cast<double>(q), 0.5 * slope);
}

}  // namespace

// --- PhysicalField ------------------------------------------------------------

PhysicalField::PhysicalField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components) {
  if (components != 1 && components != 2) throw ConfigError("physical field needs 1 or 2 components");
  values_.assign(grid_.size() * components, 0.0);
}

PhysicalField::PhysicalField(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (components != 1 && components != 2) throw ConfigError("physical field needs 1 or 2 components");
  if (values_.size() != grid_.size() * components) {
    throw ConfigError("physical field has " + std::to_string(values_.size()) +
                      " samples, expected " + std::to_string(grid_.size() * components));
  }
}

std::span<double> PhysicalField::component(int c) {
  return std::span<double>(values_).subspan(grid_.size() * c, grid_.size());
}

std::span<const double> PhysicalField::component(int c) const {
  return std::span<const double>(values_).subspan(grid_.size() * c, grid_.size());
}

// --- SpectralScalar -------------------------------------------------------------

SpectralScalar::SpectralScalar(Grid grid) : grid_(std::move(grid)), c_(grid_.size()) {}

SpectralScalar::SpectralScalar(Grid grid, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), c_(std::move(coeffs)) {
  if (c_.size() != grid_.size()) throw ConfigError("coefficient count does not match grid");
}

SpectralScalar& SpectralScalar::operator+=(const SpectralScalar& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralScalar& SpectralScalar::operator-=(const SpectralScalar& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralScalar& SpectralScalar::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

SpectralScalar operator+(SpectralScalar a, const SpectralScalar& b) { return a += b; }
SpectralScalar operator-(SpectralScalar a, const SpectralScalar& b) { return a -= b; }
SpectralScalar operator*(double s, SpectralScalar a) { return a *= s; }

// --- SpectralVelocity -------------------------------------------------------------

SpectralVelocity::SpectralVelocity(Grid grid)
    : grid_(std::move(grid)), u1_(grid_.size()), u2_(grid_.size()) {}

SpectralVelocity::SpectralVelocity(Grid grid, std::vector<cplx> u1, std::vector<cplx> u2)
    : grid_(std::move(grid)), u1_(std::move(u1)), u2_(std::move(u2)) {
  if (u1_.size() != grid_.size() || u2_.size() != grid_.size()) {
    throw ConfigError("coefficient count does not match grid");
  }
}

SpectralVelocity& SpectralVelocity::operator+=(const SpectralVelocity& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < u1_.size(); ++i) {
    u1_[i] += o.u1_[i];
    u2_[i] += o.u2_[i];
  }
  return *this;
}

SpectralVelocity& SpectralVelocity::operator-=(const SpectralVelocity& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < u1_.size(); ++i) {
    u1_[i] -= o.u1_[i];
    u2_[i] -= o.u2_[i];
  }
  return *this;
}

SpectralVelocity& SpectralVelocity::operator*=(double s) {
  for (auto& v : u1_) v *= s;
  for (auto& v : u2_) v *= s;
  return *this;
}

SpectralVelocity operator+(SpectralVelocity a, const SpectralVelocity& b) { return a += b; }
SpectralVelocity operator-(SpectralVelocity a, const SpectralVelocity& b) { return a -= b; }
SpectralVelocity operator*(double s, SpectralVelocity a) { return a *= s; }

// --- transforms -----------------------------------------------------------------

SpectralScalar transform_forward_scalar(const PhysicalField& field) {
  if (field.components() != 1) throw ConfigError("scalar transform needs a 1-component field");
  SpectralScalar out(field.grid());
  fft::forward_real(field.grid(), field.component(0), out.coeffs());
  drop_excluded(field.grid(), out.coeffs());
  return out;
}

SpectralVelocity transform_forward_velocity(const PhysicalField& field) {
  if (field.components() != 2) throw ConfigError("velocity transform needs a 2-component field");
  const Grid& grid = field.grid();
  // Both real components go through one complex transform: a + ib.
  std::vector<cplx> packed(grid.size()), spec(grid.size());
  auto a = field.component(0);
  auto b = field.component(1);
  for (std::size_t i = 0; i < packed.size(); ++i) packed[i] = cplx(a[i], b[i]);
  fft::forward(grid, packed, spec);
  SpectralVelocity out(grid);
  auto u1 = out.u1();
  auto u2 = out.u2();
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    const cplx p = spec[idx];
    const cplx q = std::conj(spec[grid.conjugate_index(idx)]);
    u1[idx] = 0.5 * (p + q);
    u2[idx] = -0.5 * kI * (p - q);
  }
  return out;
}

PhysicalField transform_backward(const SpectralScalar& field) {
  const Grid& grid = field.grid();
  std::vector<cplx> out(grid.size());
  fft::backward(grid, field.coeffs(), out);
  PhysicalField result(grid, 1);
  auto v = result.component(0);
  for (std::size_t i = 0; i < out.size(); ++i) v[i] = out[i].real();
  return result;
}

PhysicalField transform_backward(const SpectralVelocity& field) {
  const Grid& grid = field.grid();
  std::vector<cplx> packed(grid.size()), out(grid.size());
  auto u1 = field.u1();
  auto u2 = field.u2();
  for (std::size_t i = 0; i < packed.size(); ++i) packed[i] = u1[i] + kI * u2[i];
  fft::backward(grid, packed, out);
  PhysicalField result(grid, 2);
  auto a = result.component(0);
  auto b = result.component(1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    a[i] = out[i].real();
    b[i] = out[i].imag();
  }
  return result;
}

// --- norms ------------------------------------------------------------------------

double norm_alpha(const SpectralScalar& field, double alpha) {
  const double L = field.grid().length();
  const double s = kernels::active::weighted_power(field.grid(), field.coeffs(), {}, alpha);
  return L * std::sqrt(s);
}

double norm_alpha(const SpectralVelocity& field, double alpha) {
  const double L = field.grid().length();
  const double s = kernels::active::weighted_power(field.grid(), field.u1(), field.u2(), alpha);
  return L * std::sqrt(s);
}

double inner(const SpectralScalar& a, const SpectralScalar& b) {
  require_same_grid(a.grid(), b.grid());
  const double L = a.grid().length();
  return L * L * kernels::active::pairing(a.grid(), a.coeffs(), {}, b.coeffs(), {});
}

double inner(const SpectralVelocity& a, const SpectralVelocity& b) {
  require_same_grid(a.grid(), b.grid());
  const double L = a.grid().length();
  return L * L * kernels::active::pairing(a.grid(), a.u1(), a.u2(), b.u1(), b.u2());
}

// --- projections --------------------------------------------------------------------

SpectralVelocity leray_project(const SpectralVelocity& field) {
  const Grid& grid = field.grid();
  SpectralVelocity out(grid);
  auto a = field.u1();
  auto b = field.u2();
  auto o1 = out.u1();
  auto o2 = out.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    const double kx = grid.kx(idx);
    const double ky = grid.ky(idx);
    const cplx kdotu = kx * a[idx] + ky * b[idx];
    if (kdotu == 0.0) {
      o1[idx] = a[idx];
      o2[idx] = b[idx];
      continue;
    }
    const double k2 = kx * kx + ky * ky;
    o1[idx] = a[idx] - kdotu * (kx / k2);
    o2[idx] = b[idx] - kdotu * (ky / k2);
  }
  return out;
}

SpectralScalar project_low(const SpectralScalar& field, double lambda) {
  SpectralScalar out = field;
  const Grid& grid = field.grid();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.k2(idx) > lambda) out[idx] = 0.0;
  }
  return out;
}

SpectralVelocity project_low(const SpectralVelocity& field, double lambda) {
  SpectralVelocity out = field;
  const Grid& grid = field.grid();
  auto o1 = out.u1();
  auto o2 = out.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.k2(idx) > lambda) {
      o1[idx] = 0.0;
      o2[idx] = 0.0;
    }
  }
  return out;
}

SpectralScalar project_high(const SpectralScalar& field, double lambda) {
  SpectralScalar out = field;
  const Grid& grid = field.grid();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.k2(idx) <= lambda) out[idx] = 0.0;
  }
  return out;
}

SpectralVelocity project_high(const SpectralVelocity& field, double lambda) {
  SpectralVelocity out = field;
  const Grid& grid = field.grid();
  auto o1 = out.u1();
  auto o2 = out.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.k2(idx) <= lambda) {
      o1[idx] = 0.0;
      o2[idx] = 0.0;
    }
  }
  return out;
}

// --- curl -----------------------------------------------------------------------

SpectralScalar curl(const SpectralVelocity& u) {
  const Grid& grid = u.grid();
  SpectralScalar out(grid);
  auto a = u.u1();
  auto b = u.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    out[idx] = kI * (grid.kx(idx) * b[idx] - grid.ky(idx) * a[idx]);
  }
  return out;
}

SpectralVelocity curl_inv(const SpectralScalar& xi) {
  const Grid& grid = xi.grid();
  SpectralVelocity out(grid);
  auto o1 = out.u1();
  auto o2 = out.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx)) continue;
    const double k2 = grid.kx(idx) * grid.kx(idx) + grid.ky(idx) * grid.ky(idx);
    const cplx s = kI * xi[idx] / k2;
    o1[idx] = grid.ky(idx) * s;
    o2[idx] = -grid.kx(idx) * s;
  }
  return out;
}

// --- generators -------------------------------------------------------------------

SpectralVelocity random_field(const Grid& grid, double spectrum_slope, double cutoff,
                              std::uint64_t seed) {
  SpectralVelocity out(grid);
  auto o1 = out.u1();
  auto o2 = out.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.excluded(idx) || grid.k2(idx) > cutoff) continue;
    const int m1 = grid.m1(idx);
    const int m2 = grid.m2(idx);
    // Draw on the canonical half-plane and mirror onto -k.
    if (!(m2 > 0 || (m2 == 0 && m1 > 0))) continue;
    SplitMix64 rng(mix_seed(seed, m1, m2));
    double a = 0.0, b = 0.0, r2 = 0.0;
    do {
      a = 2.0 * rng.uniform() - 1.0;
      b = 2.0 * rng.uniform() - 1.0;
      r2 = a * a + b * b;
    } while (r2 > 1.0 || r2 < 1e-12);
    const double r = std::sqrt(r2);
    const int q = m1 * m1 + m2 * m2;
    const double amp = lattice_amplitude(q, spectrum_slope);
    const cplx phase(amp * (a / r), amp * (b / r));
    const double mnorm = std::sqrt(static_cast<double>(q));
    const cplx v1 = phase * (-m2 / mnorm);
    const cplx v2 = phase * (m1 / mnorm);
    o1[idx] = v1;
    o2[idx] = v2;
    const std::size_t c = grid.conjugate_index(idx);
    o1[c] = std::conj(v1);
    o2[c] = std::conj(v2);
  }
  return out;
}

InvariantDefects invariant_defects(const SpectralScalar& field) {
  const Grid& grid = field.grid();
  InvariantDefects d;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const cplx v = field[idx];
    if (grid.m1(idx) == 0 && grid.m2(idx) == 0) {
      d.mean = std::abs(v);
    } else if (grid.excluded(idx)) {
      d.nyquist = std::max(d.nyquist, std::abs(v));
    } else {
      d.hermitian = std::max(d.hermitian, std::abs(v - std::conj(field[grid.conjugate_index(idx)])));
    }
  }
  return d;
}

InvariantDefects invariant_defects(const SpectralVelocity& field) {
  const Grid& grid = field.grid();
  InvariantDefects d;
  auto a = field.u1();
  auto b = field.u2();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double mag = std::hypot(std::abs(a[idx]), std::abs(b[idx]));
    if (grid.m1(idx) == 0 && grid.m2(idx) == 0) {
      d.mean = mag;
    } else if (grid.excluded(idx)) {
      d.nyquist = std::max(d.nyquist, mag);
    } else {
      const std::size_t c = grid.conjugate_index(idx);
      d.hermitian = std::max(d.hermitian, std::abs(a[idx] - std::conj(a[c])));
      d.hermitian = std::max(d.hermitian, std::abs(b[idx] - std::conj(b[c])));
      const double kn = std::sqrt(grid.k2(idx));
      d.divergence = std::max(d.divergence, std::abs(grid.kx(idx) * a[idx] + grid.ky(idx) * b[idx]) / kn);
    }
  }
  return d;
}

double agmon_ratio(const SpectralVelocity& u) {
  const PhysicalField f = transform_backward(u);
  auto a = f.component(0);
  auto b = f.component(1);
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::hypot(a[i], b[i]));
  const double denom = std::sqrt(norm_alpha(u, 0.0) * norm_alpha(u, 2.0));
  return denom > 0.0 ? sup / denom : 0.0;
}

}  // namespace nsda
