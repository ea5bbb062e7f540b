#pragma once

// Test-side oracles: plain mode loops and an independent RNG, so the checks
// do not lean on the code under test.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "nsda/spectral.hpp"

namespace testing {

using nsda::cplx;
using nsda::Grid;

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// L^2 sum_k |k|^(2 alpha) |c_k|^2 by direct summation over the lattice.
inline double oracle_norm2(const Grid& g, std::span<const cplx> a, std::span<const cplx> b, int alpha) {
  const int n = g.n();
  const double k0 = 2.0 * std::numbers::pi / g.length();
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int m1 = i < n / 2 ? i : i - n;
      const int m2 = j < n / 2 ? j : j - n;
      if (i == n / 2 || j == n / 2 || (m1 == 0 && m2 == 0)) continue;
      const double k2 = k0 * k0 * (m1 * m1 + m2 * m2);
      const std::size_t idx = static_cast<std::size_t>(j) * n + i;
      double w = std::norm(a[idx]);
      if (!b.empty()) w += std::norm(b[idx]);
      s += std::pow(k2, alpha) * w;
    }
  }
  return g.length() * g.length() * s;
}

inline double oracle_norm2(const nsda::SpectralVelocity& u, int alpha) {
  return oracle_norm2(u.grid(), u.u1(), u.u2(), alpha);
}
inline double oracle_norm2(const nsda::SpectralScalar& w, int alpha) {
  return oracle_norm2(w.grid(), w.coeffs(), {}, alpha);
}

// Random real samples from std::mt19937_64.
inline nsda::PhysicalField random_physical(const Grid& g, int components, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(g.size() * components);
  for (auto& x : v) x = d(rng);
  return nsda::PhysicalField(g, components, std::move(v));
}

// Hermitian random scalar with a zero mean and zero Nyquist lines, built by
// filling the half-plane and mirroring.
inline nsda::SpectralScalar random_scalar(const Grid& g, unsigned seed, double decay = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  nsda::SpectralScalar w(g);
  const int n = g.n();
  for (int m2 = -(n / 2 - 1); m2 <= n / 2 - 1; ++m2) {
    for (int m1 = -(n / 2 - 1); m1 <= n / 2 - 1; ++m1) {
      if (m1 < 0 || (m1 == 0 && m2 <= 0)) continue;
      const double amp = std::pow(1.0 + m1 * m1 + m2 * m2, -decay);
      const cplx c(amp * d(rng), amp * d(rng));
      w[g.index_of(m1, m2)] = c;
      w[g.index_of(-m1, -m2)] = std::conj(c);
    }
  }
  return w;
}

inline nsda::SpectralVelocity random_velocity(const Grid& g, unsigned seed, double decay = 1.5) {
  return nsda::curl_inv(random_scalar(g, seed, decay));
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace testing
