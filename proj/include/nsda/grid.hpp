#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace nsda {

using cplx = std::complex<double>;

/// Uniform n x n collocation grid on the periodic square [0, L)^2.
///
/// Coefficients and samples share one flat layout: index = j * n + i, where
/// i runs along x1 and j along x2. Mode (m1, m2) sits at the standard DFT
/// position, i.e. m = i for i < n/2 and m = i - n above. The Nyquist row and
/// column (i or j == n/2) are never populated.
class Grid {
 public:
  Grid(int n, double length);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }

  /// Fundamental wavenumber 2*pi/L.
  double k0() const noexcept;
  /// Smallest Stokes eigenvalue (2*pi/L)^2.
  double lambda1() const noexcept { return k0() * k0(); }
  /// Largest |k|^2 on the non-Nyquist lattice.
  double max_k2() const noexcept;
  /// Integer mode number along one axis for array position p.
  int mode_number(int p) const noexcept { return p < n_ / 2 ? p : p - n_; }

  int m1(std::size_t idx) const noexcept { return tables_->m1[idx]; }
  int m2(std::size_t idx) const noexcept { return tables_->m2[idx]; }
  double kx(std::size_t idx) const noexcept { return tables_->kx[idx]; }
  double ky(std::size_t idx) const noexcept { return tables_->ky[idx]; }
  double k2(std::size_t idx) const noexcept { return tables_->k2[idx]; }
  /// True for the Nyquist row/column and for the mean mode.
  bool excluded(std::size_t idx) const noexcept { return tables_->excluded[idx] != 0; }

  /// Flat index of integer mode (m1, m2); both must satisfy |m| < n/2.
  std::size_t index_of(int m1, int m2) const;
  /// Flat index of the mode -k.
  std::size_t conjugate_index(std::size_t idx) const noexcept;

  /// Physical coordinates of sample idx.
  double x1(std::size_t idx) const noexcept { return spacing() * static_cast<double>(idx % n_); }
  double x2(std::size_t idx) const noexcept { return spacing() * static_cast<double>(idx / n_); }
  double spacing() const noexcept { return length_ / n_; }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  struct Tables {
    std::vector<int> m1, m2;
    std::vector<double> kx, ky, k2;
    std::vector<unsigned char> excluded;
  };

  int n_;
  double length_;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace nsda
