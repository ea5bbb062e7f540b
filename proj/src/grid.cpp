#include "nsda/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nsda/errors.hpp"

namespace nsda {

Grid::Grid(int n, double length) : n_(n), length_(length) {
  if (n < 4 || n % 2 != 0) {
    throw ConfigError("grid size n must be an even integer >= 4, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("domain length L must be positive and finite");
  }
  auto t = std::make_shared<Tables>();
  const std::size_t total = size();
  t->m1.resize(total);
  t->m2.resize(total);
  t->kx.resize(total);
  t->ky.resize(total);
  t->k2.resize(total);
  t->excluded.resize(total);
  const double base = k0();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * n + i;
      const int a = mode_number(i);
      const int b = mode_number(j);
      t->m1[idx] = a;
      t->m2[idx] = b;
      t->kx[idx] = base * a;
      t->ky[idx] = base * b;
      // |k|^2 from the integer norm so tie modes compare exactly against lambda.
      t->k2[idx] = base * base * static_cast<double>(a * a + b * b);
      t->excluded[idx] = (i == n / 2 || j == n / 2 || (a == 0 && b == 0)) ? 1 : 0;
    }
  }
  tables_ = std::move(t);
}

double Grid::k0() const noexcept { return 2.0 * std::numbers::pi / length_; }

double Grid::max_k2() const noexcept {
  const int m = n_ / 2 - 1;
  return k0() * k0() * 2.0 * m * m;
}

std::size_t Grid::index_of(int a, int b) const {
  if (std::abs(a) >= n_ / 2 || std::abs(b) >= n_ / 2) {
    throw ConfigError("mode (" + std::to_string(a) + "," + std::to_string(b) +
                      ") is outside the resolved band of an n=" + std::to_string(n_) + " grid");
  }
  const int i = a < 0 ? a + n_ : a;
  const int j = b < 0 ? b + n_ : b;
  return static_cast<std::size_t>(j) * n_ + i;
}

std::size_t Grid::conjugate_index(std::size_t idx) const noexcept {
  const std::size_t i = idx % n_;
  const std::size_t j = idx / n_;
  const std::size_t ci = (n_ - i) % n_;
  const std::size_t cj = (n_ - j) % n_;
  return cj * n_ + ci;
}

}  // namespace nsda
