#include "nsda/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nsda/errors.hpp"

namespace nsda {

double periodic_distance2(Point a, Point b, double length) noexcept {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  dx = std::min(dx, length - dx);
  dy = std::min(dy, length - dy);
  return dx * dx + dy * dy;
}

namespace kernels {
namespace {

// |k|^(2 alpha) with exact products for the integer orders used everywhere.
inline double k2_power(double k2, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return k2;
  if (alpha == 2.0) return k2 * k2;
  if (alpha == -1.0) return 1.0 / k2;
  return std::pow(k2, alpha);
}

inline double row_power(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
                        double alpha, int row) {
  const int n = grid.n();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(row) * n + i;
    if (grid.excluded(idx)) continue;
    double p = std::norm(a[idx]);
    if (!b.empty()) p += std::norm(b[idx]);
    acc += k2_power(grid.k2(idx), alpha) * p;
  }
  return acc;
}

inline double row_pairing(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
                          std::span<const cplx> c, std::span<const cplx> d, int row) {
  const int n = grid.n();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(row) * n + i;
    if (grid.excluded(idx)) continue;
    double p = (a[idx] * std::conj(c[idx])).real();
    if (!b.empty()) p += (b[idx] * std::conj(d[idx])).real();
    acc += p;
  }
  return acc;
}

inline int nearest_node(Point x, std::span<const Point> nodes, double length) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double d2 = periodic_distance2(x, nodes[j], length);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(j);
    }
  }
  return best;
}

inline void check_cells(const Grid& grid, int cells) {
  if (cells <= 0 || grid.n() % cells != 0) {
    throw ConfigError("volume-element count must divide the grid size");
  }
}

inline double synthesize_one(const Grid& grid, std::span<const cplx> coeffs, Point p) {
  const int n = grid.n();
  const double k0 = grid.k0();
  std::vector<cplx> ex(n), ey(n);
  for (int q = 0; q < n; ++q) {
    const int m = grid.mode_number(q);
    ex[q] = std::polar(1.0, k0 * m * p.x);
    ey[q] = std::polar(1.0, k0 * m * p.y);
  }
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    cplx row = 0.0;
    for (int i = 0; i < n; ++i) row += coeffs[static_cast<std::size_t>(j) * n + i] * ex[i];
    acc += (row * ey[j]).real();
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Serial reference

namespace serial {

double weighted_power(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
                      double alpha) {
  double total = 0.0;
  for (int row = 0; row < grid.n(); ++row) total += row_power(grid, a, b, alpha, row);
  return total;
}

double pairing(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
               std::span<const cplx> c, std::span<const cplx> d) {
  double total = 0.0;
  for (int row = 0; row < grid.n(); ++row) total += row_pairing(grid, a, b, c, d, row);
  return total;
}

void advect(std::span<const cplx> vel, std::span<const cplx> grad, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = cplx(vel[i].real() * grad[i].real() + vel[i].imag() * grad[i].imag(), 0.0);
  }
}

std::vector<int> voronoi_labels(const Grid& grid, std::span<const Point> nodes) {
  std::vector<int> labels(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    labels[idx] = nearest_node({grid.x1(idx), grid.x2(idx)}, nodes, grid.length());
  }
  return labels;
}

void cell_average(const Grid& grid, int cells, std::span<const double> values,
                  std::span<double> out) {
  check_cells(grid, cells);
  const int n = grid.n();
  const int w = n / cells;
  for (int cj = 0; cj < cells; ++cj) {
    for (int ci = 0; ci < cells; ++ci) {
      double sum = 0.0;
      for (int j = cj * w; j < (cj + 1) * w; ++j)
        for (int i = ci * w; i < (ci + 1) * w; ++i) sum += values[static_cast<std::size_t>(j) * n + i];
      const double mean = sum / (static_cast<double>(w) * w);
      for (int j = cj * w; j < (cj + 1) * w; ++j)
        for (int i = ci * w; i < (ci + 1) * w; ++i) out[static_cast<std::size_t>(j) * n + i] = mean;
    }
  }
}

void scatter_labels(std::span<const int> labels, std::span<const double> node_values,
                    double shift, std::span<double> out) {
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = node_values[labels[i]] - shift;
}

std::vector<double> synthesize_at(const Grid& grid, std::span<const cplx> coeffs,
                                  std::span<const Point> points) {
  std::vector<double> values(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) values[p] = synthesize_one(grid, coeffs, points[p]);
  return values;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP

namespace omp {

double weighted_power(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
                      double alpha) {
  const int n = grid.n();
  std::vector<double> partial(n);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < n; ++row) partial[row] = row_power(grid, a, b, alpha, row);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double pairing(const Grid& grid, std::span<const cplx> a, std::span<const cplx> b,
               std::span<const cplx> c, std::span<const cplx> d) {
  const int n = grid.n();
  std::vector<double> partial(n);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < n; ++row) partial[row] = row_pairing(grid, a, b, c, d, row);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void advect(std::span<const cplx> vel, std::span<const cplx> grad, std::span<cplx> out) {
  const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[i] = cplx(vel[i].real() * grad[i].real() + vel[i].imag() * grad[i].imag(), 0.0);
  }
}

std::vector<int> voronoi_labels(const Grid& grid, std::span<const Point> nodes) {
  std::vector<int> labels(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
    labels[idx] = nearest_node({grid.x1(idx), grid.x2(idx)}, nodes, grid.length());
  }
  return labels;
}

void cell_average(const Grid& grid, int cells, std::span<const double> values,
                  std::span<double> out) {
  check_cells(grid, cells);
  const int n = grid.n();
  const int w = n / cells;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < cells * cells; ++c) {
    const int cj = c / cells;
    const int ci = c % cells;
    double sum = 0.0;
    for (int j = cj * w; j < (cj + 1) * w; ++j)
      for (int i = ci * w; i < (ci + 1) * w; ++i) sum += values[static_cast<std::size_t>(j) * n + i];
    const double mean = sum / (static_cast<double>(w) * w);
    for (int j = cj * w; j < (cj + 1) * w; ++j)
      for (int i = ci * w; i < (ci + 1) * w; ++i) out[static_cast<std::size_t>(j) * n + i] = mean;
  }
}

void scatter_labels(std::span<const int> labels, std::span<const double> node_values,
                    double shift, std::span<double> out) {
  const auto count = static_cast<std::ptrdiff_t>(labels.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = node_values[labels[i]] - shift;
}

std::vector<double> synthesize_at(const Grid& grid, std::span<const cplx> coeffs,
                                  std::span<const Point> points) {
  std::vector<double> values(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t p = 0; p < count; ++p) values[p] = synthesize_one(grid, coeffs, points[p]);
  return values;
}

}  // namespace omp
}  // namespace kernels
}  // namespace nsda
