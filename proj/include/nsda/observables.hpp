#pragma once

// Interpolant observables I_h: linear maps from velocity fields to coarse
// L^2 images. Type I satisfies ||U - I_h U||^2 <= c1 h^2 ||U||^2, type II
// ||U - I_h U||^2 <= c1 h^2 (||U||^2 + h^2 |AU|^2).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nsda/kernels.hpp"
#include "nsda/spectral.hpp"

namespace nsda {

enum class InterpolantType { I, II };

/// I_h U = P_lambda_obs U, h = lambda_obs^(-1/2). Type I with c1 = 1.
struct ModalProjection {
  double lambda_obs;
};

/// Averages over an m x m array of square cells, h = L sqrt(2) / m. Type I.
struct VolumeElements {
  int cells;
};

/// Point values spread over the periodic Voronoi cells of the nodes, with
/// the cell-measure mean correction. h is the covering radius. Type II.
struct NodalVoronoi {
  std::vector<Point> nodes;
};

struct InterpolantSpec {
  std::variant<ModalProjection, VolumeElements, NodalVoronoi> kind;
  /// Constant certified by estimate_c1, if any.
  std::optional<double> c1;

  InterpolantType type() const noexcept;
  /// Observation length scale; the exact covering radius for Voronoi nodes.
  double h(const Grid& grid) const;
  std::string describe() const;
};

/// m x m nodes at grid points (requires n % m == 0), offset so that the
/// first node sits at the origin.
std::vector<Point> regular_lattice(const Grid& grid, int m);

/// sup_x min_j |x - x_j| on the periodic square, computed exactly from the
/// vertices of the periodic Voronoi cells.
double covering_radius(std::span<const Point> nodes, double length);

/// Label of the nearest node (periodic metric, lowest index on ties) for
/// every grid sample.
std::vector<int> voronoi_partition(std::span<const Point> nodes, const Grid& grid);

/// Reads "x,y" rows (an optional non-numeric header line is skipped). Nodes
/// must lie in [0, L)^2.
std::vector<Point> read_nodes_csv(const std::filesystem::path& path, double length);

/// An interpolant bound to a grid, with the Voronoi partition, node sample
/// positions and h precomputed.
class Interpolant {
 public:
  Interpolant(InterpolantSpec spec, Grid grid);

  const InterpolantSpec& spec() const noexcept { return spec_; }
  const Grid& grid() const noexcept { return grid_; }
  InterpolantType type() const noexcept { return spec_.type(); }
  double h() const noexcept { return h_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Grid-sampled image I_h U, zero spatial mean.
  PhysicalField apply(const SpectralVelocity& u) const;

 private:
  PhysicalField apply_voronoi(const SpectralVelocity& u) const;

  InterpolantSpec spec_;
  Grid grid_;
  double h_ = 0.0;
  std::vector<int> labels_;
  std::vector<double> cell_weight_;       // |cell_j| / |Omega| on the grid
  std::vector<std::ptrdiff_t> node_sample_;  // grid index, or -1 when off-grid
  std::vector<Point> off_grid_;
  std::vector<std::size_t> off_grid_node_;
};

PhysicalField apply_interpolant(const InterpolantSpec& spec, const SpectralVelocity& u);

/// L^2 distance ||U - I_h U||_{L^2}^2 from grid samples.
double interpolation_error2(const Interpolant& interp, const SpectralVelocity& u);

struct C1Estimate {
  double c1 = 0.0;       ///< max observed ratio, a lower bound on the best constant
  bool verdict = false;  ///< declared-type bound held for every member with c1
  double h = 0.0;
  InterpolantType type = InterpolantType::I;
  int ensemble = 0;
};

/// Empirical c1: max over a seeded ensemble (spectral slopes 0..-3, cutoffs
/// spanning the band) of the type-I or type-II ratio. ensemble_size >= 32.
C1Estimate estimate_c1(const InterpolantSpec& spec, int ensemble_size, std::uint64_t seed,
                       const Grid& grid);

/// True when max/min of the positive estimates is within `factor`.
bool refinement_stable(std::span<const double> c1_values, double factor = 2.0);

/// Ensemble member i used by estimate_c1 and the filter audit.
SpectralVelocity ensemble_member(const Grid& grid, int i, std::uint64_t seed);

}  // namespace nsda
