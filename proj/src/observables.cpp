#include "nsda/observables.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nsda/errors.hpp"
#include "nsda/random.hpp"

namespace nsda {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap_half(double d, double length) {
  d = std::fmod(d, length);
  if (d >= 0.5 * length) d -= length;
  if (d < -0.5 * length) d += length;
  return d;
}

using Polygon = std::vector<Point>;

// Clip a convex polygon to the half-plane q . d <= c.
Polygon clip(const Polygon& poly, Point d, double c) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % m];
    const double fa = a.x * d.x + a.y * d.y - c;
    const double fb = b.x * d.x + b.y * d.y - c;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      const double s = fa / (fa - fb);
      out.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
    }
  }
  return out;
}

double max_radius(const Polygon& poly) {
  double r2 = 0.0;
  for (const Point& p : poly) r2 = std::max(r2, p.x * p.x + p.y * p.y);
  return std::sqrt(r2);
}

struct Candidate {
  Point d;
  double dist;
};

double cell_radius(std::span<const Point> nodes, std::size_t j, double length) {
  const double half = 0.5 * length;
  // Own periodic images bound the cell by this square.
  Polygon cell{{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  std::vector<Candidate> cands;
  cands.reserve(nodes.size() * 9);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i == j) continue;  // own images: already the square
    const double dx0 = wrap_half(nodes[i].x - nodes[j].x, length);
    const double dy0 = wrap_half(nodes[i].y - nodes[j].y, length);
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const Point d{dx0 + a * length, dy0 + b * length};
        cands.push_back({d, std::hypot(d.x, d.y)});
      }
    }
  }
  auto by_dist = [](const Candidate& p, const Candidate& q) { return p.dist < q.dist; };
  const std::size_t first = std::min<std::size_t>(cands.size(), 64);
  std::partial_sort(cands.begin(), cands.begin() + first, cands.end(), by_dist);
  std::size_t k = 0;
  for (; k < first; ++k) {
    if (cands[k].dist == 0.0) throw ConfigError("duplicate observation nodes");
    cell = clip(cell, cands[k].d, 0.5 * cands[k].dist * cands[k].dist);
  }
  double r = max_radius(cell);
  // A bisector at distance dist/2 cannot cut a cell inside the disc of radius r.
  std::vector<Candidate> rest;
  for (std::size_t q = k; q < cands.size(); ++q) {
    if (cands[q].dist < 2.0 * r) rest.push_back(cands[q]);
  }
  std::sort(rest.begin(), rest.end(), by_dist);
  for (const Candidate& c : rest) {
    if (c.dist >= 2.0 * r) break;
    if (c.dist == 0.0) throw ConfigError("duplicate observation nodes");
    cell = clip(cell, c.d, 0.5 * c.dist * c.dist);
    r = max_radius(cell);
  }
  return r;
}

double grid_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

// --- InterpolantSpec -----------------------------------------------------------------

InterpolantType InterpolantSpec::type() const noexcept {
  return std::holds_alternative<NodalVoronoi>(kind) ? InterpolantType::II : InterpolantType::I;
}

double InterpolantSpec::h(const Grid& grid) const {
  return std::visit(
      overloaded{
          [](const ModalProjection& m) {
            if (!(m.lambda_obs > 0.0)) throw ConfigError("modal observation cutoff must be positive");
            return 1.0 / std::sqrt(m.lambda_obs);
          },
          [&](const VolumeElements& v) {
            if (v.cells <= 0) throw ConfigError("volume-element count must be positive");
            return grid.length() * std::sqrt(2.0) / v.cells;
          },
          [&](const NodalVoronoi& v) { return covering_radius(v.nodes, grid.length()); },
      },
      kind);
}

std::string InterpolantSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ModalProjection& m) { os << "modal(lambda_obs=" << m.lambda_obs << ")"; },
                 [&](const VolumeElements& v) { os << "volume(cells=" << v.cells << ")"; },
                 [&](const NodalVoronoi& v) { os << "voronoi(nodes=" << v.nodes.size() << ")"; },
             },
             kind);
  return os.str();
}

// --- node sets ---------------------------------------------------------------------

std::vector<Point> regular_lattice(const Grid& grid, int m) {
  if (m <= 0 || grid.n() % m != 0) {
    throw ConfigError("node lattice size must divide the grid size n = " + std::to_string(grid.n()));
  }
  const int stride = grid.n() / m;
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(m) * m);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      const std::size_t idx = static_cast<std::size_t>(b * stride) * grid.n() + a * stride;
      nodes.push_back({grid.x1(idx), grid.x2(idx)});
    }
  }
  return nodes;
}

double covering_radius(std::span<const Point> nodes, double length) {
  if (nodes.empty()) throw ConfigError("empty node set");
  std::vector<double> radii(nodes.size());
  const auto count = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < count; ++j) radii[j] = cell_radius(nodes, j, length);
  return *std::max_element(radii.begin(), radii.end());
}

std::vector<int> voronoi_partition(std::span<const Point> nodes, const Grid& grid) {
  if (nodes.empty()) throw ConfigError("empty node set");
  return kernels::active::voronoi_labels(grid, nodes);
}

std::vector<Point> read_nodes_csv(const std::filesystem::path& path, double length) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open node file " + path.string());
  std::vector<Point> nodes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected x,y");
    auto parse = [&](std::string_view s, double& v) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && p == s.data() + s.size();
    };
    Point p;
    const std::string_view sv(line);
    if (!parse(sv.substr(0, comma), p.x) || !parse(sv.substr(comma + 1), p.y)) {
      if (nodes.empty() && lineno == 1) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed node row");
    }
    if (p.x < 0.0 || p.x >= length || p.y < 0.0 || p.y >= length) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": node outside [0, L)^2");
    }
    nodes.push_back(p);
  }
  if (nodes.empty()) throw ConfigError("empty node set in " + path.string());
  return nodes;
}

// --- Interpolant -------------------------------------------------------------------

Interpolant::Interpolant(InterpolantSpec spec, Grid grid) : spec_(std::move(spec)), grid_(std::move(grid)) {
  if (const auto* v = std::get_if<VolumeElements>(&spec_.kind)) {
    if (v->cells <= 0 || grid_.n() % v->cells != 0) {
      throw ConfigError("volume-element count must divide the grid size");
    }
  }
  if (const auto* v = std::get_if<NodalVoronoi>(&spec_.kind)) {
    if (v->nodes.empty()) throw ConfigError("empty node set");
    const double L = grid_.length();
    for (const Point& p : v->nodes) {
      if (!(p.x >= 0.0 && p.x < L && p.y >= 0.0 && p.y < L)) throw ConfigError("node outside domain");
    }
    labels_ = voronoi_partition(v->nodes, grid_);
    cell_weight_.assign(v->nodes.size(), 0.0);
    for (int l : labels_) cell_weight_[l] += 1.0;
    for (double& w : cell_weight_) w /= static_cast<double>(grid_.size());
    const double spacing = grid_.spacing();
    const double tol = 1e-12 * L;
    for (std::size_t j = 0; j < v->nodes.size(); ++j) {
      const Point p = v->nodes[j];
      const double fi = std::round(p.x / spacing);
      const double fj = std::round(p.y / spacing);
      const bool on_grid = std::abs(p.x - fi * spacing) <= tol && std::abs(p.y - fj * spacing) <= tol;
      if (on_grid) {
        const auto i = static_cast<std::size_t>(fi) % grid_.n();
        const auto jj = static_cast<std::size_t>(fj) % grid_.n();
        node_sample_.push_back(static_cast<std::ptrdiff_t>(jj * grid_.n() + i));
      } else {
        node_sample_.push_back(-1);
        off_grid_.push_back(p);
        off_grid_node_.push_back(j);
      }
    }
  }
  h_ = spec_.h(grid_);
}

PhysicalField Interpolant::apply(const SpectralVelocity& u) const {
  if (!(u.grid() == grid_)) throw ConfigError("interpolant and field grids differ");
  return std::visit(
      overloaded{
          [&](const ModalProjection& m) { return transform_backward(project_low(u, m.lambda_obs)); },
          [&](const VolumeElements& v) {
            const PhysicalField samples = transform_backward(u);
            PhysicalField out(grid_, 2);
            for (int c = 0; c < 2; ++c) {
              auto dst = out.component(c);
              kernels::active::cell_average(grid_, v.cells, samples.component(c), dst);
              const double mean = grid_mean(dst);
              for (double& x : dst) x -= mean;
            }
            return out;
          },
          [&](const NodalVoronoi&) { return apply_voronoi(u); },
      },
      spec_.kind);
}

PhysicalField Interpolant::apply_voronoi(const SpectralVelocity& u) const {
  const PhysicalField samples = transform_backward(u);
  const std::size_t d = node_sample_.size();
  PhysicalField out(grid_, 2);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> node_values(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (node_sample_[j] >= 0) node_values[j] = samples.component(c)[node_sample_[j]];
    }
    if (!off_grid_.empty()) {
      const auto vals = kernels::active::synthesize_at(grid_, c == 0 ? u.u1() : u.u2(), off_grid_);
      for (std::size_t q = 0; q < vals.size(); ++q) node_values[off_grid_node_[q]] = vals[q];
    }
    // sum_j U(x_j) |cell_j| / |Omega|: the chi-tilde mean correction.
    double shift = 0.0;
    for (std::size_t j = 0; j < d; ++j) shift += node_values[j] * cell_weight_[j];
    kernels::active::scatter_labels(labels_, node_values, shift, out.component(c));
  }
  return out;
}

PhysicalField apply_interpolant(const InterpolantSpec& spec, const SpectralVelocity& u) {
  return Interpolant(spec, u.grid()).apply(u);
}

double interpolation_error2(const Interpolant& interp, const SpectralVelocity& u) {
  const PhysicalField samples = transform_backward(u);
  const PhysicalField image = interp.apply(u);
  double acc = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto a = samples.component(c);
    auto b = image.component(c);
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  }
  const double L = interp.grid().length();
  return L * L * acc / static_cast<double>(interp.grid().size());
}

// --- c1 estimation --------------------------------------------------------------

SpectralVelocity ensemble_member(const Grid& grid, int i, std::uint64_t seed) {
  static constexpr std::array<double, 4> slopes{0.0, -1.0, -2.0, -3.0};
  std::vector<double> cutoffs;
  for (double q = 2.0; q * grid.lambda1() <= grid.max_k2(); q *= 2.0) cutoffs.push_back(q * grid.lambda1());
  const double slope = slopes[i % slopes.size()];
  const double cutoff = cutoffs[(i / slopes.size()) % cutoffs.size()];
  return random_field(grid, slope, cutoff, mix_seed(seed, i, 0x63));
}

C1Estimate estimate_c1(const InterpolantSpec& spec, int ensemble_size, std::uint64_t seed,
                       const Grid& grid) {
  if (ensemble_size < 32) throw ConfigError("c1 estimation needs an ensemble of at least 32 fields");
  const Interpolant interp(spec, grid);
  const double h = interp.h();
  const bool type2 = interp.type() == InterpolantType::II;
  std::vector<double> ratios(ensemble_size);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < ensemble_size; ++i) {
    const SpectralVelocity u = ensemble_member(grid, i, seed);
    const double err2 = interpolation_error2(interp, u);
    const double v = norm_alpha(u, 1.0);
    double denom = h * h * v * v;
    if (type2) {
      const double a = norm_alpha(u, 2.0);
      denom += h * h * h * h * a * a;
    }
    ratios[i] = err2 / denom;
  }
  C1Estimate est;
  est.h = h;
  est.type = interp.type();
  est.ensemble = ensemble_size;
  est.c1 = 0.0;
  bool finite = true;
  for (double r : ratios) {
    if (!std::isfinite(r)) finite = false;
    else est.c1 = std::max(est.c1, r);
  }
  est.verdict = finite && std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r <= est.c1; });
  return est;
}

bool refinement_stable(std::span<const double> c1_values, double factor) {
  if (c1_values.empty()) return false;
  const auto [lo, hi] = std::minmax_element(c1_values.begin(), c1_values.end());
  if (!(*lo > 0.0) || !std::isfinite(*hi)) return false;
  return *hi / *lo <= factor;
}

}  // namespace nsda
