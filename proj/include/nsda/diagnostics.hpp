#pragma once

// Error time series, exponential-rate fitting, absorbing-ball radii, and the
// CSV / binary snapshot file formats.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nsda/spectral.hpp"

namespace nsda {

struct ErrorRow {
  double t = 0.0;
  double err_L2 = 0.0;  ///< |v|
  double err_H1 = 0.0;  ///< ||v|| = |xi|
  double err_H2 = 0.0;  ///< |Av| = ||xi||
  double energy_truth = 0.0;
  double enstrophy_truth = 0.0;

  friend bool operator==(const ErrorRow&, const ErrorRow&) = default;
};

enum class SeriesColumn { ErrL2, ErrH1, ErrH2, EnergyTruth, EnstrophyTruth };

/// Accepts the CSV header names (err_L2, err_H1, ...).
SeriesColumn parse_column(const std::string& name);
const char* column_name(SeriesColumn c);

/// Errors just before and just after the insertion at t_n.
struct InsertionRecord {
  long index = 0;
  double t = 0.0;
  double pre_L2 = 0.0, post_L2 = 0.0;
  double pre_H1 = 0.0, post_H1 = 0.0;
  double pre_H2 = 0.0, post_H2 = 0.0;
};

struct ErrorSeries {
  std::vector<ErrorRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<InsertionRecord> insertions;

  std::vector<double> times() const;
  std::vector<double> column(SeriesColumn c) const;
};

/// err_H2 >= sqrt(lambda1) err_H1 >= lambda1 err_L2, up to `rel_tol` slack.
bool poincare_chain_holds(const ErrorRow& row, double lambda1, double rel_tol = 1e-12);

// --- absorbing balls ------------------------------------------------------------

struct RhoBounds {
  double rho_H = 0.0;
  double rho_V = 0.0;
  double integral_AU_bound = 0.0;  ///< bound on int_t^{t+delta} |AU|^2
};

/// rho_H = sqrt(2F)/(lambda1 nu), rho_V = sqrt(2F/lambda1)/nu,
/// bound = (1/nu + delta lambda1 / 2) rho_V^2.
RhoBounds rho_bounds(double F, double nu, double lambda1, double delta);

/// max over t of the trapezoidal integral of y over [t, t + delta], using
/// windows that start on a sample and span a whole number of samples.
double max_window_integral(std::span<const double> t, std::span<const double> y, double delta);

/// Norms of a truth trajectory at one instant.
struct TruthRow {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double norm_L2 = 0.0;  ///< |U|
  double norm_H1 = 0.0;  ///< ||U||
  double norm_H2 = 0.0;  ///< |AU|

  friend bool operator==(const TruthRow&, const TruthRow&) = default;
};

struct ContainmentReport {
  RhoBounds rho;
  double max_L2 = 0.0;
  double max_H1 = 0.0;
  double max_window_AU2 = 0.0;
  bool passed = false;
};

/// Checks |U| <= rho_H, ||U|| <= rho_V and the windowed |AU|^2 integral over
/// the rows with t >= t_start.
ContainmentReport check_containment(std::span<const TruthRow> rows, double F, double nu, double lambda1,
                                    double delta, double t_start);

// --- decay fitting --------------------------------------------------------------

struct DecayFit {
  double alpha = 0.0;      ///< -slope of log(y) against t
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log(max(y, 1e-14)) = c - alpha t over t >= t_start.
/// Needs at least 10 points and a column that is not identically zero.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y, double t_start);
DecayFit fit_decay_rate(const ErrorSeries& series, SeriesColumn column, double t_start);

// --- files ----------------------------------------------------------------------

inline constexpr const char* kSeriesHeader = "t,err_L2,err_H1,err_H2,energy_truth,enstrophy_truth";

/// Metadata as "# key = value" lines, then the header, then rows at %.17g.
void write_series(const std::filesystem::path& path, const ErrorSeries& series);
ErrorSeries read_series(const std::filesystem::path& path);
inline constexpr const char* kTruthHeader = "t,energy,enstrophy,norm_L2,norm_H1,norm_H2";
void write_truth(const std::filesystem::path& path, std::span<const TruthRow> rows,
                 const std::vector<std::pair<std::string, std::string>>& metadata);
void write_insertions(const std::filesystem::path& path, const ErrorSeries& series);

inline constexpr const char* kVersion = "0.1.0";

/// Formats a double with 17 significant digits.
std::string format_double(double v);

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  double t = 0.0;
  std::variant<SpectralScalar, SpectralVelocity> field;
};

/// "NSDA", u32 version, u32 n, f64 L, f64 t, u32 tag (1 scalar, 2 velocity),
/// then the coefficients in flat grid order as little-endian (re, im) f64
/// pairs; velocity modes store (u1, u2) consecutively.
void write_snapshot(const std::filesystem::path& path, const SpectralScalar& field, double t);
void write_snapshot(const std::filesystem::path& path, const SpectralVelocity& field, double t);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace nsda
