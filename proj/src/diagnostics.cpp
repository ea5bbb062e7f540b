#include "nsda/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nsda/errors.hpp"

namespace nsda {

// --- series ---------------------------------------------------------------------

SeriesColumn parse_column(const std::string& name) {
  if (name == "err_L2") return SeriesColumn::ErrL2;
  if (name == "err_H1") return SeriesColumn::ErrH1;
  if (name == "err_H2") return SeriesColumn::ErrH2;
  if (name == "energy_truth") return SeriesColumn::EnergyTruth;
  if (name == "enstrophy_truth") return SeriesColumn::EnstrophyTruth;
  throw ConfigError("unknown series column '" + name + "'");
}

const char* column_name(SeriesColumn c) {
  switch (c) {
    case SeriesColumn::ErrL2: return "err_L2";
    case SeriesColumn::ErrH1: return "err_H1";
    case SeriesColumn::ErrH2: return "err_H2";
    case SeriesColumn::EnergyTruth: return "energy_truth";
    case SeriesColumn::EnstrophyTruth: return "enstrophy_truth";
  }
  return "?";
}

std::vector<double> ErrorSeries::times() const {
  std::vector<double> t;
  t.reserve(rows.size());
  for (const auto& r : rows) t.push_back(r.t);
  return t;
}

std::vector<double> ErrorSeries::column(SeriesColumn c) const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) {
    switch (c) {
      case SeriesColumn::ErrL2: v.push_back(r.err_L2); break;
      case SeriesColumn::ErrH1: v.push_back(r.err_H1); break;
      case SeriesColumn::ErrH2: v.push_back(r.err_H2); break;
      case SeriesColumn::EnergyTruth: v.push_back(r.energy_truth); break;
      case SeriesColumn::EnstrophyTruth: v.push_back(r.enstrophy_truth); break;
    }
  }
  return v;
}

bool poincare_chain_holds(const ErrorRow& row, double lambda1, double rel_tol) {
  const double a = row.err_H2;
  const double b = std::sqrt(lambda1) * row.err_H1;
  const double c = lambda1 * row.err_L2;
  return a >= b * (1.0 - rel_tol) && b >= c * (1.0 - rel_tol);
}

// --- rho ----------------------------------------------------------------------------

RhoBounds rho_bounds(double F, double nu, double lambda1, double delta) {
  if (F < 0.0 || !(nu > 0.0) || !(lambda1 > 0.0) || !(delta > 0.0)) {
    throw ConfigError("rho bounds need F >= 0 and positive nu, lambda1, delta");
  }
  RhoBounds r;
  r.rho_H = std::sqrt(2.0 * F) / (lambda1 * nu);
  r.rho_V = std::sqrt(2.0 * F / lambda1) / nu;
  r.integral_AU_bound = (1.0 / nu + 0.5 * delta * lambda1) * r.rho_V * r.rho_V;
  return r;
}

double max_window_integral(std::span<const double> t, std::span<const double> y, double delta) {
  if (t.size() != y.size()) throw ConfigError("time and value columns differ in length");
  if (t.size() < 2) return 0.0;
  // cumulative trapezoid
  std::vector<double> cum(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  double best = 0.0;
  std::size_t j = 0;
  const double tol = 1e-9 * std::max(1.0, delta);
  for (std::size_t i = 0; i < t.size(); ++i) {
    j = std::max(j, i);
    while (j + 1 < t.size() && t[j + 1] <= t[i] + delta + tol) ++j;
    if (t[j] + tol < t[i] + delta) break;  // window runs past the data
    best = std::max(best, cum[j] - cum[i]);
  }
  return best;
}

ContainmentReport check_containment(std::span<const TruthRow> rows, double F, double nu, double lambda1,
                                    double delta, double t_start) {
  ContainmentReport rep;
  rep.rho = rho_bounds(F, nu, lambda1, delta);
  std::vector<double> t, au2;
  for (const auto& r : rows) {
    if (r.t < t_start) continue;
    rep.max_L2 = std::max(rep.max_L2, r.norm_L2);
    rep.max_H1 = std::max(rep.max_H1, r.norm_H1);
    t.push_back(r.t);
    au2.push_back(r.norm_H2 * r.norm_H2);
  }
  rep.max_window_AU2 = max_window_integral(t, au2, delta);
  rep.passed = !t.empty() && rep.max_L2 <= rep.rho.rho_H && rep.max_H1 <= rep.rho.rho_V &&
               rep.max_window_AU2 <= rep.rho.integral_AU_bound;
  return rep;
}

// --- fitting -------------------------------------------------------------------------

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y, double t_start) {
  if (t.size() != y.size()) throw ConfigError("time and value columns differ in length");
  std::vector<double> xs, ys;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_start) continue;
    if (y[i] != 0.0) any_nonzero = true;
    xs.push_back(t[i]);
    ys.push_back(std::log(std::max(y[i], 1e-14)));
  }
  if (xs.size() < 10) {
    throw ConfigError("decay fit needs at least 10 rows past t_start, found " + std::to_string(xs.size()));
  }
  if (!any_nonzero) throw ConfigError("decay fit column is identically zero");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConfigError("decay fit needs distinct times");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }
  DecayFit fit;
  fit.alpha = -slope;
  fit.points = xs.size();
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

DecayFit fit_decay_rate(const ErrorSeries& series, SeriesColumn column, double t_start) {
  const auto t = series.times();
  const auto y = series.column(column);
  return fit_decay_rate(t, y, t_start);
}

// --- CSV ----------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series(const std::filesystem::path& path, const ErrorSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [k, v] : series.metadata) out << "# " << k << " = " << v << '\n';
  out << kSeriesHeader << '\n';
  for (const auto& r : series.rows) {
    out << format_double(r.t) << ',' << format_double(r.err_L2) << ',' << format_double(r.err_H1) << ','
        << format_double(r.err_H2) << ',' << format_double(r.energy_truth) << ','
        << format_double(r.enstrophy_truth) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ErrorSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  ErrorSeries series;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos && line.size() > 2) {
        series.metadata.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kSeriesHeader) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": unexpected header");
      header_seen = true;
      continue;
    }
    double v[6];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 6; ++c) {
      auto [next, ec] = std::from_chars(p, end, v[c]);
      const bool last = c == 5;
      if (ec != std::errc() || (last ? next != end : (next == end || *next != ','))) {
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
      }
      p = last ? next : next + 1;
    }
    series.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
  }
  if (!header_seen) throw FormatError(path.string() + ": missing header");
  return series;
}

void write_truth(const std::filesystem::path& path, std::span<const TruthRow> rows,
                 const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << '\n';
  out << kTruthHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.energy) << ',' << format_double(r.enstrophy) << ','
        << format_double(r.norm_L2) << ',' << format_double(r.norm_H1) << ',' << format_double(r.norm_H2)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_insertions(const std::filesystem::path& path, const ErrorSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "index,t,pre_L2,post_L2,pre_H1,post_H1,pre_H2,post_H2\n";
  for (const auto& r : series.insertions) {
    out << r.index << ',' << format_double(r.t) << ',' << format_double(r.pre_L2) << ','
        << format_double(r.post_L2) << ',' << format_double(r.pre_H1) << ',' << format_double(r.post_H1)
        << ',' << format_double(r.pre_H2) << ',' << format_double(r.post_H2) << '\n';
  }
}

// --- snapshots ---------------------------------------------------------------------

namespace {

constexpr std::size_t kSnapshotHeaderBytes = 4 + 4 + 4 + 8 + 8 + 4;

template <class T>
void put_le(std::vector<unsigned char>& buf, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

class Reader {
 public:
  Reader(std::vector<unsigned char> data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  template <class T>
  T get(const char* what) {
    if (offset_ + sizeof(T) > data_.size()) {
      throw FormatError(name_ + ": truncated snapshot at byte offset " + std::to_string(offset_) + " reading " +
                        what + " (file has " + std::to_string(data_.size()) + " bytes)");
    }
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, data_.data() + offset_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    offset_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }

  std::size_t offset() const { return offset_; }
  std::size_t size() const { return data_.size(); }

 private:
  std::vector<unsigned char> data_;
  std::string name_;
  std::size_t offset_ = 0;
};

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<unsigned char> header(const Grid& grid, double t, std::uint32_t tag) {
  std::vector<unsigned char> buf;
  buf.reserve(kSnapshotHeaderBytes);
  buf.insert(buf.end(), {'N', 'S', 'D', 'A'});
  put_le<std::uint32_t>(buf, kSnapshotVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.n()));
  put_le<double>(buf, grid.length());
  put_le<double>(buf, t);
  put_le<std::uint32_t>(buf, tag);
  return buf;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralScalar& field, double t) {
  auto buf = header(field.grid(), t, 1);
  for (const cplx& c : field.coeffs()) {
    put_le<double>(buf, c.real());
    put_le<double>(buf, c.imag());
  }
  write_bytes(path, buf);
}

void write_snapshot(const std::filesystem::path& path, const SpectralVelocity& field, double t) {
  auto buf = header(field.grid(), t, 2);
  auto a = field.u1();
  auto b = field.u2();
  for (std::size_t i = 0; i < a.size(); ++i) {
    put_le<double>(buf, a[i].real());
    put_le<double>(buf, a[i].imag());
    put_le<double>(buf, b[i].real());
    put_le<double>(buf, b[i].imag());
  }
  write_bytes(path, buf);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path.string());
  char magic[4];
  for (char& m : magic) m = static_cast<char>(r.get<unsigned char>("magic"));
  if (std::memcmp(magic, "NSDA", 4) != 0) throw FormatError(path.string() + ": bad magic at byte offset 0");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) {
    throw FormatError(path.string() + ": unsupported snapshot version " + std::to_string(version));
  }
  const auto n = r.get<std::uint32_t>("n");
  const auto L = r.get<double>("L");
  const auto t = r.get<double>("t");
  const auto tag = r.get<std::uint32_t>("payload tag");
  Grid grid = [&] {
    try {
      return Grid(static_cast<int>(n), L);
    } catch (const ConfigError& e) {
      throw FormatError(path.string() + ": invalid grid in header: " + e.what());
    }
  }();
  Snapshot snap{t, SpectralScalar(grid)};
  if (tag == 1) {
    SpectralScalar f(grid);
    for (auto& c : f.coeffs()) {
      const double re = r.get<double>("coefficient");
      const double im = r.get<double>("coefficient");
      c = cplx(re, im);
    }
    snap.field = std::move(f);
  } else if (tag == 2) {
    SpectralVelocity f(grid);
    auto a = f.u1();
    auto b = f.u2();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double ar = r.get<double>("coefficient");
      const double ai = r.get<double>("coefficient");
      const double br = r.get<double>("coefficient");
      const double bi = r.get<double>("coefficient");
      a[i] = cplx(ar, ai);
      b[i] = cplx(br, bi);
    }
    snap.field = std::move(f);
  } else {
    throw FormatError(path.string() + ": unknown payload tag " + std::to_string(tag) + " at byte offset 28");
  }
  if (r.offset() != r.size()) {
    throw FormatError(path.string() + ": trailing bytes after offset " + std::to_string(r.offset()));
  }
  return snap;
}

}  // namespace nsda
