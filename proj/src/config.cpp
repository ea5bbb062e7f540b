#include "nsda/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nsda/errors.hpp"

namespace nsda {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys{
      "n", "L", "nu", "dt", "dealias", "forcing", "forcing_amplitude",
      "init_slope", "init_cutoff", "init_energy", "init_mode",
      "t0", "spinup", "horizon", "delta", "lambda",
      "interpolant", "obs_lambda", "obs_cells", "obs_nodes", "obs_nodes_file",
      "c1", "exact_start", "audit_ensemble", "c1_ensemble", "seed",
      "snapshot_interval", "sweep_delta", "fit_t_start",
  };
  return keys;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    if (cfg.values_.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
  const auto saved = values_;
  values_[key] = value;
  try {
    validate();
  } catch (...) {
    values_ = saved;
    throw;
  }
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  if (!parse_double(it->second, v)) throw ConfigError(origin_ + ": '" + key + "' is not a number: " + it->second);
  return v;
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(origin_ + ": '" + key + "' is not an integer: " + s);
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(origin_ + ": '" + key + "' is not an unsigned integer: " + s);
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError(origin_ + ": '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  auto it = values_.find(key);
  if (it == values_.end()) return out;
  for (const auto& item : split(it->second, ',')) {
    double v = 0.0;
    if (!parse_double(item, v)) throw ConfigError(origin_ + ": bad list entry '" + item + "' in '" + key + "'");
    out.push_back(v);
  }
  return out;
}

Grid RunConfig::grid() const {
  return Grid(static_cast<int>(get_long("n", 128)), get_double("L", 2.0 * std::numbers::pi));
}

ForcingSpec RunConfig::forcing() const {
  if (has("forcing")) {
    ForcingSpec f;
    for (const auto& entry : split(get_string("forcing", ""), ';')) {
      std::istringstream in(entry);
      std::vector<double> parts;
      std::string tok;
      while (in >> tok) {
        double v = 0.0;
        if (!parse_double(tok, v)) throw ConfigError(origin_ + ": bad forcing entry '" + entry + "'");
        parts.push_back(v);
      }
      if (parts.size() != 4 && parts.size() != 5) {
        throw ConfigError(origin_ + ": forcing entries are 'm1 m2 re im [omega]', got '" + entry + "'");
      }
      if (parts[0] != std::round(parts[0]) || parts[1] != std::round(parts[1])) {
        throw ConfigError(origin_ + ": forcing mode numbers must be integers");
      }
      f.add_pair(static_cast<int>(parts[0]), static_cast<int>(parts[1]), cplx(parts[2], parts[3]),
                 parts.size() == 5 ? parts[4] : 0.0);
    }
    return f;
  }
  if (has("forcing_amplitude")) return ForcingSpec::low_mode(get_double("forcing_amplitude", 0.0));
  return {};
}

SolverParams RunConfig::solver() const {
  const std::string rule = get_string("dealias", "two_thirds");
  Dealias d = Dealias::TwoThirds;
  if (rule == "none") d = Dealias::None;
  else if (rule != "two_thirds") throw ConfigError(origin_ + ": dealias must be two_thirds or none");
  SolverParams p{get_double("nu", 0.01), grid(), get_double("dt", 1e-3), d, forcing()};
  p.validate();
  return p;
}

InterpolantSpec RunConfig::interpolant(const Grid& g) const {
  const std::string kind = get_string("interpolant", "modal");
  InterpolantSpec spec;
  if (kind == "modal") {
    spec.kind = ModalProjection{get_double("obs_lambda", get_double("lambda", 16.0 * g.lambda1()))};
  } else if (kind == "volume") {
    spec.kind = VolumeElements{static_cast<int>(get_long("obs_cells", 16))};
  } else if (kind == "voronoi") {
    if (has("obs_nodes_file")) {
      spec.kind = NodalVoronoi{read_nodes_csv(get_string("obs_nodes_file", ""), g.length())};
    } else {
      spec.kind = NodalVoronoi{regular_lattice(g, static_cast<int>(get_long("obs_nodes", 16)))};
    }
  } else {
    throw ConfigError(origin_ + ": interpolant must be modal, volume or voronoi");
  }
  if (has("c1")) spec.c1 = get_double("c1", 0.0);
  return spec;
}

FilterSpec RunConfig::filter(const Grid& g) const {
  FilterSpec f{get_double("lambda", 16.0 * g.lambda1()), interpolant(g)};
  f.validate(g);
  return f;
}

AssimilationConfig RunConfig::assimilation() const {
  AssimilationConfig c{solver(), FilterSpec{}};
  c.filter = filter(c.solver.grid);
  c.delta = get_double("delta", 0.1);
  c.t0 = get_double("t0", 0.0);
  c.horizon = get_double("horizon", 10.0);
  c.spinup = get_double("spinup", 0.0);
  c.seed = get_u64("seed", 0);
  c.init = initial_condition();
  c.exact_start = get_bool("exact_start", false);
  c.audit_ensemble = static_cast<int>(get_long("audit_ensemble", 64));
  c.c1_ensemble = static_cast<int>(get_long("c1_ensemble", 64));
  c.validate();
  return c;
}

InitialCondition RunConfig::initial_condition() const {
  InitialCondition init;
  init.slope = get_double("init_slope", -1.0);
  init.cutoff = get_double("init_cutoff", 0.0);
  init.energy = get_double("init_energy", 0.5);
  if (has("init_mode")) {
    const auto m = get_list("init_mode");
    if (m.size() != 2 || m[0] != std::round(m[0]) || m[1] != std::round(m[1])) {
      throw ConfigError(origin_ + ": init_mode takes two integers 'm1, m2'");
    }
    init.mode = std::pair<int, int>{static_cast<int>(m[0]), static_cast<int>(m[1])};
  }
  return init;
}

TruthConfig RunConfig::truth() const {
  TruthConfig c{solver()};
  c.init = initial_condition();
  c.t0 = get_double("t0", 0.0);
  c.spinup = get_double("spinup", 0.0);
  c.horizon = get_double("horizon", 10.0);
  c.snapshot_interval = get_double("snapshot_interval", 0.0);
  c.seed = get_u64("seed", 0);
  c.validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  return {values_.begin(), values_.end()};
}

void RunConfig::validate() const {
  const Grid g = grid();  // n even >= 4, L > 0
  if (has("nu") && !(get_double("nu", 0.0) > 0.0)) throw ConfigError(origin_ + ": nu must be positive");
  if (has("dt") && !(get_double("dt", 0.0) > 0.0)) throw ConfigError(origin_ + ": dt must be positive");
  const double dt = get_double("dt", 1e-3);
  if (has("delta")) {
    const double delta = get_double("delta", 0.0);
    if (!(delta > 0.0)) throw ConfigError(origin_ + ": delta must be positive");
    if (step_count(0.0, delta, dt) < 1) throw ConfigError(origin_ + ": delta must span at least one step");
    if (has("horizon")) step_count(0.0, get_double("horizon", 0.0), delta);
  }
  if (has("spinup")) step_count(0.0, get_double("spinup", 0.0), dt);
  if (has("lambda")) {
    FilterSpec probe{get_double("lambda", 0.0), InterpolantSpec{ModalProjection{1.0}, std::nullopt}};
    probe.validate(g);
  }
  if (has("forcing") || has("forcing_amplitude")) forcing().validate(g);
  if (has("interpolant")) {
    const std::string kind = get_string("interpolant", "");
    if (kind != "modal" && kind != "volume" && kind != "voronoi") {
      throw ConfigError(origin_ + ": interpolant must be modal, volume or voronoi");
    }
  }
  if (has("obs_cells") && (get_long("obs_cells", 1) <= 0 || g.n() % get_long("obs_cells", 1) != 0)) {
    throw ConfigError(origin_ + ": obs_cells must divide n");
  }
  if (has("obs_nodes") && !has("obs_nodes_file") &&
      (get_long("obs_nodes", 1) <= 0 || g.n() % get_long("obs_nodes", 1) != 0)) {
    throw ConfigError(origin_ + ": obs_nodes must divide n");
  }
  if (has("seed")) get_u64("seed", 0);
  if (has("init_mode")) {
    const auto [a, b] = *initial_condition().mode;
    if (std::abs(a) >= g.n() / 2 || std::abs(b) >= g.n() / 2 || (a == 0 && b == 0)) {
      throw ConfigError(origin_ + ": init_mode must be a non-zero wavevector with |m| < n/2");
    }
  }
  if (has("snapshot_interval")) {
    const double si = get_double("snapshot_interval", 0.0);
    if (si < 0.0) throw ConfigError(origin_ + ": snapshot_interval must be non-negative");
    if (si > 0.0) step_count(0.0, si, dt);
  }
  if (has("exact_start")) get_bool("exact_start", false);
  get_list("sweep_delta");
}

}  // namespace nsda
