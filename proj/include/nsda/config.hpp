#pragma once

// Flat "key = value" run configuration with '#' comments. Unknown keys are
// rejected and cross-field constraints are checked as soon as the text is
// parsed. Keys and units are listed in README.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsda/filter.hpp"

namespace nsda {

class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& origin = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Sets or replaces a key (CLI overrides); re-validates and leaves the
  /// config unchanged on failure.
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  Grid grid() const;
  ForcingSpec forcing() const;
  SolverParams solver() const;
  InterpolantSpec interpolant(const Grid& grid) const;
  FilterSpec filter(const Grid& grid) const;
  InitialCondition initial_condition() const;
  TruthConfig truth() const;
  AssimilationConfig assimilation() const;

  /// "key = value" lines in key order; enough to re-run the experiment.
  std::vector<std::pair<std::string, std::string>> echo() const;

  /// Every key this format understands.
  static const std::vector<std::string>& known_keys();

 private:
  void validate() const;

  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace nsda
