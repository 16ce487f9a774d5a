#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vortlab/blowup.hpp"
#include "vortlab/flowmap.hpp"
#include "vortlab/ns_solver.hpp"

namespace vortlab {

// Flat "key = value" text. "[section]" lines prefix the following keys with "section.";
// '#' starts a comment. Keys must be unique.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma separated numbers.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  // Semicolon separated triples "x, y, z; x, y, z".
  std::vector<Vec3> get_points(const std::string& key, const std::vector<Vec3>& fallback) const;

  // Keys never read by any getter; a typo in a config shows up here.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

struct ExperimentConfig {
  SolverConfig solver;
  double amplitude = 1.0;
  std::string initial_field;  // optional VLF1 file replacing the Taylor-Green datum

  std::array<double, 4> cutoff_radii{0.95, 2.05, 2.1, 3.1};
  double cutoff_sharpness = 1.4;

  AdmissibilityThresholds thresholds;
  CylinderResolution resolution;
  double ladder_eps_max = 0.2;
  int ladder_levels = 4;

  PivotConfig pivot;
  double select_time = -1;  // < 0: final snapshot time
  std::vector<Vec3> probes{{0.3, 0.2, 0.1}};
  int random_probes = 0;    // extra probe points drawn from the seed
  int select_levels = 8;
  double select_ratio = 2.0;

  int degiorgi_kmax = 6;

  int lorentz_n = 1;
  double lorentz_q = 2.0;
  std::vector<double> cn_sweep{0.1, 1.0, 10.0};

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  void validate() const;
};

ExperimentConfig experiment_config(const ConfigFile& file);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace vortlab
