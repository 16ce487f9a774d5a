#include "vortlab/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "vortlab/error.hpp"

namespace vortlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) fail(ErrorCode::Parse, "config key '" + key + "': not a number: '" + text + "'");
  return v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::stringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key)) fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": duplicate key " + key);
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const std::string* ConfigFile::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "inf") return std::numeric_limits<double>::infinity();
  return to_double(key, *v);
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  int out = 0;
  const char* end = v->data() + v->size();
  auto [p, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || p != end) fail(ErrorCode::Parse, "config key '" + key + "': not an integer: '" + *v + "'");
  return out;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1") return true;
  if (*v == "false" || *v == "0") return false;
  fail(ErrorCode::Parse, "config key '" + key + "': expected true or false");
}

std::vector<double> ConfigFile::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  if (v->empty()) return out;
  for (const auto& s : split(*v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::vector<Vec3> ConfigFile::get_points(const std::string& key, const std::vector<Vec3>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<Vec3> out;
  if (v->empty()) return out;
  for (const auto& triple : split(*v, ';')) {
    const auto parts = split(triple, ',');
    if (parts.size() != 3) fail(ErrorCode::Parse, "config key '" + key + "': points are x, y, z triples");
    out.push_back({to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])});
  }
  return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

void ExperimentConfig::validate() const {
  solver.validate();
  pivot.validate();
  if (!initial_field.empty() && !std::filesystem::exists(initial_field))
    fail(ErrorCode::Io, "initial field " + initial_field + " does not exist");
  if (!(cutoff_radii[0] < cutoff_radii[1] && cutoff_radii[1] <= cutoff_radii[2] && cutoff_radii[2] < cutoff_radii[3]))
    fail(ErrorCode::InvalidArgument, "localization radii must be increasing");
  if (2 * cutoff_radii[3] >= solver.grid.L) fail(ErrorCode::InvalidArgument, "cut-off support does not fit the box");
  if (!(ladder_eps_max > 0) || ladder_levels < 1) fail(ErrorCode::InvalidArgument, "maximal ladder is empty");
  if (select_levels < 1 || !(select_ratio > 1)) fail(ErrorCode::InvalidArgument, "selection ladder is invalid");
  if (random_probes < 0) fail(ErrorCode::InvalidArgument, "random_probes must be >= 0");
  if (degiorgi_kmax < 1) fail(ErrorCode::InvalidArgument, "degiorgi.kmax must be >= 1");
  if (lorentz_n < 0 || !(lorentz_q >= 1)) fail(ErrorCode::InvalidArgument, "lorentz n >= 0 and q >= 1");
  if (output_dir.empty()) fail(ErrorCode::InvalidArgument, "output directory is empty");
}

ExperimentConfig experiment_config(const ConfigFile& f) {
  ExperimentConfig c;
  c.solver.grid.n = f.get_int("solver.n", c.solver.grid.n);
  c.solver.grid.L = f.get_double("solver.length", c.solver.grid.L);
  const double half = -0.5 * c.solver.grid.L;
  c.solver.grid.origin = {half, half, half};
  c.solver.viscosity = f.get_double("solver.viscosity", c.solver.viscosity);
  c.solver.dt = f.get_double("solver.dt", c.solver.dt);
  c.solver.t_end = f.get_double("solver.t_end", c.solver.t_end);
  c.solver.snapshot_stride = f.get_int("solver.snapshot_stride", c.solver.snapshot_stride);
  c.solver.dealias = f.get_bool("solver.dealias", c.solver.dealias);
  c.amplitude = f.get_double("solver.amplitude", c.amplitude);
  c.initial_field = f.get_string("solver.initial_field", c.initial_field);

  const auto radii = f.get_list("localization.radii", {c.cutoff_radii.begin(), c.cutoff_radii.end()});
  if (radii.size() != 4) fail(ErrorCode::Parse, "localization.radii needs four values");
  for (int i = 0; i < 4; ++i) c.cutoff_radii[i] = radii[i];
  c.cutoff_sharpness = f.get_double("localization.sharpness", c.cutoff_sharpness);

  c.thresholds.eta0 = f.get_double("maximal.eta0", c.thresholds.eta0);
  c.thresholds.eta1 = f.get_double("maximal.eta1", c.thresholds.eta1);
  c.thresholds.eta2 = f.get_double("maximal.eta2", c.thresholds.eta2);
  c.thresholds.eta3 = f.get_double("maximal.eta3", c.thresholds.eta3);
  c.ladder_eps_max = f.get_double("maximal.eps_max", c.ladder_eps_max);
  c.ladder_levels = f.get_int("maximal.levels", c.ladder_levels);
  c.resolution.n_s = f.get_int("maximal.n_s", c.resolution.n_s);
  c.resolution.n_r = f.get_int("maximal.n_r", c.resolution.n_r);
  c.resolution.n_mu = f.get_int("maximal.n_mu", c.resolution.n_mu);
  c.resolution.n_phi = f.get_int("maximal.n_phi", c.resolution.n_phi);
  c.resolution.trajectory_steps = f.get_int("maximal.trajectory_steps", c.resolution.trajectory_steps);

  c.pivot.p = f.get_double("pivot.p", c.pivot.p);
  c.pivot.nu = f.get_double("pivot.nu", c.pivot.nu);
  c.pivot.delta = f.get_double("pivot.delta", c.pivot.delta);
  c.pivot.eta = f.get_double("pivot.eta", c.pivot.eta);

  c.select_time = f.get_double("select.time", c.select_time);
  c.probes = f.get_points("select.probes", c.probes);
  c.random_probes = f.get_int("select.random_probes", c.random_probes);
  c.select_levels = f.get_int("select.levels", c.select_levels);
  c.select_ratio = f.get_double("select.ratio", c.select_ratio);

  c.degiorgi_kmax = f.get_int("degiorgi.kmax", c.degiorgi_kmax);

  c.lorentz_n = f.get_int("lorentz.n", c.lorentz_n);
  c.lorentz_q = f.get_double("lorentz.q", c.lorentz_q);
  c.cn_sweep = f.get_list("lorentz.cn_sweep", c.cn_sweep);

  c.output_dir = f.get_string("output.dir", c.output_dir);
  c.seed = static_cast<std::uint64_t>(f.get_int("seed", static_cast<int>(c.seed)));

  const auto unused = f.unused_keys();
  if (!unused.empty()) fail(ErrorCode::Parse, "unknown config key " + unused.front());
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig c = experiment_config(ConfigFile::load(path));
  if (!c.initial_field.empty() && std::filesystem::path(c.initial_field).is_relative())
    c.initial_field = (std::filesystem::path(path).parent_path() / c.initial_field).string();
  return c;
}

}  // namespace vortlab
