// SPDX-License-Identifier: Apache-2.0
//
// rissec — secrecy-rate analysis and optimization for artificial-noise-aided,
// RIS-assisted multiuser massive MIMO downlinks under correlated Rayleigh fading.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISSEC_SCENARIO_HPP
#define RISSEC_SCENARIO_HPP

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rissec/analysis.hpp"
#include "rissec/channel.hpp"
#include "rissec/montecarlo.hpp"

namespace rissec {

enum class XiMode { kFixed, kEqual, kOptimize };
enum class PhaseMode { kFixed, kRandom, kOptimize };

/// BS-RIS LoS construction: seeded dense scatter (full rank at any size),
/// pure geometric placement (rejected when effectively low rank), or the
/// geometric path plus sub-wavelength scatter.
enum class LosMode { kScattered, kPlanar, kMixed };

/// One fully resolved run description. Defaults reproduce the reference
/// operating point: M=128, N=16x16, K=8, M_E=4, rho=0.4, lambda/4 spacing,
/// noise -60 dBm, SNR 5 dB. dB/dBm values are accepted only at this boundary;
/// everything downstream is linear watts.
struct Scenario {
  // [dims]
  int bs_antennas = 128;
  RisGrid grid{16, 16};
  int users = 8;
  int eve_antennas = 4;

  // [power] — exactly one of snr_db / power_watts may be configured.
  std::optional<double> snr_db;       // P = noise_user * 10^(snr/10)
  std::optional<double> power_watts;  // P directly
  double noise_user_w = dbm_to_watts(-60.0);
  double noise_eve_w = dbm_to_watts(-60.0);
  XiMode xi_mode = XiMode::kEqual;
  double xi_value = 0.5;  // used when xi_mode == kFixed

  // [phases]
  PhaseMode phase_mode = PhaseMode::kFixed;
  double theta_fixed = kPi / 2.0;  // radians, all elements
  int multi_start = 1;
  double epsilon = 1e-4;
  int max_outer = 50;
  int max_inner = 500;

  // [geometry]
  double wavelength_m = 0.1;
  double bs_spacing_wl = 0.5;
  double ris_spacing_h_wl = 0.25;
  double ris_spacing_v_wl = 0.25;
  double bs_ris_distance_m = 20.0;
  double ris_rotation_rad = 0.0;
  double user_center_from_bs_m = 60.0;
  double user_center_from_ris_m = 50.0;
  double disk_radius_m = 3.0;
  LosMode los_mode = LosMode::kScattered;
  double scatter_excess_wl = 0.15;  // mixed mode: scatter depth in wavelengths

  // [pathloss] — smaller exponent on the shorter, deterministic BS-RIS hop.
  double c0_db = -20.0;
  double d0_m = 1.0;
  double exponent_bs_ris = 2.0;
  double exponent_ris_user = 2.2;
  double exponent_direct = 3.0;
  double ris_gain_scale = 1.0;  // multiplies the RIS-side gains; 0 removes the RIS

  // [correlation]
  double bs_rho = 0.4;

  // [csi]
  double tau = 0.0;

  // [mc]
  long trials = 1000;
  Precoding scheme = Precoding::kMrt;
  bool per_realization_normalization = false;
  bool worst_case_eve = true;  // sigma_E^2 = 0 in the Eve noise correlation
  double condition_limit = 1e12;

  // [run]
  std::uint64_t seed = 1;
  int user_index = 0;
  int threads = 1;
  std::string aggregate = "none";  // none | min | mean (reporting only)

  // [sweep]
  std::string sweep_axis;
  std::vector<std::string> sweep_values;

  double resolved_power_w() const {
    if (power_watts) return *power_watts;
    return noise_user_w * db_to_linear(snr_db.value_or(5.0));
  }

  void validate() const {
    if (snr_db && power_watts)
      throw ConfigError("scenario: give either power.snr_db or power.p_watts, not both");
    if (xi_value < 0.0 || xi_value > 1.0) throw ConfigError("scenario: xi must be in [0, 1]");
    if (tau < 0.0 || tau > 1.0) throw ConfigError("scenario: csi.tau must be in [0, 1]");
    if (trials < 2) throw ConfigError("scenario: mc.trials must be >= 2");
    if (multi_start < 1) throw ConfigError("scenario: phases.multi_start must be >= 1");
    if (user_index < 0 || user_index >= users)
      throw ConfigError("scenario: run.user_index out of range");
    if (threads < 1) throw ConfigError("scenario: run.threads must be >= 1");
    if (aggregate != "none" && aggregate != "min" && aggregate != "mean")
      throw ConfigError("scenario: run.aggregate must be none, min or mean");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct ConfigValue {
  std::string raw;
  int line = 0;
};

/// Strict section/key-value reader. Unknown sections or keys, duplicates and
/// malformed lines are hard errors with the offending line number.
class ConfigReader {
 public:
  explicit ConfigReader(std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
      const std::string key = section + "." + trim(t.substr(0, eq));
      if (values_.count(key))
        throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                          "'");
      values_[key] = {trim(t.substr(eq + 1)), lineno};
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second.raw;
    values_.erase(it);
    return v;
  }

  void finish() const {
    if (values_.empty()) return;
    std::string msg = "config: unknown key(s):";
    for (const auto& [k, v] : values_)
      msg += " '" + k + "' (line " + std::to_string(v.line) + ")";
    throw ConfigError(msg);
  }

 private:
  std::map<std::string, ConfigValue> values_;
};

inline double parse_double(const std::string& key, const std::string& raw) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + raw);
  }
  if (pos != raw.size()) throw ConfigError("config: bad number for '" + key + "': " + raw);
  return v;
}

inline long parse_long(const std::string& key, const std::string& raw) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(raw, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + raw);
  }
  if (pos != raw.size()) throw ConfigError("config: bad integer for '" + key + "': " + raw);
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + raw);
}

inline RisGrid parse_grid(const std::string& key, const std::string& raw) {
  const auto x = raw.find('x');
  if (x == std::string::npos)
    throw ConfigError("config: '" + key + "' must look like 16x16, got: " + raw);
  RisGrid g;
  g.n_h = static_cast<int>(parse_long(key, trim(raw.substr(0, x))));
  g.n_v = static_cast<int>(parse_long(key, trim(raw.substr(x + 1))));
  if (g.n_h < 1 || g.n_v < 1) throw ConfigError("config: '" + key + "': grid must be positive");
  return g;
}

inline std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  detail::ConfigReader r(in);
  Scenario s;

  auto dbl = [&](const char* key, double& field) {
    if (auto v = r.take(key)) field = detail::parse_double(key, *v);
  };
  auto integer = [&](const char* key, int& field) {
    if (auto v = r.take(key)) field = static_cast<int>(detail::parse_long(key, *v));
  };
  auto boolean = [&](const char* key, bool& field) {
    if (auto v = r.take(key)) field = detail::parse_bool(key, *v);
  };

  integer("dims.bs_antennas", s.bs_antennas);
  if (auto v = r.take("dims.ris_grid")) s.grid = detail::parse_grid("dims.ris_grid", *v);
  integer("dims.users", s.users);
  integer("dims.eve_antennas", s.eve_antennas);

  if (auto v = r.take("power.snr_db")) s.snr_db = detail::parse_double("power.snr_db", *v);
  if (auto v = r.take("power.p_watts")) s.power_watts = detail::parse_double("power.p_watts", *v);
  if (auto v = r.take("power.noise_user_dbm"))
    s.noise_user_w = dbm_to_watts(detail::parse_double("power.noise_user_dbm", *v));
  if (auto v = r.take("power.noise_user_watts"))
    s.noise_user_w = detail::parse_double("power.noise_user_watts", *v);
  if (auto v = r.take("power.noise_eve_dbm"))
    s.noise_eve_w = dbm_to_watts(detail::parse_double("power.noise_eve_dbm", *v));
  if (auto v = r.take("power.xi_mode")) {
    if (*v == "fixed")
      s.xi_mode = XiMode::kFixed;
    else if (*v == "equal")
      s.xi_mode = XiMode::kEqual;
    else if (*v == "optimize")
      s.xi_mode = XiMode::kOptimize;
    else
      throw ConfigError("config: power.xi_mode must be fixed, equal or optimize");
  }
  dbl("power.xi", s.xi_value);

  if (auto v = r.take("phases.mode")) {
    if (*v == "fixed")
      s.phase_mode = PhaseMode::kFixed;
    else if (*v == "random")
      s.phase_mode = PhaseMode::kRandom;
    else if (*v == "optimize")
      s.phase_mode = PhaseMode::kOptimize;
    else
      throw ConfigError("config: phases.mode must be fixed, random or optimize");
  }
  dbl("phases.theta", s.theta_fixed);
  integer("phases.multi_start", s.multi_start);
  dbl("phases.epsilon", s.epsilon);
  integer("phases.max_outer", s.max_outer);
  integer("phases.max_inner", s.max_inner);

  dbl("geometry.wavelength_m", s.wavelength_m);
  dbl("geometry.bs_spacing_wl", s.bs_spacing_wl);
  dbl("geometry.ris_spacing_h_wl", s.ris_spacing_h_wl);
  dbl("geometry.ris_spacing_v_wl", s.ris_spacing_v_wl);
  dbl("geometry.bs_ris_distance_m", s.bs_ris_distance_m);
  dbl("geometry.ris_rotation_rad", s.ris_rotation_rad);
  dbl("geometry.user_center_from_bs_m", s.user_center_from_bs_m);
  dbl("geometry.user_center_from_ris_m", s.user_center_from_ris_m);
  dbl("geometry.disk_radius_m", s.disk_radius_m);
  if (auto v = r.take("geometry.los_mode")) {
    if (*v == "scattered")
      s.los_mode = LosMode::kScattered;
    else if (*v == "planar")
      s.los_mode = LosMode::kPlanar;
    else if (*v == "mixed")
      s.los_mode = LosMode::kMixed;
    else
      throw ConfigError("config: geometry.los_mode must be scattered, planar or mixed");
  }
  dbl("geometry.scatter_excess_wl", s.scatter_excess_wl);

  dbl("pathloss.c0_db", s.c0_db);
  dbl("pathloss.d0_m", s.d0_m);
  dbl("pathloss.exponent_bs_ris", s.exponent_bs_ris);
  dbl("pathloss.exponent_ris_user", s.exponent_ris_user);
  dbl("pathloss.exponent_direct", s.exponent_direct);
  dbl("pathloss.ris_gain_scale", s.ris_gain_scale);

  dbl("correlation.bs_rho", s.bs_rho);
  dbl("csi.tau", s.tau);

  if (auto v = r.take("mc.trials")) s.trials = detail::parse_long("mc.trials", *v);
  if (auto v = r.take("mc.scheme")) {
    if (*v == "mrt")
      s.scheme = Precoding::kMrt;
    else if (*v == "zf")
      s.scheme = Precoding::kZf;
    else
      throw ConfigError("config: mc.scheme must be mrt or zf");
  }
  boolean("mc.per_realization_normalization", s.per_realization_normalization);
  boolean("mc.worst_case_eve", s.worst_case_eve);
  dbl("mc.condition_limit", s.condition_limit);

  if (auto v = r.take("run.seed"))
    s.seed = static_cast<std::uint64_t>(detail::parse_long("run.seed", *v));
  integer("run.user_index", s.user_index);
  integer("run.threads", s.threads);
  if (auto v = r.take("run.aggregate")) s.aggregate = *v;

  if (auto v = r.take("sweep.axis")) s.sweep_axis = *v;
  if (auto v = r.take("sweep.values")) s.sweep_values = detail::split_list(*v);

  r.finish();
  s.validate();
  return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_scenario(in);
}

/// Supported sweep axes. Each value re-derives the scenario.
inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {
      "snr_db", "xi", "eve_antennas", "bs_antennas", "ris_grid",
      "ris_spacing_wl", "bs_rho", "tau"};
  return axes;
}

inline Scenario apply_sweep_value(const Scenario& base, const std::string& axis,
                                  const std::string& value) {
  Scenario s = base;
  if (axis == "snr_db") {
    s.snr_db = detail::parse_double(axis, value);
    s.power_watts.reset();
  } else if (axis == "xi") {
    s.xi_mode = XiMode::kFixed;
    s.xi_value = detail::parse_double(axis, value);
  } else if (axis == "eve_antennas") {
    s.eve_antennas = static_cast<int>(detail::parse_long(axis, value));
  } else if (axis == "bs_antennas") {
    s.bs_antennas = static_cast<int>(detail::parse_long(axis, value));
  } else if (axis == "ris_grid") {
    s.grid = detail::parse_grid(axis, value);
  } else if (axis == "ris_spacing_wl") {
    const double w = detail::parse_double(axis, value);
    s.ris_spacing_h_wl = w;
    s.ris_spacing_v_wl = w;
  } else if (axis == "bs_rho") {
    s.bs_rho = detail::parse_double(axis, value);
  } else if (axis == "tau") {
    s.tau = detail::parse_double(axis, value);
  } else {
    throw ConfigError("sweep: unknown axis '" + axis + "'");
  }
  s.validate();
  return s;
}

/// Everything a run needs: the immutable statistics plus the geometry that
/// produced them.
struct BuiltScenario {
  Scenario config;
  Geometry geometry;
  ChannelStats stats;
};

/// Assembles the statistical-CSI object: placement from the scenario seed,
/// path-law gains per link, exponential BS correlation, sinc RIS correlation
/// and the LoS matrix (seeded scattered mode by default).
inline BuiltScenario build_scenario(const Scenario& cfg) {
  cfg.validate();
  BuiltScenario b;
  b.config = cfg;
  RngStream root(cfg.seed);

  GeometryParams gp;
  gp.bs_antennas = cfg.bs_antennas;
  gp.grid = cfg.grid;
  gp.users = cfg.users;
  gp.wavelength = cfg.wavelength_m;
  gp.bs_spacing_wl = cfg.bs_spacing_wl;
  gp.ris_spacing_h_wl = cfg.ris_spacing_h_wl;
  gp.ris_spacing_v_wl = cfg.ris_spacing_v_wl;
  gp.bs_ris_distance = cfg.bs_ris_distance_m;
  gp.ris_rotation_rad = cfg.ris_rotation_rad;
  gp.user_center_from_bs = cfg.user_center_from_bs_m;
  gp.user_center_from_ris = cfg.user_center_from_ris_m;
  gp.disk_radius = cfg.disk_radius_m;
  b.geometry = make_geometry(gp, root.derive(0x67656f6d));

  ChannelStats& st = b.stats;
  st.dims.bs_antennas = cfg.bs_antennas;
  st.dims.ris_elements = cfg.grid.count();
  st.dims.users = cfg.users;
  st.dims.eve_antennas = cfg.eve_antennas;
  st.dims.total_power_w = cfg.resolved_power_w();
  st.dims.noise_user_w = RVec::Constant(cfg.users, cfg.noise_user_w);
  st.dims.noise_eve_w = cfg.noise_eve_w;

  const double c0 = db_to_linear(cfg.c0_db);
  const Eigen::Vector3d bs_center = Eigen::Vector3d::Zero();
  const Eigen::Vector3d ris_center = b.geometry.ris_positions.rowwise().mean();
  st.gains.bs_ris = path_loss(cfg.bs_ris_distance_m, cfg.exponent_bs_ris, c0, cfg.d0_m);
  st.gains.bs_user.resize(cfg.users);
  st.gains.ris_user.resize(cfg.users);
  if (cfg.ris_gain_scale < 0.0)
    throw ConfigError("scenario: pathloss.ris_gain_scale must be >= 0");
  for (int k = 0; k < cfg.users; ++k) {
    const Eigen::Vector3d pos = b.geometry.user_positions.col(k);
    st.gains.bs_user(k) =
        path_loss((pos - bs_center).norm(), cfg.exponent_direct, c0, cfg.d0_m);
    st.gains.ris_user(k) = cfg.ris_gain_scale * path_loss((pos - ris_center).norm(),
                                                          cfg.exponent_ris_user, c0, cfg.d0_m);
  }
  st.gains.bs_eve = path_loss((b.geometry.eve_position - bs_center).norm(),
                              cfg.exponent_direct, c0, cfg.d0_m);
  st.gains.ris_eve = cfg.ris_gain_scale *
                     path_loss((b.geometry.eve_position - ris_center).norm(),
                               cfg.exponent_ris_user, c0, cfg.d0_m);

  if (cfg.bs_rho < 0.0 || cfg.bs_rho >= 1.0)
    throw ConfigError("scenario: correlation.bs_rho must be in [0, 1)");
  const CMat bs_corr = exp_correlation(cfg.bs_antennas, cfg.bs_rho).cast<Complex>();
  const CMat ris_corr = ris_correlation(cfg.grid, cfg.ris_spacing_h_wl * cfg.wavelength_m,
                                        cfg.ris_spacing_v_wl * cfg.wavelength_m,
                                        cfg.wavelength_m)
                            .cast<Complex>();
  st.bs_corr_user.assign(cfg.users, bs_corr);
  st.ris_corr_user.assign(cfg.users, ris_corr);
  st.bs_corr_eve = bs_corr;
  st.ris_corr_eve = ris_corr;

  switch (cfg.los_mode) {
    case LosMode::kScattered:
      st.los = los_channel_scattered(cfg.bs_antennas, cfg.grid.count(), st.gains.bs_ris,
                                     cfg.bs_ris_distance_m, cfg.wavelength_m,
                                     root.derive(0x6c6f73));
      break;
    case LosMode::kPlanar:
      st.los = los_channel(b.geometry, st.gains.bs_ris);
      break;
    case LosMode::kMixed:
      st.los = los_channel_mixed(b.geometry, st.gains.bs_ris,
                                 cfg.scatter_excess_wl * cfg.wavelength_m,
                                 root.derive(0x6c6f73));
      break;
  }

  st.validate();
  st.prepare_sampling();
  return b;
}

/// Resolves the scenario's phase vector (fixed angle or seeded random). The
/// optimize mode is handled by the caller via alternating_optimize.
inline PhaseVector resolve_phases(const Scenario& cfg) {
  const int n = cfg.grid.count();
  if (cfg.phase_mode == PhaseMode::kRandom) {
    RngStream rng = RngStream(cfg.seed).derive(0x70686173);
    return PhaseVector::random(n, rng);
  }
  return PhaseVector::from_theta(RVec::Constant(n, cfg.theta_fixed));
}

}  // namespace rissec

#endif  // RISSEC_SCENARIO_HPP
