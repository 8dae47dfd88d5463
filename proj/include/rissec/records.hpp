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

#ifndef RISSEC_RECORDS_HPP
#define RISSEC_RECORDS_HPP

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rissec/analysis.hpp"
#include "rissec/montecarlo.hpp"
#include "rissec/optimize.hpp"
#include "rissec/scenario.hpp"

#ifndef RISSEC_BUILD_ID
#define RISSEC_BUILD_ID "unversioned"
#endif

namespace rissec {

inline const char* build_id() { return RISSEC_BUILD_ID; }

/// Shortest-round-trip decimal for a double; stable across runs so output
/// files are byte-reproducible.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

/// Flat, deterministically ordered echo of every resolved scenario field.
/// Every output row and record carries these, plus build id and seed.
inline std::vector<std::pair<std::string, std::string>> scenario_echo(const Scenario& s) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  auto add_d = [&](const std::string& k, double v) { add(k, format_double(v)); };
  add("dims.bs_antennas", std::to_string(s.bs_antennas));
  add("dims.ris_grid", std::to_string(s.grid.n_h) + "x" + std::to_string(s.grid.n_v));
  add("dims.users", std::to_string(s.users));
  add("dims.eve_antennas", std::to_string(s.eve_antennas));
  add_d("power.p_watts", s.resolved_power_w());
  add("power.snr_db", s.snr_db ? format_double(*s.snr_db) : "derived");
  add_d("power.noise_user_watts", s.noise_user_w);
  add_d("power.noise_eve_watts", s.noise_eve_w);
  add("power.xi_mode", s.xi_mode == XiMode::kFixed
                           ? "fixed"
                           : (s.xi_mode == XiMode::kEqual ? "equal" : "optimize"));
  add_d("power.xi", s.xi_value);
  add("phases.mode", s.phase_mode == PhaseMode::kFixed
                         ? "fixed"
                         : (s.phase_mode == PhaseMode::kRandom ? "random" : "optimize"));
  add_d("phases.theta", s.theta_fixed);
  add("phases.multi_start", std::to_string(s.multi_start));
  add_d("phases.epsilon", s.epsilon);
  add("phases.max_outer", std::to_string(s.max_outer));
  add("phases.max_inner", std::to_string(s.max_inner));
  add_d("geometry.wavelength_m", s.wavelength_m);
  add_d("geometry.bs_spacing_wl", s.bs_spacing_wl);
  add_d("geometry.ris_spacing_h_wl", s.ris_spacing_h_wl);
  add_d("geometry.ris_spacing_v_wl", s.ris_spacing_v_wl);
  add_d("geometry.bs_ris_distance_m", s.bs_ris_distance_m);
  add_d("geometry.ris_rotation_rad", s.ris_rotation_rad);
  add_d("geometry.user_center_from_bs_m", s.user_center_from_bs_m);
  add_d("geometry.user_center_from_ris_m", s.user_center_from_ris_m);
  add_d("geometry.disk_radius_m", s.disk_radius_m);
  add("geometry.los_mode", s.los_mode == LosMode::kScattered
                               ? "scattered"
                               : (s.los_mode == LosMode::kPlanar ? "planar" : "mixed"));
  add_d("geometry.scatter_excess_wl", s.scatter_excess_wl);
  add_d("pathloss.c0_db", s.c0_db);
  add_d("pathloss.d0_m", s.d0_m);
  add_d("pathloss.exponent_bs_ris", s.exponent_bs_ris);
  add_d("pathloss.exponent_ris_user", s.exponent_ris_user);
  add_d("pathloss.exponent_direct", s.exponent_direct);
  add_d("pathloss.ris_gain_scale", s.ris_gain_scale);
  add_d("correlation.bs_rho", s.bs_rho);
  add_d("csi.tau", s.tau);
  add("mc.trials", std::to_string(s.trials));
  add("mc.scheme", s.scheme == Precoding::kMrt ? "mrt" : "zf");
  add("mc.per_realization_normalization", s.per_realization_normalization ? "true" : "false");
  add("mc.worst_case_eve", s.worst_case_eve ? "true" : "false");
  add_d("mc.condition_limit", s.condition_limit);
  add("run.seed", std::to_string(s.seed));
  add("run.user_index", std::to_string(s.user_index));
  add("run.threads", std::to_string(s.threads));
  add("run.aggregate", s.aggregate);
  add("build_id", build_id());
  return kv;
}

/// Minimal CSV quoting: fields with commas, quotes or newlines get wrapped.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }

  std::string header() const { return join(columns_); }

  std::string row(const std::vector<std::string>& values) const {
    if (values.size() != columns_.size())
      throw ConfigError("csv: row width does not match header");
    return join(values);
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(v[i]);
    }
    return out;
  }

  std::vector<std::string> columns_;
};

}  // namespace rissec

#endif  // RISSEC_RECORDS_HPP
