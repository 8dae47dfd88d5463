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
//
// Batch front end: scenario configs in, JSON records and CSV sweeps out.
//   rissec evaluate   --config scenario.ini --out results/
//   rissec optimize   --config scenario.ini --out results/
//   rissec montecarlo --config scenario.ini --out results/
//   rissec sweep      --config scenario.ini --out results/
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "rissec/rissec.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace rissec;

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<long> trials;
};

Scenario load_scenario(const CliOverrides& cli) {
  Scenario s = parse_scenario_file(cli.config_path);
  if (cli.seed) s.seed = *cli.seed;
  if (cli.threads) s.threads = *cli.threads;
  if (cli.trials) s.trials = *cli.trials;
  s.validate();
  return s;
}

ordered_json echo_json(const Scenario& s) {
  ordered_json j;
  for (const auto& [k, v] : scenario_echo(s)) j[k] = v;
  return j;
}

ordered_json positions_json(const Geometry& g) {
  ordered_json j;
  ordered_json users = ordered_json::array();
  for (int k = 0; k < g.users(); ++k)
    users.push_back({g.user_positions(0, k), g.user_positions(1, k), g.user_positions(2, k)});
  j["user_positions_m"] = users;
  j["eve_position_m"] = {g.eve_position(0), g.eve_position(1), g.eve_position(2)};
  return j;
}

ordered_json eval_json(const SecrecyEval& ev) {
  ordered_json j;
  j["signal_user"] = ev.signal_user;
  j["interference_user"] = ev.interference_user;
  j["signal_eve"] = ev.signal_eve;
  j["interference_eve"] = ev.interference_eve;
  j["gamma_user"] = ev.gamma_user;
  j["gamma_eve"] = std::isinf(ev.gamma_eve) ? ordered_json("inf") : ordered_json(ev.gamma_eve);
  j["rate_user_bps_hz"] = ev.rate_user;
  j["capacity_eve_bps_hz"] =
      std::isinf(ev.capacity_eve) ? ordered_json("inf") : ordered_json(ev.capacity_eve);
  j["secrecy_rate_bps_hz"] = ev.secrecy_rate;
  return j;
}

ordered_json mc_json(const McEstimate& e) {
  ordered_json j;
  j["mean_bps_hz"] = std::isinf(e.mean) ? ordered_json("inf") : ordered_json(e.mean);
  j["half_width_95"] = e.half_width;
  j["trials"] = e.trials;
  j["discarded"] = e.discarded;
  j["signal_power"] = e.signal_power;
  j["interference"] = e.interference;
  j["an_leakage"] = e.an_leakage;
  j["variance_term"] = e.variance_term;
  j["noise"] = e.noise;
  return j;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path.string());
  out << contents;
}

/// Resolved operating point of one scenario: phases and power fraction for
/// the configured user, running the optimizer when the modes ask for it.
struct OperatingPoint {
  PhaseVector phases;
  double xi = 0.5;
  bool optimizer_ran = false;
  OptimizerResult opt;
};

OptimizerOptions optimizer_options(const Scenario& cfg, std::optional<double> fixed_xi) {
  OptimizerOptions o;
  o.epsilon = cfg.epsilon;
  o.max_outer = cfg.max_outer;
  o.max_inner = cfg.max_inner;
  if (fixed_xi) o.fixed_xi = *fixed_xi;
  return o;
}

double resolve_fixed_xi(const Scenario& cfg) {
  return cfg.xi_mode == XiMode::kEqual ? 0.5 : cfg.xi_value;
}

OperatingPoint resolve_operating_point(const BuiltScenario& built, int user_index) {
  const Scenario& cfg = built.config;
  OperatingPoint op;
  if (cfg.phase_mode == PhaseMode::kOptimize) {
    std::optional<double> fixed;
    if (cfg.xi_mode != XiMode::kOptimize) fixed = resolve_fixed_xi(cfg);
    const OptimizerOptions opts = optimizer_options(cfg, fixed);
    RngStream starts_rng = RngStream(cfg.seed).derive(0x6d737461);
    op.opt = (cfg.multi_start > 1)
                 ? multi_start_optimize(built.stats, user_index, opts, cfg.multi_start,
                                        starts_rng)
                 : alternating_optimize(built.stats, user_index, opts);
    if (op.opt.aborted) throw NumericalError("optimizer aborted: " + op.opt.message);
    op.phases = op.opt.phases;
    op.xi = op.opt.xi;
    op.optimizer_ran = true;
    return op;
  }
  op.phases = resolve_phases(cfg);
  if (cfg.xi_mode == XiMode::kOptimize)
    op.xi = optimal_power_fraction(built.stats, op.phases, user_index).xi;
  else
    op.xi = resolve_fixed_xi(cfg);
  return op;
}

int cmd_evaluate(const CliOverrides& cli) {
  const Scenario cfg = load_scenario(cli);
  const BuiltScenario built = build_scenario(cfg);

  ordered_json rec;
  rec["kind"] = "evaluate";
  rec["config"] = echo_json(cfg);
  rec["geometry"] = positions_json(built.geometry);

  ordered_json users = ordered_json::array();
  double min_rate = std::numeric_limits<double>::infinity(), sum_rate = 0.0;
  for (int k = 0; k < cfg.users; ++k) {
    const OperatingPoint op = resolve_operating_point(built, k);
    const SecrecyEval ev = secrecy_closed_form(built.stats, op.phases, op.xi, k);
    ordered_json row = eval_json(ev);
    row["user"] = k;
    row["xi"] = op.xi;
    users.push_back(row);
    min_rate = std::min(min_rate, ev.secrecy_rate);
    sum_rate += ev.secrecy_rate;
  }
  rec["users"] = users;
  if (cfg.aggregate != "none") {
    // Reporting convenience only; the per-user rows are the model output.
    rec["aggregate"] = {{"mode", cfg.aggregate},
                        {"secrecy_rate_bps_hz",
                         cfg.aggregate == "min" ? min_rate : sum_rate / cfg.users}};
  }

  fs::create_directories(cli.out_dir);
  write_file(fs::path(cli.out_dir) / "evaluate.json", rec.dump(2) + "\n");
  std::cout << "evaluate: " << cfg.users << " users written to "
            << (fs::path(cli.out_dir) / "evaluate.json").string() << "\n";
  return 0;
}

int cmd_optimize(const CliOverrides& cli) {
  const Scenario cfg = load_scenario(cli);
  const BuiltScenario built = build_scenario(cfg);
  const int k = cfg.user_index;

  ordered_json rec;
  rec["kind"] = "optimize";
  rec["config"] = echo_json(cfg);
  rec["geometry"] = positions_json(built.geometry);
  rec["user"] = k;

  CsvWriter trace_csv({"outer", "inner", "xi", "objective_bps_hz", "grad_norm", "step"});
  std::string trace_text = trace_csv.header() + "\n";

  if (cfg.phase_mode == PhaseMode::kOptimize) {
    const OperatingPoint op = resolve_operating_point(built, k);
    const SecrecyEval ev = secrecy_closed_form(built.stats, op.phases, op.xi, k);
    rec["optimized"] = true;
    rec["xi"] = op.xi;
    rec["result"] = eval_json(ev);
    rec["outer_iterations"] = op.opt.outer_iterations;
    rec["inner_iterations"] = op.opt.inner_iterations;
    rec["converged"] = op.opt.converged;
    rec["xi_fallback_used"] = op.opt.xi_fallback_used;
    rec["tangential_grad_norm"] = op.opt.tangential_grad_norm;
    for (const auto& t : op.opt.trace)
      trace_text += trace_csv.row({std::to_string(t.outer), std::to_string(t.inner),
                                   format_double(t.xi), format_double(t.objective),
                                   format_double(t.grad_norm), format_double(t.step)}) +
                    "\n";
  } else {
    // Baseline record: no phase optimization requested.
    const OperatingPoint op = resolve_operating_point(built, k);
    const SecrecyEval ev = secrecy_closed_form(built.stats, op.phases, op.xi, k);
    rec["optimized"] = false;
    rec["xi"] = op.xi;
    rec["result"] = eval_json(ev);
    trace_text += trace_csv.row({"0", "0", format_double(op.xi),
                                 format_double(ev.secrecy_rate), "0", "0"}) +
                  "\n";
  }

  fs::create_directories(cli.out_dir);
  write_file(fs::path(cli.out_dir) / "optimize.json", rec.dump(2) + "\n");
  write_file(fs::path(cli.out_dir) / "trace.csv", trace_text);
  std::cout << "optimize: record and trace written to " << cli.out_dir << "\n";
  return 0;
}

int cmd_montecarlo(const CliOverrides& cli) {
  const Scenario cfg = load_scenario(cli);
  const BuiltScenario built = build_scenario(cfg);
  const int k = cfg.user_index;
  const OperatingPoint op = resolve_operating_point(built, k);

  McOptions mo;
  mo.scheme = cfg.scheme;
  mo.per_realization_normalization = cfg.per_realization_normalization;
  mo.csi_error = cfg.tau;
  mo.eve_noise_w = cfg.worst_case_eve ? 0.0 : cfg.noise_eve_w;
  mo.condition_limit = cfg.condition_limit;
  mo.threads = cfg.threads;

  RngStream mc_rng = RngStream(cfg.seed).derive(0x6d63);
  const McSecrecy mc =
      empirical_secrecy_rate(built.stats, op.phases, op.xi, k, cfg.trials, mc_rng, mo);
  const SecrecyEval ev = secrecy_closed_form(built.stats, op.phases, op.xi, k);

  ordered_json rec;
  rec["kind"] = "montecarlo";
  rec["config"] = echo_json(cfg);
  rec["geometry"] = positions_json(built.geometry);
  rec["user"] = k;
  rec["xi"] = op.xi;
  rec["closed_form"] = eval_json(ev);
  rec["mc_user_rate"] = mc_json(mc.user_rate);
  rec["mc_eve_capacity"] = mc_json(mc.eve_capacity);
  rec["mc_secrecy"] = mc_json(mc.secrecy);
  rec["discard_rate"] =
      static_cast<double>(mc.eve_capacity.discarded) / static_cast<double>(cfg.trials);

  fs::create_directories(cli.out_dir);
  write_file(fs::path(cli.out_dir) / "montecarlo.json", rec.dump(2) + "\n");
  std::cout << "montecarlo: closed form secrecy " << format_double(ev.secrecy_rate)
            << " vs MC " << format_double(mc.secrecy.mean) << " (+/- "
            << format_double(mc.secrecy.half_width) << ") written to " << cli.out_dir << "\n";
  return 0;
}

struct SweepRow {
  std::string value;
  Scenario cfg;
  double xi = 0.0;
  SecrecyEval ev;
  int outer_iterations = 0;
  bool optimizer_ran = false;
};

int cmd_sweep(const CliOverrides& cli) {
  const Scenario base = load_scenario(cli);
  if (base.sweep_axis.empty() || base.sweep_values.empty())
    throw ConfigError("sweep: config must set sweep.axis and sweep.values");

  std::vector<SweepRow> rows(base.sweep_values.size());
  auto compute = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = base.sweep_values[i];
    row.cfg = apply_sweep_value(base, base.sweep_axis, base.sweep_values[i]);
    const BuiltScenario built = build_scenario(row.cfg);
    const OperatingPoint op = resolve_operating_point(built, row.cfg.user_index);
    row.xi = op.xi;
    row.ev = secrecy_closed_form(built.stats, op.phases, op.xi, row.cfg.user_index);
    row.optimizer_ran = op.optimizer_ran;
    if (op.optimizer_ran) row.outer_iterations = op.opt.outer_iterations;
  };

  const int threads = std::max(1, base.threads);
  if (threads == 1 || rows.size() <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) compute(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
          compute(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<std::string> columns = {"axis", "value", "user", "xi",
                                      "secrecy_rate_bps_hz", "rate_user_bps_hz",
                                      "capacity_eve_bps_hz", "gamma_user", "gamma_eve",
                                      "optimizer_outer_iterations"};
  const auto echo_keys = scenario_echo(base);
  for (const auto& [key, unused] : echo_keys) columns.push_back("cfg." + key);
  CsvWriter csv(columns);
  std::string text = csv.header() + "\n";
  for (const auto& row : rows) {
    std::vector<std::string> vals = {
        base.sweep_axis,
        row.value,
        std::to_string(row.cfg.user_index),
        format_double(row.xi),
        format_double(row.ev.secrecy_rate),
        format_double(row.ev.rate_user),
        std::isinf(row.ev.capacity_eve) ? "inf" : format_double(row.ev.capacity_eve),
        format_double(row.ev.gamma_user),
        std::isinf(row.ev.gamma_eve) ? "inf" : format_double(row.ev.gamma_eve),
        row.optimizer_ran ? std::to_string(row.outer_iterations) : ""};
    for (const auto& [key, val] : scenario_echo(row.cfg)) {
      (void)key;
      vals.push_back(val);
    }
    text += csv.row(vals) + "\n";
  }

  fs::create_directories(cli.out_dir);
  write_file(fs::path(cli.out_dir) / "sweep.csv", text);
  std::cout << "sweep: " << rows.size() << " points written to "
            << (fs::path(cli.out_dir) / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic secrecy rate toolkit for AN-aided RIS-assisted massive MIMO"};
  app.require_subcommand(1);

  CliOverrides cli;
  std::uint64_t seed_arg = 0;
  int threads_arg = 0;
  long trials_arg = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "scenario config file")->required();
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option("--seed", seed_arg, "override run.seed");
    sub->add_option("--threads", threads_arg, "override run.threads");
    sub->add_option("--trials", trials_arg, "override mc.trials");
  };
  auto apply_overrides = [&](CLI::App* sub) {
    if (sub->count("--seed")) cli.seed = seed_arg;
    if (sub->count("--threads")) cli.threads = threads_arg;
    if (sub->count("--trials")) cli.trials = trials_arg;
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "closed-form secrecy rates per user");
  CLI::App* optimize = app.add_subcommand("optimize", "alternating power/phase optimization");
  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "Monte Carlo validation of the closed form");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate across one swept parameter");
  for (CLI::App* sub : {evaluate, optimize, montecarlo, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : {evaluate, optimize, montecarlo, sweep})
      if (app.got_subcommand(sub)) apply_overrides(sub);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(cli);
    if (app.got_subcommand(optimize)) return cmd_optimize(cli);
    if (app.got_subcommand(montecarlo)) return cmd_montecarlo(cli);
    if (app.got_subcommand(sweep)) return cmd_sweep(cli);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
