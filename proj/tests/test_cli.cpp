// End-to-end checks of the command-line front end: exit codes, file outputs,
// byte-level reproducibility and cross-checks against the library. Invoked
// as: rissec_cli_tests <path-to-cli> <path-to-scenarios-dir>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "rissec/rissec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rissec;

namespace {

int checks = 0, failures = 0;

void expect(bool ok, const std::string& what) {
  ++checks;
  if (!ok) {
    ++failures;
    std::cout << "  FAILED: " << what << "\n";
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: rissec_cli_tests <cli> <scenarios-dir>\n";
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();
  const fs::path scenarios = fs::absolute(argv[2]);
  const fs::path work = fs::temp_directory_path() / "rissec_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path small = scenarios / "small.ini";

  {
    std::cout << "evaluate: record schema and per-user rows\n";
    const int rc = run(cli + " evaluate --config " + small.string() + " --out " +
                       (work / "eval").string());
    expect(rc == 0, "evaluate exits 0");
    const json rec = json::parse(slurp(work / "eval" / "evaluate.json"));
    expect(rec["kind"] == "evaluate", "record kind");
    expect(rec["users"].size() == 3, "one row per user");
    for (const auto& row : rec["users"]) {
      expect(row["secrecy_rate_bps_hz"].is_number(), "finite secrecy rate");
      expect(row["secrecy_rate_bps_hz"].get<double>() >= 0.0, "nonnegative secrecy rate");
    }
    expect(rec["config"].contains("build_id"), "build id echoed");
    expect(rec["config"]["dims.users"] == "3", "config echo carries dims");
    expect(rec["geometry"]["user_positions_m"].size() == 3, "positions recorded");
  }

  {
    std::cout << "evaluate: xi = 1 rows report zero secrecy rate\n";
    write(work / "xi1.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\nxi_mode = fixed\nxi = 1\n[mc]\ntrials = 10\n");
    const int rc = run(cli + " evaluate --config " + (work / "xi1.ini").string() +
                       " --out " + (work / "xi1").string());
    expect(rc == 0, "xi=1 evaluate exits 0");
    const json rec = json::parse(slurp(work / "xi1" / "evaluate.json"));
    for (const auto& row : rec["users"]) {
      expect(row["secrecy_rate_bps_hz"].get<double>() == 0.0, "xi=1 secrecy clamps to 0");
      expect(row["capacity_eve_bps_hz"] == "inf", "xi=1 Eve capacity unbounded");
    }
  }

  {
    std::cout << "evaluate: no-RIS scenario matches the reduced formula\n";
    write(work / "noris.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\nxi_mode = fixed\nxi = 0.4\n"
          "[pathloss]\nris_gain_scale = 0\n[mc]\ntrials = 10\n[run]\nseed = 7\n");
    const int rc = run(cli + " evaluate --config " + (work / "noris.ini").string() +
                       " --out " + (work / "noris").string());
    expect(rc == 0, "no-RIS evaluate exits 0");
    const json rec = json::parse(slurp(work / "noris" / "evaluate.json"));
    const Scenario cfg = parse_scenario_file((work / "noris.ini").string());
    const BuiltScenario built = build_scenario(cfg);
    for (int k = 0; k < 3; ++k) {
      const double reduced = no_ris_secrecy_rate(built.stats, 0.4, k);
      const double reported = rec["users"][k]["secrecy_rate_bps_hz"].get<double>();
      expect(std::abs(reported - reduced) <= 1e-10 * std::max(1.0, reduced),
             "row equals no-RIS reduction for user " + std::to_string(k));
    }
  }

  {
    std::cout << "evaluate: aggregate reporting option\n";
    write(work / "agg.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\n[mc]\ntrials = 10\n[run]\naggregate = min\n");
    const int rc = run(cli + " evaluate --config " + (work / "agg.ini").string() +
                       " --out " + (work / "agg").string());
    expect(rc == 0, "aggregate evaluate exits 0");
    const json rec = json::parse(slurp(work / "agg" / "evaluate.json"));
    expect(rec.contains("aggregate"), "aggregate block present");
    double min_rate = std::numeric_limits<double>::infinity();
    for (const auto& row : rec["users"])
      min_rate = std::min(min_rate, row["secrecy_rate_bps_hz"].get<double>());
    expect(rec["aggregate"]["secrecy_rate_bps_hz"].get<double>() == min_rate,
           "aggregate min matches the rows");
  }

  {
    std::cout << "optimize: monotone trace, converged\n";
    write(work / "opt.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\nxi_mode = optimize\n[phases]\nmode = optimize\n"
          "[mc]\ntrials = 10\n[run]\nseed = 7\n");
    const int rc = run(cli + " optimize --config " + (work / "opt.ini").string() +
                       " --out " + (work / "opt").string());
    expect(rc == 0, "optimize exits 0");
    const json rec = json::parse(slurp(work / "opt" / "optimize.json"));
    expect(rec["optimized"] == true, "optimizer ran");
    expect(rec["converged"] == true, "optimizer converged");
    expect(rec["outer_iterations"].get<int>() <= 15, "outer iterations within budget");

    std::ifstream trace(work / "opt" / "trace.csv");
    std::string line;
    std::getline(trace, line);
    expect(line == "outer,inner,xi,objective_bps_hz,grad_norm,step", "trace header");
    double prev = -1.0;
    int rows = 0;
    while (std::getline(trace, line)) {
      const auto c1 = line.find(',', line.find(',', 0) + 1);
      const auto c2 = line.find(',', c1 + 1);
      const auto c3 = line.find(',', c2 + 1);
      const double obj = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
      expect(obj >= prev - 1e-12, "trace objective non-decreasing");
      prev = obj;
      ++rows;
    }
    expect(rows >= 2, "trace has iterations");
  }

  {
    std::cout << "optimize: random-phase mode records a baseline without iterating\n";
    write(work / "optrand.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\n[phases]\nmode = random\n[mc]\ntrials = 10\n");
    const int rc = run(cli + " optimize --config " + (work / "optrand.ini").string() +
                       " --out " + (work / "optrand").string());
    expect(rc == 0, "baseline optimize exits 0");
    const json rec = json::parse(slurp(work / "optrand" / "optimize.json"));
    expect(rec["optimized"] == false, "no optimization in random mode");
  }

  {
    std::cout << "montecarlo: closed form vs MC, zero discards\n";
    const int rc = run(cli + " montecarlo --config " + small.string() + " --out " +
                       (work / "mc").string());
    expect(rc == 0, "montecarlo exits 0");
    const json rec = json::parse(slurp(work / "mc" / "montecarlo.json"));
    expect(rec["discard_rate"].get<double>() == 0.0, "no discarded trials");
    const double cf = rec["closed_form"]["rate_user_bps_hz"].get<double>();
    const double mc = rec["mc_user_rate"]["mean_bps_hz"].get<double>();
    const double hw = rec["mc_user_rate"]["half_width_95"].get<double>();
    // the closed form drops the hardening variance, so at this small M it
    // sits a little above the sampled rate; direction plus coarse tracking
    expect(mc <= cf + 2.0 * hw, "MC user rate under the statistical evaluation");
    expect(mc >= 0.75 * cf - 2.0 * hw, "MC user rate tracks the closed form");
    const double cfe = rec["closed_form"]["capacity_eve_bps_hz"].get<double>();
    const double mce = rec["mc_eve_capacity"]["mean_bps_hz"].get<double>();
    const double hwe = rec["mc_eve_capacity"]["half_width_95"].get<double>();
    expect(mce <= cfe + hwe, "MC Eve capacity under the upper bound");
  }

  {
    std::cout << "sweep: axis rows with config echo\n";
    write(work / "sweep.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\nxi_mode = optimize\n[mc]\ntrials = 10\n"
          "[sweep]\naxis = eve_antennas\nvalues = 2, 4\n");
    const int rc = run(cli + " sweep --config " + (work / "sweep.ini").string() +
                       " --out " + (work / "sweep").string());
    expect(rc == 0, "sweep exits 0");
    std::ifstream csv(work / "sweep" / "sweep.csv");
    std::string header, row1, row2, extra;
    std::getline(csv, header);
    std::getline(csv, row1);
    std::getline(csv, row2);
    const bool more = static_cast<bool>(std::getline(csv, extra));
    expect(!more || extra.empty(), "exactly one row per axis value");
    expect(header.find("cfg.dims.eve_antennas") != std::string::npos, "config echo columns");
    expect(row1.substr(0, 14) == "eve_antennas,2", "axis value in row");
    auto rate_of = [&](const std::string& row) {
      std::istringstream ss(row);
      std::string f;
      for (int i = 0; i < 5; ++i) std::getline(ss, f, ',');
      return std::stod(f);
    };
    expect(rate_of(row1) >= rate_of(row2), "secrecy rate non-increasing in Eve antennas");

    // parallel sweep computes the same numbers in the same order
    const int rc2 = run(cli + " sweep --config " + (work / "sweep.ini").string() +
                        " --threads 3 --out " + (work / "sweep3").string());
    expect(rc2 == 0, "threaded sweep exits 0");
    std::ifstream csv3(work / "sweep3" / "sweep.csv");
    std::string h3, r31, r32;
    std::getline(csv3, h3);
    std::getline(csv3, r31);
    std::getline(csv3, r32);
    expect(rate_of(r31) == rate_of(row1) && rate_of(r32) == rate_of(row2),
           "thread count does not change sweep results");
  }

  {
    std::cout << "sweep: power-fraction axis peaks at the closed-form optimum\n";
    write(work / "xisweep.ini",
          "[dims]\nbs_antennas = 16\nris_grid = 4x2\nusers = 3\neve_antennas = 2\n"
          "[power]\np_watts = 0.1\n[mc]\ntrials = 10\n[run]\nseed = 7\n"
          "[sweep]\naxis = xi\nvalues = 0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, "
          "0.85, 0.95\n");
    const int rc = run(cli + " sweep --config " + (work / "xisweep.ini").string() +
                       " --out " + (work / "xisweep").string());
    expect(rc == 0, "xi sweep exits 0");
    std::ifstream csv(work / "xisweep" / "sweep.csv");
    std::string line;
    std::getline(csv, line);  // header
    double best_rate = -1.0, best_xi = -1.0;
    while (std::getline(csv, line)) {
      std::istringstream ss(line);
      std::string f, xi_s, rate_s;
      std::getline(ss, f, ',');       // axis
      std::getline(ss, xi_s, ',');    // value
      std::getline(ss, f, ',');       // user
      std::getline(ss, f, ',');       // xi (resolved)
      std::getline(ss, rate_s, ',');  // secrecy rate
      const double rate = std::stod(rate_s);
      if (rate > best_rate) {
        best_rate = rate;
        best_xi = std::stod(xi_s);
      }
    }
    const Scenario cfg = parse_scenario_file((work / "xisweep.ini").string());
    const BuiltScenario built = build_scenario(cfg);
    const double xi_star =
        optimal_power_fraction(built.stats, resolve_phases(cfg), cfg.user_index).xi;
    expect(std::abs(best_xi - xi_star) <= 0.05 + 1e-12,
           "row-wise maximum sits at the closed-form optimum within grid resolution");
  }

  {
    std::cout << "exit codes: config errors are 2, numerical failures are 3\n";
    write(work / "bad.ini", "[dims]\nbs_antenas = 8\n");
    expect(run(cli + " evaluate --config " + (work / "bad.ini").string() + " --out " +
               (work / "bad").string()) == 2,
           "unknown key exits 2");
    expect(run(cli + " evaluate --config " + (work / "missing.ini").string() + " --out " +
               (work / "bad").string()) == 2,
           "missing config exits 2");
    fs::create_directories(work / "cwd");
    expect(run("cd " + (work / "cwd").string() + " && " + cli + " evaluate --config " +
               small.string()) == 0,
           "default out dir works");
    expect(fs::exists(work / "cwd" / "evaluate.json"), "record lands in the working dir");
    // planar placement at reference scale is legitimately rank deficient
    write(work / "planar.ini", "[geometry]\nlos_mode = planar\n[power]\np_watts = 0.1\n");
    expect(run(cli + " evaluate --config " + (work / "planar.ini").string() + " --out " +
               (work / "planar").string()) == 3,
           "rank-deficient geometry exits 3");
    expect(run(cli + " nosuchcommand --config x") == 2, "unknown subcommand exits 2");
  }

  {
    std::cout << "determinism: identical config and seed give byte-identical files\n";
    for (const char* sub : {"evaluate", "montecarlo"}) {
      const int rc1 = run(std::string(cli) + " " + sub + " --config " + small.string() +
                          " --out " + (work / (std::string(sub) + "_a")).string());
      const int rc2 = run(std::string(cli) + " " + sub + " --config " + small.string() +
                          " --out " + (work / (std::string(sub) + "_b")).string());
      expect(rc1 == 0 && rc2 == 0, std::string(sub) + " reruns exit 0");
      const std::string name = std::string(sub) + ".json";
      expect(slurp(work / (std::string(sub) + "_a") / name) ==
                 slurp(work / (std::string(sub) + "_b") / name),
             std::string(sub) + " output is byte-identical");
    }
    const int rc1 = run(cli + " sweep --config " + (work / "sweep.ini").string() +
                        " --out " + (work / "sweep_a").string());
    const int rc2 = run(cli + " sweep --config " + (work / "sweep.ini").string() +
                        " --out " + (work / "sweep_b").string());
    expect(rc1 == 0 && rc2 == 0, "sweep reruns exit 0");
    expect(slurp(work / "sweep_a" / "sweep.csv") == slurp(work / "sweep_b" / "sweep.csv"),
           "sweep output is byte-identical");
    // a different seed must change the Monte Carlo numbers
    const int rc3 = run(cli + " montecarlo --config " + small.string() + " --seed 123 --out " +
                        (work / "mc_seed").string());
    expect(rc3 == 0, "seed override accepted");
    expect(slurp(work / "mc_seed" / "montecarlo.json") !=
               slurp(work / "montecarlo_a" / "montecarlo.json"),
           "different seed changes the record");
  }

  std::cout << (failures == 0 ? "ALL CLI CHECKS PASSED" : "CLI CHECKS FAILED") << " ("
            << (checks - failures) << "/" << checks << ")\n";
  return failures == 0 ? 0 : 1;
}
