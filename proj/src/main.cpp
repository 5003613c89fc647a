#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gyrokin/diagnostics.hpp"
#include "gyrokin/errors.hpp"
#include "gyrokin/run_config.hpp"
#include "gyrokin/solver.hpp"
#include "gyrokin/verify.hpp"

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw gyrokin::config_error("drift-check.eps: '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw gyrokin::config_error("drift-check.eps: list must not be empty");
  return out;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool corrupt_chi,
               const std::string& report_path) {
  gyrokin::VerifyOptions opt;
  opt.suite = suite;
  opt.seed = seed;
  opt.corrupt_chi = corrupt_chi;
  const auto reports = gyrokin::run_verification(opt);
  const auto j = gyrokin::verification_report(opt, reports);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw gyrokin::config_error("verify: cannot open " + report_path);
    out << j.dump(2) << "\n";
    for (const auto& rep : reports) {
      for (const auto& c : rep.checks) {
        std::printf("%-9s %-32s %s  measured=%.6g expected=%.6g tol=%.3g\n",
                    rep.suite.c_str(), c.name.c_str(), c.pass ? "PASS" : "FAIL", c.measured,
                    c.expected, c.tolerance);
      }
    }
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_simulate(const std::string& config_path) {
  const gyrokin::RunConfig cfg = gyrokin::load_run_config(config_path);
  gyrokin::DiagnosticsCsv csv(cfg.output_dir + "/diagnostics.csv");

  gyrokin::SolverCallbacks cb;
  cb.on_diagnostics = [&csv](const gyrokin::DiagnosticsRecord& rec) { csv.append(rec); };
  cb.on_snapshot = [&cfg](const gyrokin::ReducedDensity& g, int id, double time) {
    gyrokin::write_snapshot(g, cfg.output_dir, id, time);
  };

  const gyrokin::ScalarField initial = gyrokin::make_initial_field(cfg);
  const gyrokin::SolverState final_state = gyrokin::run(
      cfg.solver, initial, cfg.potential, cfg.params, cfg.grid, cfg.projection, cb);
  std::printf("simulate: finished t=%.6g, %zu diagnostics rows, output in %s\n",
              final_state.time, final_state.series.size(), cfg.output_dir.c_str());
  return 0;
}

int cmd_drift_check(const std::string& config_path, const std::string& eps_text) {
  const gyrokin::RunConfig cfg = gyrokin::load_run_config(config_path);
  const std::vector<double> eps = parse_eps_list(eps_text);

  // Deterministic off-axis start with nonzero gyroradius.
  gyrokin::PhasePoint start{{0.2, -0.1}, 0.0, {1.0, 0.3}, 0.2};
  const gyrokin::DriftCheckResult res =
      gyrokin::drift_check(start, cfg.potential, cfg.params, eps, cfg.solver.t_final);

  std::printf("%12s  %14s  %10s\n", "eps", "max_error", "ratio");
  for (std::size_t i = 0; i < res.eps.size(); ++i) {
    if (i == 0) {
      std::printf("%12.6g  %14.8e  %10s\n", res.eps[i], res.max_error[i], "-");
    } else {
      const double ratio = res.max_error[i - 1] / std::max(res.max_error[i], 1e-300);
      std::printf("%12.6g  %14.8e  %10.4f\n", res.eps[i], res.max_error[i], ratio);
    }
  }
  std::printf("observed order: %.4f\n", res.observed_order);

  std::ofstream csv(cfg.output_dir + "/drift_check.csv");
  if (csv) {
    csv << "eps,max_error\n";
    for (std::size_t i = 0; i < res.eps.size(); ++i) {
      csv << res.eps[i] << "," << res.max_error[i] << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gyroaveraged collision operators and the reduced transport model"};
  app.require_subcommand(1);

  std::string suite = "all";
  std::uint64_t seed = 0;
  bool corrupt_chi = false;
  std::string report_path;
  CLI::App* verify = app.add_subcommand("verify", "Run the identity verification suites");
  verify->add_option("--suite", suite,
                     "Suite: geometry, kernels, boltzmann, fp, landau, all");
  verify->add_option("--seed", seed, "Seed for the random point sets");
  verify->add_option("--report", report_path, "Write the JSON report to this file");
  verify->add_flag("--corrupt-chi", corrupt_chi)->group("");  // fault injection, hidden

  std::string sim_config;
  CLI::App* simulate = app.add_subcommand("simulate", "Advance the reduced model");
  simulate->add_option("--config", sim_config, "JSON run configuration")->required();

  std::string drift_config;
  std::string eps_text = "1e-1,5e-2,2.5e-2";
  CLI::App* drift = app.add_subcommand("drift-check", "Guiding-center drift verification");
  drift->add_option("--config", drift_config, "JSON run configuration")->required();
  drift->add_option("--eps", eps_text, "Comma-separated scale-separation values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(suite, seed, corrupt_chi, report_path);
    if (simulate->parsed()) return cmd_simulate(sim_config);
    if (drift->parsed()) return cmd_drift_check(drift_config, eps_text);
  } catch (const gyrokin::config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const gyrokin::step_error& e) {
    std::fprintf(stderr, "step error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
