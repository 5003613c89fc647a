#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace gyrokin {

// One verification check: passes when |measured - expected| <= tolerance.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

struct VerifyOptions {
  std::string suite = "all";  // geometry | kernels | boltzmann | fp | landau | all
  std::uint64_t seed = 0;
  // Fault injection: evaluates the offset-kernel normalization with the
  // 1/pi^2 prefactor dropped, so the normalization check must fail and
  // report about 1/pi^2 of the expected value.  Exists to prove the harness
  // can fail.
  bool corrupt_chi = false;
};

// Runs the selected suites with a deterministic seed-derived point set.
std::vector<SuiteReport> run_verification(const VerifyOptions& opt);

nlohmann::json verification_report(const VerifyOptions& opt,
                                   const std::vector<SuiteReport>& reports);

}  // namespace gyrokin
