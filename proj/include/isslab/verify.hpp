#pragma once

#include <string>
#include <vector>

namespace isslab {

/// Outcome of one property check of the verification suite.
struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured quantities, formatted deterministically.
  std::string detail;
};

struct CheckSpec {
  int id;
  const char* name;
  /// Wall-clock budget the acceptance harness enforces, in seconds.
  double time_limit_s;
  CheckResult (*run)();
};

/// Property checks at the default resolution (n = 201, dt = 2.5e-4), in
/// order: kernels, inverse kernels, gains, open loop, state feedback,
/// observer, ISS sweeps, equivalence oracles, Lyapunov monitor.
const std::vector<CheckSpec>& verify_checks();

/// Runs one check; exceptions become a failed result carrying the message.
CheckResult run_check(const CheckSpec& spec);

/// "PASS  3 gain solver: ..." style line, newline-terminated.
std::string format_check(const CheckResult& result);

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed = false;
  /// Concatenated format_check lines.
  std::string text;
};

VerifyReport run_verify();

}  // namespace isslab
