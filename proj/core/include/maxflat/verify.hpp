#ifndef MAXFLAT_VERIFY_HPP
#define MAXFLAT_VERIFY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace maxflat {

/// One named invariant check with its headline metrics.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::map<std::string, double> metrics;
};

struct VerifyOptions {
  int n = 3;
  std::string rep = "std";  // std | adjoint
  std::uint64_t seed = 1;
  int samples = 50;         // per-check sample budget
  double support_rel = 1e-9;
};

/// Run the full invariant suite of every module at a reduced sample budget.
/// Deterministic given (options, seed).
std::vector<CheckResult> run_verify_suite(const VerifyOptions& options);

}  // namespace maxflat

#endif
