#ifndef HARDCORE_VALIDATION_HPP
#define HARDCORE_VALIDATION_HPP

// The acceptance suite: oracle equivalence, exact identities, pathwise
// inequalities, disorder averages, MCMC agreement and determinism. Every check
// uses fixed seeds and pinned tolerances, so its report line is reproducible.

#include <functional>
#include <string>
#include <vector>

#include "hardcore/exact_engine.hpp"

namespace hardcore {

/// Engine under test for the oracle-equivalence check.
struct EngineHooks {
  std::function<LogPartitionResult(const LatticeBox&, const ActivityField&, const BoundaryCondition&)>
      log_partition;
  std::function<MarginalTable(const LatticeBox&, const ActivityField&, const BoundaryCondition&)> marginals;

  static EngineHooks production();
  /// Sentinel with an off-by-one bug: box and field are shifted one site along x
  /// before solving, so even and odd frames land on the wrong sublattice.
  static EngineHooks off_by_one();
};

struct ValidationOptions {
  unsigned workers = 1;
  EngineHooks engine = EngineHooks::production();
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // deterministic: no timings
};

inline constexpr int kCheckCount = 10;

/// Runs check `id` in 1..kCheckCount.
CheckResult run_check(int id, const ValidationOptions& opts);
std::vector<CheckResult> run_validation(const ValidationOptions& opts);

/// "PASS  1 oracle_equivalence  <detail>"
std::string format_check(const CheckResult& r);

}  // namespace hardcore

#endif  // HARDCORE_VALIDATION_HPP
