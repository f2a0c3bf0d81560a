#include "doctest.h"
#include "hardcore/validation.hpp"

using namespace hardcore;

TEST_CASE("oracle equivalence passes for the production engine") {
  const auto r = run_check(1, ValidationOptions{});
  CHECK(r.passed);
  CHECK(r.name == "oracle_equivalence");
}

TEST_CASE("sentinel: an off-by-one engine fails oracle equivalence") {
  ValidationOptions opts;
  opts.engine = EngineHooks::off_by_one();
  const auto r = run_check(1, opts);
  CHECK_FALSE(r.passed);
  CHECK(format_check(r).rfind("FAIL  1 oracle_equivalence", 0) == 0);
}

TEST_CASE("reports are identical across runs and worker counts") {
  ValidationOptions one;
  ValidationOptions many;
  many.workers = 8;
  for (int id : {3, 9}) {
    const auto a = format_check(run_check(id, one));
    CHECK(a == format_check(run_check(id, one)));
    CHECK(a == format_check(run_check(id, many)));
  }
}

TEST_CASE("check ids") {
  CHECK_THROWS_AS(run_check(0, ValidationOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(run_check(kCheckCount + 1, ValidationOptions{}), std::invalid_argument);
  CheckResult r{4, "annulus_inequality", true, "x=1"};
  CHECK(format_check(r) == "PASS  4 annulus_inequality   x=1");
}
