#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hardcore/exact_engine.hpp"
#include "hardcore/observables.hpp"
#include "hardcore/oracle.hpp"
#include "hardcore/stats.hpp"
#include "test_support.hpp"

using namespace hardcore;
using hardcore::testing::random_rational_field;
using hardcore::testing::uniform_int;

namespace {

// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("free_energy_G basics") {
  const auto box = box_lambda(3);
  const ActivityField ones(box, 2.0, 1.0);
  CHECK(free_energy_G(3, box_lambda(1), ones, BoundaryKind::Even).value == 0.0);
  CHECK_THROWS_AS(free_energy_G(3, box_lambda(1), ones.with_scale(0.0), BoundaryKind::Even),
                  std::invalid_argument);
  CHECK_THROWS_AS(free_energy_G(2, box_lambda(3), ones, BoundaryKind::Even), std::invalid_argument);

  // Single-site inner box: G = (1/lambda) log(1 + (x_v - 1) p_switched(v)).
  CounterRng rng(3);
  const auto f = random_rational_field(rng, box, 2.0, 0.0);
  const Site v{0, 1};
  const LatticeBox single(v.x, v.y, v.x, v.y);
  for (auto tau : {BoundaryKind::Even, BoundaryKind::Odd}) {
    const double p = occupation_probability(box, switch_off_inside(f, single),
                                            BoundaryCondition::of_kind(tau), v);
    CHECK(free_energy_G(3, single, f, tau).value ==
          doctest::Approx(std::log(1 + (f.value(v) - 1) * p) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("free_energy_G matches the oracle ratio") {
  CounterRng rng(8);
  const auto outer = box_lambda(2);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_rational_field(rng, outer, k % 2 ? 1.0 : 4.0);
    const LatticeBox inner = LatticeBox::with_size(2, 2, {uniform_int(rng, -1, 1), uniform_int(rng, -1, 1)});
    for (auto tau : {BoundaryKind::Even, BoundaryKind::Odd}) {
      const auto bc = BoundaryCondition::of_kind(tau);
      const double expected = (oracle::oracle_log_partition(outer, f, bc) -
                               oracle::oracle_log_partition(outer, switch_off_inside(f, inner), bc)) /
                              f.scale();
      CHECK(std::abs(free_energy_G(2, inner, f, tau).value - expected) <= 1e-10);
    }
  }
}

TEST_CASE("G via local expectation equals the two log Z formula") {
  CounterRng rng(9);
  for (int k = 0; k < 20; ++k) {
    const int L = uniform_int(rng, 2, 4);
    const auto f = random_rational_field(rng, box_lambda(L), 1.5, 0.2);
    const auto inner = box_lambda(uniform_int(rng, 1, L - 1));
    for (auto tau : {BoundaryKind::Even, BoundaryKind::Odd}) {
      const double via_expectation =
          std::log(local_expectation(box_lambda(L), inner, f, BoundaryCondition::of_kind(tau))) /
          f.scale();
      CHECK(std::abs(free_energy_G(L, inner, f, tau).value - via_expectation) <= 1e-12);
    }
  }
}

TEST_CASE("pathwise bound on |G^e - G^o|") {
  CounterRng rng(10);
  for (int k = 0; k < 100; ++k) {
    const int j = uniform_int(rng, 1, 2);
    const int L = uniform_int(rng, j + 1, 4);
    const double lambda = k % 2 ? 1.0 : 4.0;
    const auto spec = k % 3 ? DisorderSpec::bernoulli(0.6) : DisorderSpec::uniform(0, 2);
    const auto f = sample_field(spec, box_lambda(L), lambda, {77, static_cast<std::uint64_t>(k)});
    const auto s = free_energy_gap(L, j, f);
    CHECK(std::abs(s.f_hat) <= s.pathwise_bound + kInequalityTolerance);
  }
}

TEST_CASE("estimate_F") {
  // Constant disorder: reflection symmetry makes every replica vanish.
  const auto inside = ActivityField(box_lambda(2), 3.0, 1.7);
  const auto est = estimate_F(4, 2, 3.0, inside, DisorderSpec::constant(1.7), 5, 1);
  for (const auto& s : est.samples) CHECK(std::abs(s.f_hat) <= 1e-12);
  CHECK(std::abs(est.mean) <= 1e-12);

  // Full-disorder expectation is zero.
  const auto spec = DisorderSpec::bernoulli(0.5);
  const auto full = estimate_F_full(3, 1, 2.0, spec, 300, 21, 2);
  CHECK(std::abs(full.mean) <= 4.0 * full.std_error);
  CHECK(full.std_error > 0.0);

  // Conditional estimate stays inside the deterministic envelope.
  const auto fixed = sample_field(spec, box_lambda(1), 2.0, {5, 5});
  const auto cond = estimate_F(3, 1, 2.0, fixed, spec, 100, 22, 2);
  CHECK(std::abs(cond.mean) <= c_prime(2.0, spec) * annulus_size(1) + 4.0 * cond.std_error);
  for (const auto& s : cond.samples) CHECK(std::abs(s.f_hat) <= s.pathwise_bound + 1e-9);

  CHECK_THROWS_AS(estimate_F(2, 2, 1.0, inside, spec, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_F(3, 2, 1.0, inside, spec, 1, 1), std::invalid_argument);
}

TEST_CASE("estimates do not depend on the worker count") {
  const auto spec = DisorderSpec::uniform(0, 2);
  const auto a = estimate_F_full(3, 1, 4.0, spec, 40, 99, 1);
  const auto b = estimate_F_full(3, 1, 4.0, spec, 40, 99, 8);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("boundary influence") {
  const auto box = box_lambda(2);
  CHECK(boundary_influence(box, ActivityField(box, 1.0, 0.0), {0, 0}).gap == 0.0);

  // Pure field, lambda = 5: exact rational gap 38675/47041 at the origin.
  const auto pure = boundary_influence(box, ActivityField(box, 5.0, 1.0), {0, 0});
  CHECK(pure.gap > 0.0);
  CHECK(pure.gap == doctest::Approx(38675.0 / 47041.0).epsilon(1e-12));
  CHECK(pure.p_even == doctest::Approx(38880.0 / 47041.0).epsilon(1e-12));

  CounterRng rng(12);
  const auto f = random_rational_field(rng, box_lambda(3), 3.0, 0.2);
  const auto reflected = f.composed(reflect_theta);
  for (const auto& v : box_lambda(3).sites()) {
    const double g = boundary_influence(box_lambda(3), f, v).gap;
    const double gr = boundary_influence(box_lambda(3), reflected, reflect_theta(v)).gap;
    CHECK(gr == doctest::Approx(-g).epsilon(1e-12));
    if (parity(v) == Parity::Even) {
      CHECK(g >= -1e-12);
    } else {
      CHECK(g <= 1e-12);
    }
  }
}

TEST_CASE("annulus inequality") {
  // Constant field: the reflected comparison is an equality.
  const auto c = annulus_bound_check(3, 1, ActivityField(box_lambda(3), 2.0, 1.0));
  CHECK(std::abs(c.lhs_even_odd) <= 1e-12);
  CHECK(std::abs(c.lhs_odd_even) <= 1e-12);
  CHECK(c.rhs > 0.0);
  CHECK(c.holds());

  for (std::uint64_t r = 0; r < 30; ++r) {
    const auto f = sample_field(DisorderSpec::bernoulli(0.7), box_lambda(3), 2.0, {123, r});
    CHECK(annulus_bound_check(3, 1, f).holds());
  }

  // Deleting the annulus decouples inside and outside.
  auto f = sample_field(DisorderSpec::uniform(0, 2), box_lambda(4), 1.0, {4, 4});
  for (const auto& v : box_lambda(3).sites()) {
    if (!box_lambda(2).contains(v)) f = replace_at(f, v, 0.0);
  }
  const auto d = annulus_bound_check(4, 2, f);
  CHECK(d.rhs == 0.0);
  CHECK(d.lhs_even_odd <= 1e-9);
  CHECK(d.lhs_odd_even <= 1e-9);
  CHECK(std::abs(d.lhs_even_odd) <= 1e-10);

  CHECK_THROWS_AS(annulus_bound_check(2, 2, f), std::invalid_argument);
  const ActivityField asym(LatticeBox(-3, -3, 5, 4), 1.0, 1.0);
  CHECK_THROWS_AS(annulus_bound_check(3, 1, asym), std::invalid_argument);
}

TEST_CASE("c_prime closed forms") {
  CHECK(c_prime(1.0, DisorderSpec::bernoulli(1)) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-15));
  CHECK(c_prime(3.0, DisorderSpec::bernoulli(0.5)) == doctest::Approx(std::log(4.0) / 3).epsilon(1e-15));
  const double analytic = 2 * (2 * std::log(2.0) - 1);
  CHECK(c_prime(1.0, DisorderSpec::uniform(0, 1)) == doctest::Approx(analytic).epsilon(1e-14));
  // Independent quadrature.
  const double simpson_uniform = 2.0 * simpson([](double x) { return std::log1p(x); }, 0.0, 1.0);
  CHECK(simpson_uniform == doctest::Approx(analytic).epsilon(1e-10));
  CHECK(c_prime(2.5, DisorderSpec::uniform(0.5, 3)) ==
        doctest::Approx((2 / 2.5) * simpson([](double x) { return std::log1p(2.5 * x); }, 0.5, 3.0) / 2.5)
            .epsilon(1e-9));
  CHECK_THROWS_AS(c_prime(0.0, DisorderSpec::bernoulli(0.5)), std::invalid_argument);
}

TEST_CASE("c_prime quadrature families") {
  const double lambda = 2.0;
  {
    const double m = 0.3, s = 0.8;
    const double e = simpson(
        [&](double z) {
          return std::log1p(lambda * std::exp(m + s * z)) * std::exp(-z * z / 2) /
                 std::sqrt(2 * std::numbers::pi);
        },
        -14.0, 14.0);
    CHECK(c_prime(lambda, DisorderSpec::lognormal(m, s)) == doctest::Approx(2 / lambda * e).epsilon(1e-8));
  }
  {
    const double k = 2.0, t = 1.5;  // density x e^{-x/t} / t^2
    const double e = simpson(
        [&](double x) { return std::log1p(lambda * x) * x * std::exp(-x / t) / (t * t); }, 0.0, 120.0, 200000);
    CHECK(c_prime(lambda, DisorderSpec::gamma(k, t)) == doctest::Approx(2 / lambda * e).epsilon(1e-8));
  }
  {
    const double a = 3.0, xm = 0.5;
    // Substituting x = xm e^u.
    const double e = simpson(
        [&](double u) { return std::log1p(lambda * xm * std::exp(u)) * a * std::exp(-a * u); }, 0.0,
        40.0, 200000);
    CHECK(c_prime(lambda, DisorderSpec::pareto(a, xm)) == doctest::Approx(2 / lambda * e).epsilon(1e-8));
  }
}

TEST_CASE("fluctuation scaling") {
  const auto rows = fluctuation_scaling({1, 2}, [](int j) { return 2 * j; }, 2.0,
                                        DisorderSpec::constant(1.0), 30, 1);
  for (const auto& r : rows) CHECK(r.variance <= 1e-24);

  const auto b = fluctuation_scaling({1, 2}, [](int j) { return j + 2; }, 4.0,
                                     DisorderSpec::bernoulli(0.7), 60, 5, 2);
  REQUIRE(b.size() == 2);
  CHECK(b[0].area == 4);
  CHECK(b[1].area == 16);
  for (const auto& r : b) {
    CHECK(r.variance > 0.0);
    CHECK(r.ratio == doctest::Approx(r.variance / r.area));
    std::vector<double> flipped;
    for (double x : r.samples) flipped.push_back(-x);
    CHECK(stats::variance(flipped) == doctest::Approx(r.variance).epsilon(1e-14));
  }
  CHECK_THROWS_AS(fluctuation_scaling({1}, [](int j) { return 2 * j; }, 1.0, DisorderSpec::constant(1), 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fluctuation_scaling({2}, [](int j) { return j; }, 1.0, DisorderSpec::constant(1), 30, 1),
                  std::invalid_argument);
}

TEST_CASE("derivative identity diagnostic") {
  const auto b11 = LatticeBox::with_size(1, 1);
  const auto one = derivative_identity_check(b11, ActivityField(b11, 2.0, 1.5), BoundaryCondition::empty(),
                                             {0, 0}, 1e-4);
  CHECK(one.marginal == doctest::Approx(3.0 / 4.0).epsilon(1e-14));
  CHECK(one.diff <= 1e-8);

  CounterRng rng(14);
  const auto b33 = LatticeBox::with_size(3, 3);
  for (int k = 0; k < 30; ++k) {
    const auto f = random_rational_field(rng, b33, 2.0, 0.0);
    const auto r = derivative_identity_check(b33, f, hardcore::testing::bc_of_index(k, rng, b33),
                                             b33.site_at(rng() % 9), 1e-5);
    CHECK(r.diff <= 1e-6);
  }
  CHECK_THROWS_AS(derivative_identity_check(b11, ActivityField(b11, 2.0, 0.0), BoundaryCondition::empty(),
                                            {0, 0}, 1e-5),
                  std::invalid_argument);
  CHECK_THROWS_AS(derivative_identity_check(b11, ActivityField(b11, 2.0, 1.0), BoundaryCondition::empty(),
                                            {0, 0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("G^e - G^o increases in log x_v at even sites and decreases at odd sites") {
  CounterRng rng(15);
  for (int k = 0; k < 20; ++k) {
    const int L = uniform_int(rng, 2, 4);
    const auto f = random_rational_field(rng, box_lambda(L), k % 2 ? 1.0 : 5.0, 0.0);
    const auto inner = box_lambda(L - 1);
    const Site v = inner.site_at(rng() % inner.size());
    const double d = gap_log_derivative(L, inner, f, v, 1e-5);
    if (parity(v) == Parity::Even) {
      CHECK(d >= -1e-6);
    } else {
      CHECK(d <= 1e-6);
    }
    // The derivative is (1/lambda) times the boundary-influence gap.
    CHECK(d == doctest::Approx(boundary_influence(box_lambda(L), f, v).gap / f.scale()).epsilon(1e-5));
  }
}

TEST_CASE("pure gap persists while diluted gaps fall") {
  std::vector<double> pure;
  for (int side : {4, 8, 12}) {
    const auto box = box_lambda(side / 2);
    pure.push_back(boundary_influence(box, ActivityField(box, 5.0, 1.0), {0, 0}).gap);
  }
  CHECK(pure[1] <= pure[0]);
  CHECK(pure[2] <= pure[1]);
  CHECK(pure[2] >= 0.7 * pure[0]);

  std::vector<double> gaps;
  const auto box = box_lambda(6);
  for (std::uint64_t r = 0; r < 100; ++r) {
    gaps.push_back(boundary_influence(box, sample_field(DisorderSpec::bernoulli(0.7), box, 5.0, {2, r}), {0, 0}).gap);
  }
  CHECK(stats::quantile(gaps, 0.5) < pure[2]);
}
