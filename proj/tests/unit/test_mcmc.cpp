#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "hardcore/exact_engine.hpp"
#include "hardcore/mcmc.hpp"
#include "hardcore/oracle.hpp"
#include "test_support.hpp"

using namespace hardcore;
using hardcore::testing::random_rational_field;

namespace {

using Counts = std::map<std::vector<Site>, int>;

std::vector<Site> sorted(std::vector<Site> s) {
  std::sort(s.begin(), s.end());
  return s;
}

// Pearson p-value of the observed configuration counts against the oracle law.
double chi_square_p(const Counts& counts, int n, const std::vector<oracle::WeightedSet>& law) {
  double stat = 0.0;
  int cells = 0;
  int seen = 0;
  for (const auto& w : law) {
    if (w.probability <= 0.0) continue;
    const auto it = counts.find(sorted(w.sites));
    const double obs = it == counts.end() ? 0.0 : it->second;
    seen += static_cast<int>(obs);
    const double e = n * w.probability;
    stat += (obs - e) * (obs - e) / e;
    ++cells;
  }
  if (seen != n) return 0.0;  // mass on an impossible configuration
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("zero activity and deleted sites stay empty") {
  const auto box = LatticeBox::with_size(4, 4);
  CounterRng rng(1);
  const HeatBathKernel zero(box, ActivityField(box, 0.0, 1.0), BoundaryCondition::empty());
  auto c = zero.top();
  zero.sweep(c, rng);
  CHECK(c == zero.empty());

  auto f = ActivityField(box, 3.0, 1.0);
  f = replace_at(f, {1, 1}, 0.0);
  f = replace_at(f, {2, 3}, 0.0);
  const HeatBathKernel k(box, f, BoundaryCondition::even());
  auto d = k.empty();
  for (int s = 0; s < 500; ++s) {
    k.sweep(d, rng);
    CHECK(!d.occupied({1, 1}));
    CHECK(!d.occupied({2, 3}));
    CHECK(k.admissible(d));
  }
  CHECK(k.admissible(k.top()));
  CHECK(k.admissible(k.bottom()));
  CHECK(sandwiched(k.bottom(), k.top()));
}

TEST_CASE("2x2 long run occupation frequency") {
  // Z = 1 + 4 + 2 = 7 at lambda = 1, each site occupied in 2 of the 7 weight units.
  const auto box = LatticeBox::with_size(2, 2);
  const HeatBathKernel k(box, ActivityField(box, 1.0, 1.0), BoundaryCondition::empty());
  CounterRng rng(2);
  auto c = k.empty();
  const int n = 200000;
  int hits = 0;
  for (int s = 0; s < n; ++s) {
    k.sweep(c, rng);
    hits += c.occupied({0, 0});
  }
  CHECK(std::abs(static_cast<double>(hits) / n - 2.0 / 7.0) <= 0.01);
}

TEST_CASE("coupled sweeps preserve the order") {
  CounterRng frng(3);
  const auto box = LatticeBox::with_size(5, 4, {-2, -1});
  const auto f = random_rational_field(frng, box, 4.0);
  for (const auto& bc : {BoundaryCondition::empty(), BoundaryCondition::even(), BoundaryCondition::odd()}) {
    const HeatBathKernel k(box, f, bc);
    MonotonePair p{k.bottom(), k.top()};
    CounterRng rng(4);
    for (int s = 0; s < 10000; ++s) {
      k.coupled_sweep(p, rng);
      REQUIRE(sandwiched(p.lower, p.upper));
    }
    // A middle chain driven by the same uniforms stays between them.
    MonotonePair q{k.bottom(), k.top()};
    auto mid = k.empty();
    CounterRng a(5), b(5);
    for (int s = 0; s < 200; ++s) {
      k.coupled_sweep(q, a);
      k.sweep(mid, b);
      // coupled_sweep draws one uniform per site, as sweep does.
      CHECK(sandwiched(q.lower, mid));
      CHECK(sandwiched(mid, q.upper));
    }
  }
}

TEST_CASE("free function sweeps agree with the kernel") {
  const auto box = LatticeBox::with_size(3, 3);
  const auto f = ActivityField(box, 2.0, 1.0);
  const HeatBathKernel k(box, f, BoundaryCondition::odd());
  CounterRng a(6), b(6);
  auto c = k.empty();
  k.sweep(c, a);
  CHECK(heat_bath_sweep(k.empty(), f, BoundaryCondition::odd(), b) == c);
  CounterRng x(7), y(7);
  MonotonePair p{k.bottom(), k.top()};
  const auto q = monotone_pair_sweep(p, f, BoundaryCondition::odd(), y);
  k.coupled_sweep(p, x);
  CHECK(q.lower == p.lower);
  CHECK(q.upper == p.upper);
}

TEST_CASE("coalescence at high activity") {
  const auto box = LatticeBox::with_size(4, 4);
  const HeatBathKernel k(box, ActivityField(box, 20.0, 1.0), BoundaryCondition::even());
  MonotonePair p{k.bottom(), k.top()};
  CounterRng rng(8);
  bool met = false;
  for (int s = 0; s < 100000 && !met; ++s) {
    k.coupled_sweep(p, rng);
    met = p.lower == p.upper;
  }
  CHECK(met);
}

TEST_CASE("CFTP basics") {
  const auto box = LatticeBox::with_size(3, 3);
  const auto r = cftp_sample(box, ActivityField(box, 0.0, 1.0), BoundaryCondition::even(), {1, 0});
  REQUIRE(r.sample);
  CHECK(r.epochs == 1);
  CHECK(r.sample->sites().empty());

  const auto again = cftp_sample(box, ActivityField(box, 2.0, 1.0), BoundaryCondition::empty(), {9, 3});
  const auto twice = cftp_sample(box, ActivityField(box, 2.0, 1.0), BoundaryCondition::empty(), {9, 3});
  REQUIRE(again.sample);
  CHECK(*again.sample == *twice.sample);

  CftpOptions tight;
  tight.max_sweeps = 1;
  const auto big = LatticeBox::with_size(8, 8);
  const auto none = cftp_sample(big, ActivityField(big, 50.0, 1.0), BoundaryCondition::even(), {1, 1}, tight);
  CHECK(!none.sample);
}

TEST_CASE("CFTP frequencies match exact marginals") {
  CounterRng frng(10);
  const auto box = LatticeBox::with_size(3, 3);
  const auto f = random_rational_field(frng, box, 2.0);
  const auto bc = BoundaryCondition::odd();
  const HeatBathKernel k(box, f, bc);
  const int n = 10000;
  std::vector<int> hits(box.size(), 0);
  for (int r = 0; r < n; ++r) {
    const auto s = cftp_sample(k, {11, static_cast<std::uint64_t>(r)});
    REQUIRE(s.sample);
    for (std::size_t i = 0; i < box.size(); ++i) hits[i] += s.sample->occupied_at(i);
  }
  const auto m = marginals(box, f, bc);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double p = m.p[i];
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(hits[i]) / n - p) <= 5 * se + 1e-12);
  }
}

TEST_CASE("even boundary at high activity favours even sites") {
  const auto box = LatticeBox::with_size(8, 8);
  const HeatBathKernel k(box, ActivityField(box, 10.0, 1.0), BoundaryCondition::even());
  int dominant = 0;
  const int n = 100;
  for (int r = 0; r < n; ++r) {
    const auto s = cftp_sample(k, {12, static_cast<std::uint64_t>(r)});
    REQUIRE(s.sample);
    dominant += s.sample->count(Parity::Even) > s.sample->count(Parity::Odd);
  }
  CHECK(dominant >= 95);
}

TEST_CASE("CFTP and exact sampling agree with the oracle law") {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const auto box = LatticeBox::with_size(w, h);
    const ActivityField f(box, 1.5, 1.0);
    const auto bc = BoundaryCondition::empty();
    const auto law = oracle::oracle_distribution(box, f, bc);
    const HeatBathKernel k(box, f, bc);
    const ExactSampler exact(box, f, bc);
    const int n = 20000;
    Counts from_cftp, from_exact;
    for (int r = 0; r < n; ++r) {
      const auto s = cftp_sample(k, {13, static_cast<std::uint64_t>(r)});
      REQUIRE(s.sample);
      ++from_cftp[sorted(s.sample->sites())];
      ++from_exact[sorted(exact.draw({14, static_cast<std::uint64_t>(r)}))];
    }
    CHECK(chi_square_p(from_cftp, n, law) >= 1e-3);
    CHECK(chi_square_p(from_exact, n, law) >= 1e-3);
  }
}

TEST_CASE("heat bath preserves the exact law") {
  // One sweep started from an exact sample is again an exact sample.
  CounterRng frng(15);
  const auto box = LatticeBox::with_size(3, 3);
  const auto f = random_rational_field(frng, box, 1.0);
  const auto bc = BoundaryCondition::even();
  const ExactSampler exact(box, f, bc);
  const HeatBathKernel k(box, f, bc);
  const auto law = oracle::oracle_distribution(box, f, bc);
  Counts counts;
  const int n = 20000;
  CounterRng rng(16);
  for (int r = 0; r < n; ++r) {
    Configuration c(box);
    for (const auto& v : exact.draw({17, static_cast<std::uint64_t>(r)})) c.set_at(box.index_of(v), true);
    k.sweep(c, rng);
    ++counts[sorted(c.sites())];
  }
  CHECK(chi_square_p(counts, n, law) >= 1e-3);
}
