#include <cmath>
#include <map>

#include "doctest.h"
#include "hardcore/exact_engine.hpp"
#include "hardcore/oracle.hpp"
#include "test_support.hpp"

using namespace hardcore;
using hardcore::testing::bc_of_index;
using hardcore::testing::random_rational_field;
using hardcore::testing::uniform_int;

namespace {
const auto kFree = BoundaryCondition::empty();
}

TEST_CASE("mask tables have Fibonacci size") {
  CHECK(mask_table(1)->masks.size() == 2);
  CHECK(mask_table(2)->masks.size() == 3);
  CHECK(mask_table(12)->masks.size() == 377);
  CHECK(mask_table(20)->masks.size() == 17711);
  CHECK(mask_table(20) == mask_table(20));
  for (auto m : mask_table(10)->masks) CHECK((m & (m >> 1)) == 0);
  CHECK_THROWS_AS(mask_table(25), CapacityError);
}

TEST_CASE("log_partition examples") {
  const auto b11 = LatticeBox::with_size(1, 1);
  CHECK(log_partition(b11, ActivityField(b11, 2.0), kFree).log_z == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const auto b22 = LatticeBox::with_size(2, 2);
  CHECK(log_partition(b22, ActivityField(b22, 1.0), kFree).log_z == doctest::Approx(std::log(7.0)).epsilon(1e-14));
  const auto l1 = box_lambda(1);
  CHECK(log_partition(l1, ActivityField(l1, 1.0), BoundaryCondition::even()).log_z ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(log_partition(l1, ActivityField(l1, 1.0), BoundaryCondition::odd()).log_z ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("a deleted site is forced empty") {
  // 3x1 column: deleting the middle site decouples the ends.
  const auto b = LatticeBox::with_size(1, 3);
  auto f = ActivityField(b, 1.0, std::vector<double>{2.0, 5.0, 3.0});
  f = replace_at(f, {0, 1}, 0.0);
  CHECK(log_partition(b, f, kFree).log_z == doctest::Approx(std::log(3.0 * 4.0)).epsilon(1e-14));
  CHECK(occupation_probability(b, f, kFree, {0, 1}) == 0.0);
}

TEST_CASE("occupation examples") {
  const auto b11 = LatticeBox::with_size(1, 1);
  CHECK(occupation_probability(b11, ActivityField(b11, 3.0), kFree, {0, 0}) == doctest::Approx(0.75).epsilon(1e-14));
  const auto b12 = LatticeBox::with_size(1, 2);
  const auto m = marginals(b12, ActivityField(b12, 1.0), kFree);
  CHECK(m.at({0, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(m.at({0, 1}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto l1 = box_lambda(1);
  const auto me = marginals(l1, ActivityField(l1, 1.0), BoundaryCondition::even());
  CHECK(me.at({0, 0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(me.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(me.at({1, 0}) == 0.0);
  CHECK(me.at({0, 1}) == 0.0);
  CHECK_THROWS_AS(occupation_probability(l1, ActivityField(l1, 1.0), kFree, {5, 5}),
                  std::invalid_argument);
}

TEST_CASE("input validation") {
  const auto b = LatticeBox::with_size(2, 25);
  CHECK_THROWS_AS(log_partition(b, ActivityField(b, 1.0), kFree), CapacityError);
  CHECK_THROWS_AS(log_partition(box_lambda(3), ActivityField(box_lambda(2), 1.0), kFree),
                  std::invalid_argument);
}

TEST_CASE("oracle equivalence on random small boxes") {
  CounterRng rng(2024);
  for (int k = 0; k < 400; ++k) {
    const int w = uniform_int(rng, 1, 4);
    const int h = uniform_int(rng, 1, 4);
    const auto box = LatticeBox::with_size(w, h, {uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)});
    const double scale = std::vector<double>{0.5, 1.0, 5.0}[k % 3];
    const auto f = random_rational_field(rng, box, scale);
    const auto bc = bc_of_index(k, rng, box);
    const double expected = oracle::oracle_log_partition(box, f, bc);
    const auto got = log_partition(box, f, bc);
    CHECK_FALSE(got.is_zero);
    CHECK(std::abs(got.log_z - expected) <= 1e-10);
    const auto m = marginals(box, f, bc);
    for (const auto& v : box.sites()) {
      CHECK(std::abs(m.at(v) - oracle::oracle_occupation(box, f, bc, v).to_double()) <= 1e-10);
    }
  }
}

TEST_CASE("frame sites deleted by the field are not occupied") {
  // Field region extends over the frame; a deleted even frame site frees its neighbour.
  const auto region = box_lambda(2);
  const auto box = box_lambda(1);
  // (1, 0) touches the even frame sites (2, 0) and (1, -1).
  const auto f = replace_at(replace_at(ActivityField(region, 1.0), {2, 0}, 0.0), {1, -1}, 0.0);
  const double expected = oracle::oracle_log_partition(box, f, BoundaryCondition::even());
  CHECK(log_partition(box, f, BoundaryCondition::even()).log_z == doctest::Approx(expected).epsilon(1e-13));
  CHECK(marginals(box, f, BoundaryCondition::even()).at({1, 0}) > 0.0);
}

TEST_CASE("local expectation") {
  const auto outer = box_lambda(2);
  const auto inner = box_lambda(1);
  CHECK(local_expectation(outer, inner, ActivityField(outer, 1.3), BoundaryCondition::even()) ==
        doctest::Approx(1.0).epsilon(1e-14));

  CounterRng rng(5);
  const auto f = random_rational_field(rng, outer, 1.0, 0.0);
  const Site v{0, 0};
  const LatticeBox single(0, 0, 0, 0);
  const double c = f.value(v);
  const double p_sw = occupation_probability(outer, switch_off_inside(f, single), kFree, v);
  CHECK(local_expectation(outer, single, f, kFree) == doctest::Approx(1 + (c - 1) * p_sw).epsilon(1e-12));

  const auto b33 = LatticeBox::with_size(3, 3);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_rational_field(rng, b33, 1.0);
    const LatticeBox sub(0, 0, 1, 1);
    const auto bc = bc_of_index(k, rng, b33);
    const auto num = oracle::oracle_partition(b33, g, bc);
    const auto den = oracle::oracle_partition(b33, switch_off_inside(g, sub), bc);
    const double ratio = static_cast<double>(num.extended / den.extended);
    CHECK(std::abs(local_expectation(b33, sub, g, bc) - ratio) <= 1e-10 * std::max(1.0, ratio));
  }
  CHECK_THROWS_AS(local_expectation(inner, outer, ActivityField(outer, 1.0), kFree), std::invalid_argument);
}

TEST_CASE("derivative identity: d log Z / d log x_v equals the marginal") {
  CounterRng rng(77);
  const double h = 1e-5;
  for (int k = 0; k < 40; ++k) {
    const auto box = LatticeBox::with_size(uniform_int(rng, 1, 6), uniform_int(rng, 1, 6));
    const auto f = random_rational_field(rng, box, k % 2 ? 1.0 : 4.0, 0.0);
    const auto bc = bc_of_index(k, rng, box);
    const auto m = marginals(box, f, bc);
    const Site v = box.site_at(rng() % box.size());
    const double x = f.value(v);
    const double up = log_partition(box, replace_at(f, v, x * std::exp(h)), bc).log_z;
    const double down = log_partition(box, replace_at(f, v, x * std::exp(-h)), bc).log_z;
    CHECK(std::abs((up - down) / (2 * h) - m.at(v)) <= 1e-6);
  }
}

TEST_CASE("marginal bounds") {
  CounterRng rng(31);
  for (int k = 0; k < 60; ++k) {
    const auto box = LatticeBox::with_size(uniform_int(rng, 1, 7), uniform_int(rng, 1, 7));
    const auto f = random_rational_field(rng, box, std::vector<double>{0.5, 2.0, 8.0}[k % 3]);
    const auto bc = bc_of_index(k, rng, box);
    const auto m = marginals(box, f, bc);
    for (const auto& v : box.sites()) {
      const double a = f.activity(v);
      CHECK(m.at(v) >= 0.0);
      CHECK(m.at(v) <= a / (1 + a) + 1e-12);
      for (const auto& u : neighbours(v)) {
        if (box.contains(u)) CHECK(m.at(v) + m.at(u) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("even boundary raises even occupation and lowers odd occupation") {
  CounterRng rng(13);
  for (int k = 0; k < 60; ++k) {
    const auto box = LatticeBox::with_size(uniform_int(rng, 1, 7), uniform_int(rng, 1, 7),
                                           {uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)});
    const auto f = random_rational_field(rng, box, k % 2 ? 1.0 : 5.0, 0.3);
    const auto me = marginals(box, f, BoundaryCondition::even());
    const auto mo = marginals(box, f, BoundaryCondition::odd());
    for (const auto& v : box.sites()) {
      const double gap = me.at(v) - mo.at(v);
      if (parity(v) == Parity::Even) {
        CHECK(gap >= -1e-12);
      } else {
        CHECK(gap <= 1e-12);
      }
    }
  }
}

TEST_CASE("reflection symmetry: log Z^e = log Z^o for symmetric boxes and fields") {
  CounterRng rng(17);
  for (int j = 1; j <= 5; ++j) {
    const auto box = box_lambda(j);
    auto f = random_rational_field(rng, box, 2.0, 0.2);
    // Symmetrise: copy the right half onto the left.
    std::vector<double> values = f.values();
    for (const auto& v : box.sites()) {
      if (v.x <= 0) values[box.index_of(v)] = f.value(reflect_theta(v));
    }
    const ActivityField sym(box, 2.0, values);
    CHECK(log_partition(box, sym, BoundaryCondition::even()).log_z ==
          doctest::Approx(log_partition(box, sym, BoundaryCondition::odd()).log_z).epsilon(1e-13));
  }
}

TEST_CASE("translation covariance") {
  CounterRng rng(19);
  for (int k = 0; k < 40; ++k) {
    const auto box = LatticeBox::with_size(uniform_int(rng, 1, 6), uniform_int(rng, 1, 6));
    const auto f = random_rational_field(rng, box, 1.5);
    const auto bc = bc_of_index(k, rng, box);
    const Site a{uniform_int(rng, -5, 5), uniform_int(rng, -5, 5)};
    const bool flip = parity(a) == Parity::Odd;
    const auto bc_t = bc.mapped([a](Site v) { return translate(v, a); }, flip);
    const double z = log_partition(box, f, bc).log_z;
    const double zt = log_partition(box.translated(a), f.translated(a), bc_t).log_z;
    CHECK(zt == doctest::Approx(z).epsilon(1e-14));
  }
}

TEST_CASE("large boxes stay finite under rescaling") {
  const auto box = LatticeBox::with_size(40, 16);
  const auto r = log_partition(box, ActivityField(box, 1000.0), BoundaryCondition::even());
  CHECK(std::isfinite(r.log_z));
  // At least the even-occupied configuration contributes.
  CHECK(r.log_z >= static_cast<double>(box.count(Parity::Even) - 16) * std::log(1000.0));
  const auto tiny = log_partition(box, ActivityField(box, 1e-300), kFree);
  CHECK(tiny.log_z >= 0.0);
}

TEST_CASE("sample_exact") {
  const auto b = LatticeBox::with_size(3, 3);
  for (std::uint64_t r = 0; r < 20; ++r) {
    CHECK(sample_exact(b, ActivityField(b, 0.0), kFree, {1, r}).empty());
  }

  const auto b11 = LatticeBox::with_size(1, 1);
  const ExactSampler s11(b11, ActivityField(b11, 1.0), kFree);
  const int n = 100000;
  int hits = 0;
  for (int r = 0; r < n; ++r) hits += s11.draw({3, static_cast<std::uint64_t>(r)}).empty() ? 0 : 1;
  CHECK(std::abs(hits / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));

  const auto b22 = LatticeBox::with_size(2, 2);
  const ExactSampler s22(b22, ActivityField(b22, 1.0), kFree);
  std::map<std::vector<Site>, int> counts;
  const int m = 70000;
  for (int r = 0; r < m; ++r) counts[s22.draw({4, static_cast<std::uint64_t>(r)})]++;
  CHECK(counts.size() == 7);
  const double p = 1.0 / 7.0;
  for (const auto& [set, c] : counts) {
    CHECK(is_independent(set));
    CHECK(std::abs(c / double(m) - p) <= 3 * std::sqrt(p * (1 - p) / m));
  }
}

TEST_CASE("samples respect frames and deletions") {
  CounterRng rng(23);
  const auto box = box_lambda(3);
  const auto f = random_rational_field(rng, box, 3.0, 0.3);
  const ExactSampler sampler(box, f, BoundaryCondition::even());
  const auto frame = BoundaryCondition::even().occupied_frame(box);
  for (std::uint64_t r = 0; r < 200; ++r) {
    auto s = sampler.draw({9, r});
    for (const auto& v : s) CHECK(f.value(v) > 0.0);
    s.insert(s.end(), frame.begin(), frame.end());
    CHECK(is_independent(s));
  }
}
