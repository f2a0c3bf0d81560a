#include "hardcore/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "hardcore/experiments.hpp"
#include "hardcore/mcmc.hpp"
#include "hardcore/observables.hpp"
#include "hardcore/oracle.hpp"
#include "hardcore/parallel.hpp"
#include "hardcore/stats.hpp"

namespace hardcore {

namespace {

// Pinned tolerances and sizes.
constexpr double kOracleTol = 1e-10;
constexpr int kOracleInstances = 500;
constexpr double kDerivativeTol = 1e-6;
constexpr double kDerivativeStep = 1e-5;
constexpr int kDerivativeInstances = 200;
constexpr double kSignTol = 1e-12;
constexpr int kSignSeeds = 50;
constexpr double kAnnulusTol = 1e-9;
constexpr std::size_t kAnnulusReplicasPerCell = 32;  // 16 cells -> 512 instances
constexpr double kStdErrors = 4.0;
constexpr std::size_t kStepOneReplicas = 400;
constexpr std::size_t kFluctuationReplicas = 300;
constexpr double kFluctuationBand = 2.0;
constexpr double kFluctuationFloor = 1e-4;
constexpr double kPersistence = 0.05;
constexpr std::size_t kContrastReplicas = 200;
constexpr int kChiDraws = 10000;
constexpr double kChiLevel = 1e-3;
constexpr int kCoupledSweeps = 10000;

int draw_int(CounterRng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

ActivityField rational_field(CounterRng& rng, const LatticeBox& box, double scale, double p_zero) {
  std::vector<double> values;
  for (std::size_t i = 0; i < box.size(); ++i) {
    values.push_back(rng.uniform() < p_zero ? 0.0 : draw_int(rng, 1, 16) / 8.0);
  }
  return {box, scale, std::move(values)};
}

BoundaryCondition random_bc(CounterRng& rng, const LatticeBox& box, int k) {
  switch (k % 4) {
    case 0: return BoundaryCondition::empty();
    case 1: return BoundaryCondition::even();
    case 2: return BoundaryCondition::odd();
    default: break;
  }
  std::set<Site> chosen;
  for (const auto& v : external_boundary(box)) {
    if (rng.uniform() < 0.5) continue;
    bool clash = false;
    for (const auto& u : neighbours(v)) clash = clash || chosen.count(u) > 0;
    if (!clash) chosen.insert(v);
  }
  return BoundaryCondition::custom(std::move(chosen));
}

struct Instance {
  LatticeBox box;
  ActivityField field;
  BoundaryCondition bc;
};

std::vector<Instance> random_instances(std::uint64_t seed, int count, int max_side, double p_zero) {
  static constexpr double kLambdas[] = {0.5, 1.0, 5.0};
  CounterRng rng(seed);
  std::vector<Instance> out;
  for (int k = 0; k < count; ++k) {
    const auto box = LatticeBox::with_size(draw_int(rng, 1, max_side), draw_int(rng, 1, max_side),
                                           {draw_int(rng, -3, 3), draw_int(rng, -3, 3)});
    const double lambda = kLambdas[k % 3];
    auto field = rational_field(rng, box, lambda, p_zero);
    auto bc = random_bc(rng, box, k / 3);
    out.push_back({box, std::move(field), std::move(bc)});
  }
  return out;
}

double max_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}

CheckResult oracle_equivalence(const ValidationOptions& o) {
  const auto instances = random_instances(0x6f7261636c65, kOracleInstances, 4, 0.1);
  std::vector<double> logz_err(instances.size()), marg_err(instances.size());
  parallel_for(instances.size(), o.workers, [&](std::size_t i) {
    const auto& [box, f, bc] = instances[i];
    // An engine that throws on a valid instance counts as a mismatch.
    logz_err[i] = marg_err[i] = INFINITY;
    try {
      const auto z = o.engine.log_partition(box, f, bc);
      logz_err[i] = std::abs(z.log_z - oracle::oracle_log_partition(box, f, bc));
      const auto m = o.engine.marginals(box, f, bc);
      double worst = 0.0;
      for (const auto& v : box.sites()) {
        worst = std::max(worst, std::abs(m.at(v) - oracle::oracle_occupation(box, f, bc, v).to_double()));
      }
      marg_err[i] = worst;
    } catch (const std::exception&) {
    }
  });
  const double a = max_of(logz_err), b = max_of(marg_err);
  return {1, "oracle_equivalence", a <= kOracleTol && b <= kOracleTol,
          fmt::format("instances={} max|dlogZ|={:.2e} max|dp|={:.2e} tol={:.0e}", instances.size(), a, b,
                      kOracleTol)};
}

CheckResult derivative_identity(const ValidationOptions& o) {
  const auto instances = random_instances(0x64657269, kDerivativeInstances, 6, 0.1);
  std::vector<double> diff(instances.size());
  CounterRng pick(0x7069636b);
  std::vector<Site> sites;
  for (const auto& inst : instances) {
    // A site with x_v > 0, so log x_v is defined; fall back to reviving one.
    std::vector<Site> live;
    for (const auto& v : inst.box.sites()) {
      if (inst.field.value(v) > 0.0) live.push_back(v);
    }
    sites.push_back(live.empty() ? inst.box.site_at(0) : live[pick() % live.size()]);
  }
  parallel_for(instances.size(), o.workers, [&](std::size_t i) {
    auto f = instances[i].field;
    if (f.value(sites[i]) == 0.0) f = replace_at(f, sites[i], 1.0);
    diff[i] = derivative_identity_check(instances[i].box, f, instances[i].bc, sites[i], kDerivativeStep).diff;
  });
  const double worst = max_of(diff);
  return {2, "derivative_identity", worst <= kDerivativeTol,
          fmt::format("instances={} h={:.0e} max|fd-p|={:.2e} tol={:.0e}", instances.size(), kDerivativeStep, worst,
                      kDerivativeTol)};
}

CheckResult influence_sign(const ValidationOptions& o) {
  struct Case {
    int side;
    double lambda;
    int seed;  // -1: pure field
  };
  std::vector<Case> cases;
  for (int side = 2; side <= 8; ++side) {
    for (double lambda : {1.0, 5.0}) {
      for (int s = -1; s < kSignSeeds; ++s) cases.push_back({side, lambda, s});
    }
  }
  std::vector<double> violation(cases.size());
  parallel_for(cases.size(), o.workers, [&](std::size_t i) {
    const auto& c = cases[i];
    const auto box = LatticeBox::with_size(c.side, c.side, {1 - c.side / 2, 1 - c.side / 2});
    const auto f = c.seed < 0 ? ActivityField(box, c.lambda, 1.0)
                              : sample_field(DisorderSpec::bernoulli(0.7), box, c.lambda,
                                             {0x7369676e, static_cast<std::uint64_t>(c.seed)});
    const auto pe = marginals(box, f, BoundaryCondition::even());
    const auto po = marginals(box, f, BoundaryCondition::odd());
    double worst = 0.0;
    for (std::size_t k = 0; k < box.size(); ++k) {
      const double gap = pe.p[k] - po.p[k];
      const double wrong = parity(box.site_at(k)) == Parity::Even ? -gap : gap;
      worst = std::max(worst, wrong);
    }
    violation[i] = worst;
  });
  const double worst = max_of(violation);
  const auto bad = std::count_if(violation.begin(), violation.end(), [](double v) { return v > kSignTol; });
  return {3, "influence_sign", bad == 0,
          fmt::format("instances={} violations={} worst_wrong_sign={:.2e} tol={:.0e}", cases.size(), bad,
                      std::max(worst, 0.0), kSignTol)};
}

struct AnnulusCell {
  int j;
  int L;
  double lambda;
  DisorderSpec spec;
};

std::vector<AnnulusCell> annulus_cells() {
  std::vector<AnnulusCell> cells;
  for (int j : {1, 2}) {
    for (int L : {3, 4}) {
      for (double lambda : {1.0, 4.0}) {
        for (const auto& spec : {DisorderSpec::bernoulli(0.5), DisorderSpec::uniform(0.0, 2.0)}) {
          cells.push_back({j, L, lambda, spec});
        }
      }
    }
  }
  return cells;
}

constexpr std::uint64_t kAnnulusSeed = 0x616e6e;

CheckResult annulus_inequality(const ValidationOptions& o) {
  const auto cells = annulus_cells();
  const std::size_t n = cells.size() * kAnnulusReplicasPerCell;
  std::vector<AnnulusReport> reports(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    const auto& c = cells[i / kAnnulusReplicasPerCell];
    const auto f = replica_field(c.L, c.j, c.lambda, c.spec, kAnnulusSeed, i % kAnnulusReplicasPerCell, nullptr);
    reports[i] = annulus_bound_check(c.L, c.j, f);
  });
  std::size_t failures = 0;
  double excess = -INFINITY;
  for (const auto& r : reports) {
    failures += !r.holds();
    excess = std::max({excess, r.lhs_even_odd - r.rhs, r.lhs_odd_even - r.rhs});
  }
  return {4, "annulus_inequality", failures == 0,
          fmt::format("instances={} failures={} max(lhs-rhs)={:.4f} tol={:.0e}", n, failures, excess, kAnnulusTol)};
}

CheckResult pathwise_bound(const ValidationOptions& o) {
  const auto cells = annulus_cells();
  const std::size_t n = cells.size() * kAnnulusReplicasPerCell;
  std::vector<GapSample> gaps(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    const auto& c = cells[i / kAnnulusReplicasPerCell];
    gaps[i] = free_energy_gap(
        c.L, c.j, replica_field(c.L, c.j, c.lambda, c.spec, kAnnulusSeed, i % kAnnulusReplicasPerCell, nullptr));
  });
  std::size_t path_failures = 0;
  double max_ratio = 0.0;
  for (const auto& g : gaps) {
    path_failures += std::abs(g.f_hat) > g.pathwise_bound + kAnnulusTol;
    if (g.pathwise_bound > 0.0) max_ratio = std::max(max_ratio, std::abs(g.f_hat) / g.pathwise_bound);
  }
  std::size_t mean_failures = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> f;
    for (std::size_t r = 0; r < kAnnulusReplicasPerCell; ++r) f.push_back(gaps[c * kAnnulusReplicasPerCell + r].f_hat);
    const double bound = c_prime(cells[c].lambda, cells[c].spec) * static_cast<double>(annulus_size(cells[c].j));
    mean_failures += std::abs(stats::mean(f)) > bound + kStdErrors * stats::std_error(f);
  }
  return {5, "pathwise_bound", path_failures == 0 && mean_failures == 0,
          fmt::format("instances={} pathwise_failures={} max|F|/bound={:.4f} cells={} mean_failures={}", n,
                      path_failures, max_ratio, cells.size(), mean_failures)};
}

CheckResult mean_zero(const ValidationOptions& o) {
  std::string detail;
  bool ok = true;
  for (const auto& spec : {DisorderSpec::bernoulli(0.5), DisorderSpec::uniform(0.0, 2.0)}) {
    for (double lambda : {1.0, 4.0}) {
      const auto est = estimate_F_full(4, 2, lambda, spec, kStepOneReplicas, 7, o.workers);
      const double z = est.mean / est.std_error;
      ok = ok && std::abs(est.mean) <= kStdErrors * est.std_error;
      detail += fmt::format("{}{}@{}:z={:+.2f}", detail.empty() ? "" : " ", spec.to_string(), lambda, z);
    }
  }
  return {6, "mean_zero", ok, fmt::format("replicas={} |z|<={} {}", kStepOneReplicas, kStdErrors, detail)};
}

CheckResult fluctuation_band(const ValidationOptions& o) {
  const auto rows = fluctuation_scaling({1, 2, 3}, [](int j) { return 2 * j; }, 4.0, DisorderSpec::bernoulli(0.5),
                                        kFluctuationReplicas, 0x666c7563, o.workers);
  double lo = INFINITY, hi = 0.0;
  std::string ratios;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    ratios += fmt::format(" j{}={:.3e}", r.j, r.ratio);
  }
  const bool ok = hi <= kFluctuationBand * lo && lo > kFluctuationFloor;
  return {7, "fluctuation_scaling", ok,
          fmt::format("var/|L_j|:{} max/min={:.2f} band={} floor={:.0e}", ratios, hi / lo, kFluctuationBand,
                      kFluctuationFloor)};
}

CheckResult contrast(const ValidationOptions& o) {
  const std::vector<int> sides{4, 8, 12};
  std::vector<double> pure(sides.size());
  parallel_for(sides.size(), o.workers, [&](std::size_t s) {
    const auto box = box_lambda(sides[s] / 2);
    pure[s] = boundary_influence(box, ActivityField(box, 5.0, 1.0), {0, 0}).gap;
  });
  std::vector<double> gaps(sides.size() * kContrastReplicas);
  parallel_for(gaps.size(), o.workers, [&](std::size_t k) {
    const auto box = box_lambda(sides[k % sides.size()] / 2);
    const auto f = sample_field(DisorderSpec::bernoulli(0.7), box, 5.0, {1, k / sides.size()});
    gaps[k] = boundary_influence(box, f, {0, 0}).gap;
  });
  std::vector<double> medians;
  for (std::size_t s = 0; s < sides.size(); ++s) {
    std::vector<double> g;
    for (std::size_t r = 0; r < kContrastReplicas; ++r) g.push_back(gaps[r * sides.size() + s]);
    medians.push_back(stats::quantile(g, 0.5));
  }
  const bool persists = pure.back() > kPersistence * pure.front();
  bool decreasing = true;
  for (std::size_t s = 1; s < medians.size(); ++s) decreasing = decreasing && medians[s] < medians[s - 1];
  return {8, "disorder_contrast", persists && decreasing,
          fmt::format("pure gap 4/8/12={:.4f}/{:.4f}/{:.4f} retained={:.3f}>{} disordered median={:.4f}/{:.4f}/{:.4f}",
                      pure[0], pure[1], pure[2], pure[2] / pure[0], kPersistence, medians[0], medians[1],
                      medians[2])};
}

// Two-sample chi-square homogeneity p-value.
double homogeneity_p(const std::map<std::vector<Site>, std::array<int, 2>>& table) {
  std::array<double, 2> totals{0, 0};
  for (const auto& [_, c] : table) {
    totals[0] += c[0];
    totals[1] += c[1];
  }
  const double n = totals[0] + totals[1];
  double stat = 0.0;
  for (const auto& [_, c] : table) {
    const double col = c[0] + c[1];
    for (int s = 0; s < 2; ++s) {
      const double e = totals[s] * col / n;
      stat += (c[s] - e) * (c[s] - e) / e;
    }
  }
  if (table.size() < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(table.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

CheckResult mcmc_agreement(const ValidationOptions& o) {
  std::string detail;
  bool ok = true;
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const auto box = LatticeBox::with_size(w, h);
    const ActivityField f(box, 1.5, 1.0);
    const auto bc = BoundaryCondition::empty();
    const HeatBathKernel k(box, f, bc);
    const ExactSampler exact(box, f, bc);
    std::vector<std::vector<Site>> a(kChiDraws), b(kChiDraws);
    std::atomic<bool> coalesced{true};
    parallel_for(kChiDraws, o.workers, [&](std::size_t r) {
      auto s = cftp_sample(k, {0x63667470, r});
      if (s.sample) a[r] = s.sample->sites();
      else coalesced = false;
      b[r] = exact.draw({0x65786163, r});
    });
    std::map<std::vector<Site>, std::array<int, 2>> table;
    for (int r = 0; r < kChiDraws; ++r) {
      ++table[a[r]][0];
      ++table[b[r]][1];
    }
    const double p = homogeneity_p(table);
    ok = ok && coalesced && p >= kChiLevel;
    detail += fmt::format("{}x{}:p={:.4f} ", w, h, p);
  }
  CounterRng frng(0x6f72646572);
  const auto box = LatticeBox::with_size(6, 6);
  const HeatBathKernel k(box, rational_field(frng, box, 4.0, 0.1), BoundaryCondition::even());
  MonotonePair pair{k.bottom(), k.top()};
  CounterRng rng(0x73776565);
  int violations = 0;
  for (int s = 0; s < kCoupledSweeps; ++s) {
    try {
      k.coupled_sweep(pair, rng);
    } catch (const std::logic_error&) {
      ++violations;
      pair = {k.bottom(), k.top()};
    }
    violations += !sandwiched(pair.lower, pair.upper);
  }
  ok = ok && violations == 0;
  return {9, "mcmc_agreement", ok,
          fmt::format("draws={} {}level={:.0e} coupled_sweeps={} order_violations={}", kChiDraws, detail, kChiLevel,
                      kCoupledSweeps, violations)};
}

CheckResult determinism(const ValidationOptions&) {
  std::vector<ExperimentConfig> configs(3);
  configs[0].command = "influence";
  configs[0].disorder = "bernoulli:0.7";
  configs[0].lambda = 5.0;
  configs[0].replicas = 20;
  configs[1].command = "free-energy";
  configs[1].j = 1;
  configs[1].L = 3;
  configs[1].lambda = 2.0;
  configs[1].replicas = 20;
  configs[2].command = "fluctuations";
  configs[2].j_values = {1, 2};
  configs[2].lambda = 4.0;
  configs[2].replicas = 30;
  std::size_t mismatches = 0;
  for (auto& cfg : configs) {
    cfg.seed = 0x64657465;
    cfg.workers = 1;
    const auto first = to_csv(run_experiment(cfg));
    const auto again = to_csv(run_experiment(cfg));
    cfg.workers = 8;
    const auto wide = to_csv(run_experiment(cfg));
    mismatches += (first != again) + (first != wide);
  }
  return {10, "determinism", mismatches == 0,
          fmt::format("commands={} workers=1,1,8 mismatched_bodies={}", configs.size(), mismatches)};
}

}  // namespace

EngineHooks EngineHooks::production() {
  EngineHooks h;
  h.log_partition = [](const LatticeBox& b, const ActivityField& f, const BoundaryCondition& bc) {
    return hardcore::log_partition(b, f, bc);
  };
  h.marginals = [](const LatticeBox& b, const ActivityField& f, const BoundaryCondition& bc) {
    return hardcore::marginals(b, f, bc);
  };
  return h;
}

EngineHooks EngineHooks::off_by_one() {
  EngineHooks h;
  h.log_partition = [](const LatticeBox& b, const ActivityField& f, const BoundaryCondition& bc) {
    return hardcore::log_partition(b.translated({1, 0}), f.translated({1, 0}), bc);
  };
  h.marginals = [](const LatticeBox& b, const ActivityField& f, const BoundaryCondition& bc) {
    auto m = hardcore::marginals(b.translated({1, 0}), f.translated({1, 0}), bc);
    m.box = b;
    return m;
  };
  return h;
}

CheckResult run_check(int id, const ValidationOptions& opts) {
  switch (id) {
    case 1: return oracle_equivalence(opts);
    case 2: return derivative_identity(opts);
    case 3: return influence_sign(opts);
    case 4: return annulus_inequality(opts);
    case 5: return pathwise_bound(opts);
    case 6: return mean_zero(opts);
    case 7: return fluctuation_band(opts);
    case 8: return contrast(opts);
    case 9: return mcmc_agreement(opts);
    case 10: return determinism(opts);
    default: throw std::invalid_argument("unknown check id");
  }
}

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  for (int id = 1; id <= kCheckCount; ++id) out.push_back(run_check(id, opts));
  return out;
}

std::string format_check(const CheckResult& r) {
  return fmt::format("{} {:>2} {:<20} {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
}

}  // namespace hardcore
