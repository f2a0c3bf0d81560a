#include "hardcore/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hardcore/exact_engine.hpp"
#include "hardcore/field_io.hpp"
#include "hardcore/mcmc.hpp"
#include "hardcore/observables.hpp"
#include "hardcore/parallel.hpp"
#include "hardcore/stats.hpp"

namespace hardcore {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string site_label(const char* name, Site v) {
  return std::string(name) + "[" + std::to_string(v.x) + "," + std::to_string(v.y) + "]";
}

std::string field_label(const ExperimentConfig& cfg) {
  if (!cfg.field_file.empty()) return "file:" + cfg.field_file;
  return DisorderSpec::parse(cfg.field).to_string();
}

bool use_cftp(const ExperimentConfig& cfg) {
  require(cfg.method == "exact" || cfg.method == "cftp", "method must be exact or cftp");
  return cfg.method == "cftp";
}

// Record template for single-field commands.
ExperimentRecord base_record(const ExperimentConfig& cfg, const ActivityField& f) {
  ExperimentRecord r;
  r.replica = 0;
  r.seed = cfg.seed;
  r.j = cfg.j;
  r.lambda = f.scale();
  r.disorder = field_label(cfg);
  return r;
}

Configuration cftp_or_throw(const HeatBathKernel& k, ReplicaSeed seed) {
  auto result = cftp_sample(k, seed);
  if (!result.sample) throw std::runtime_error("cftp: chains did not coalesce");
  return std::move(*result.sample);
}

}  // namespace

LatticeBox config_box(const ExperimentConfig& cfg) {
  if (cfg.box_size) {
    const auto [w, h] = *cfg.box_size;
    require(w >= 1 && h >= 1 && w <= kMaxBoxSide && h <= kMaxBoxSide, "box sides must be in 1..64");
    return LatticeBox::with_size(w, h, cfg.origin);
  }
  require(cfg.j.has_value(), "give --box WxH or --j");
  require(*cfg.j >= 1 && 2 * *cfg.j <= kMaxBoxSide, "j out of range");
  return box_lambda(*cfg.j);
}

ActivityField config_field(const ExperimentConfig& cfg, const LatticeBox& box) {
  if (!cfg.field_file.empty()) {
    auto f = read_field_file(cfg.field_file);
    require(f.region().contains(box), "field file region does not cover the box");
    return f;
  }
  require(cfg.lambda >= 0.0 && std::isfinite(cfg.lambda), "lambda must be finite and >= 0");
  return sample_field(DisorderSpec::parse(cfg.field), box, cfg.lambda, {cfg.seed, 0});
}

std::vector<ExperimentRecord> cmd_logz(const ExperimentConfig& cfg) {
  const auto box = config_box(cfg);
  const auto f = config_field(cfg, box);
  const auto z = log_partition(box, f, BoundaryCondition::of_kind(cfg.bc));
  auto r = base_record(cfg, f);
  r.observable = "log_z";
  r.value = z.is_zero ? -INFINITY : z.log_z;
  return {r};
}

std::vector<ExperimentRecord> cmd_occupation(const ExperimentConfig& cfg) {
  const auto box = config_box(cfg);
  const auto f = config_field(cfg, box);
  const auto bc = BoundaryCondition::of_kind(cfg.bc);
  std::vector<ExperimentRecord> out;
  auto r = base_record(cfg, f);
  if (!use_cftp(cfg)) {
    const auto m = marginals(box, f, bc);
    for (std::size_t i = 0; i < box.size(); ++i) {
      r.observable = site_label("occupation", box.site_at(i));
      r.value = m.p[i];
      out.push_back(r);
    }
    return out;
  }
  require(cfg.replicas >= 1, "need at least one replica");
  const HeatBathKernel k(box, f, bc);
  std::vector<Configuration> draws(cfg.replicas, k.empty());
  parallel_for(cfg.replicas, cfg.workers,
               [&](std::size_t i) { draws[i] = cftp_or_throw(k, {cfg.seed, i}); });
  const double n = static_cast<double>(cfg.replicas);
  for (std::size_t i = 0; i < box.size(); ++i) {
    double hits = 0.0;
    for (const auto& c : draws) hits += c.occupied_at(i) ? 1.0 : 0.0;
    const double p = hits / n;
    r.observable = site_label("occupation", box.site_at(i));
    r.value = p;
    r.std_error = std::sqrt(p * (1 - p) / n);
    out.push_back(r);
  }
  return out;
}

std::vector<ExperimentRecord> cmd_sample(const ExperimentConfig& cfg) {
  const auto box = config_box(cfg);
  const auto f = config_field(cfg, box);
  const auto bc = BoundaryCondition::of_kind(cfg.bc);
  require(cfg.replicas >= 1, "need at least one replica");
  std::vector<std::vector<Site>> draws(cfg.replicas);
  std::vector<std::uint64_t> sweeps(cfg.replicas, 0);
  if (use_cftp(cfg)) {
    const HeatBathKernel k(box, f, bc);
    parallel_for(cfg.replicas, cfg.workers, [&](std::size_t i) {
      auto result = cftp_sample(k, {cfg.seed, i});
      if (!result.sample) throw std::runtime_error("cftp: chains did not coalesce");
      draws[i] = result.sample->sites();
      sweeps[i] = result.sweeps;
    });
  } else {
    const ExactSampler sampler(box, f, bc);
    parallel_for(cfg.replicas, cfg.workers,
                 [&](std::size_t i) { draws[i] = sampler.draw({cfg.seed, i}); });
  }
  std::vector<ExperimentRecord> out;
  auto r = base_record(cfg, f);
  for (std::size_t i = 0; i < cfg.replicas; ++i) {
    r.replica = i;
    std::size_t even = 0;
    for (const auto& v : draws[i]) even += parity(v) == Parity::Even;
    r.observable = "n_even";
    r.value = static_cast<double>(even);
    out.push_back(r);
    r.observable = "n_odd";
    r.value = static_cast<double>(draws[i].size() - even);
    out.push_back(r);
    if (use_cftp(cfg)) {
      r.observable = "cftp_sweeps";
      r.value = static_cast<double>(sweeps[i]);
      out.push_back(r);
    }
    for (const auto& v : draws[i]) {
      r.observable = site_label("occupied", v);
      r.value = 1.0;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<ExperimentRecord> cmd_influence(const ExperimentConfig& cfg) {
  const auto spec = DisorderSpec::parse(cfg.disorder);
  require(!cfg.sides.empty(), "need at least one side length");
  for (int s : cfg.sides) {
    require(s >= 2 && s % 2 == 0 && s <= kMaxTransferHeight, "sides must be even, in 2..24");
  }
  require(cfg.replicas >= 1, "need at least one replica");
  require(cfg.lambda >= 0.0 && std::isfinite(cfg.lambda), "lambda must be finite and >= 0");
  const std::size_t n_sides = cfg.sides.size();
  std::vector<InfluenceGap> gaps(cfg.replicas * n_sides);
  parallel_for(gaps.size(), cfg.workers, [&](std::size_t k) {
    const std::size_t rep = k / n_sides;
    const auto box = box_lambda(cfg.sides[k % n_sides] / 2);
    gaps[k] = boundary_influence(box, sample_field(spec, box, cfg.lambda, {cfg.seed, rep}), {0, 0});
  });

  std::vector<ExperimentRecord> out;
  ExperimentRecord r;
  r.seed = cfg.seed;
  r.lambda = cfg.lambda;
  r.disorder = spec.to_string();
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    r.replica = k / n_sides;
    r.L = cfg.sides[k % n_sides] / 2;
    for (auto [name, value] : {std::pair{"p_even", gaps[k].p_even}, std::pair{"p_odd", gaps[k].p_odd},
                               std::pair{"gap", gaps[k].gap}}) {
      r.observable = name;
      r.value = value;
      out.push_back(r);
    }
  }
  r.replica.reset();
  for (std::size_t s = 0; s < n_sides; ++s) {
    std::vector<double> g;
    for (std::size_t rep = 0; rep < cfg.replicas; ++rep) g.push_back(gaps[rep * n_sides + s].gap);
    r.L = cfg.sides[s] / 2;
    for (auto [name, q] : {std::pair{"gap_q1", 0.25}, std::pair{"gap_median", 0.5}, std::pair{"gap_q3", 0.75}}) {
      r.observable = name;
      r.value = stats::quantile(g, q);
      out.push_back(r);
    }
  }
  return out;
}

std::vector<ExperimentRecord> cmd_free_energy(const ExperimentConfig& cfg) {
  require(cfg.j && cfg.L, "free-energy needs --j and --L");
  const int j = *cfg.j;
  const int L = *cfg.L;
  require(j >= 1 && j < L, "free-energy needs 1 <= j < L");
  require(2 * (L + 2) <= kMaxTransferHeight, "L too large");
  require(cfg.replicas >= 2, "free-energy needs at least 2 replicas");
  require(cfg.lambda > 0.0 && std::isfinite(cfg.lambda), "lambda must be finite and > 0");
  const auto spec = DisorderSpec::parse(cfg.disorder);
  std::optional<ActivityField> inside;
  if (!cfg.field_file.empty()) inside = read_field_file(cfg.field_file);
  const ActivityField* inside_ptr = inside ? &*inside : nullptr;
  if (inside) require(inside->region().contains(box_lambda(j)), "inside field must cover Lambda_j");

  const std::size_t n = cfg.replicas;
  std::vector<GapSample> samples(n);
  std::vector<AnnulusReport> annulus(n);
  std::vector<double> wider(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const auto f = replica_field(L, j, cfg.lambda, spec, cfg.seed, i, inside_ptr);
    samples[i] = free_energy_gap(L, j, f);
    annulus[i] = annulus_bound_check(L, j, f);
    wider[i] = free_energy_gap(L + 2, j, replica_field(L + 2, j, cfg.lambda, spec, cfg.seed, i, inside_ptr)).f_hat;
  });

  std::vector<ExperimentRecord> out;
  ExperimentRecord r;
  r.seed = cfg.seed;
  r.j = j;
  r.L = L;
  r.lambda = cfg.lambda;
  r.disorder = spec.to_string() + (inside ? " inside=file:" + cfg.field_file : "");
  std::vector<double> f_hat;
  double max_ratio = 0.0;
  bool all_hold = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = samples[i];
    const auto& a = annulus[i];
    f_hat.push_back(s.f_hat);
    if (s.pathwise_bound > 0.0) max_ratio = std::max(max_ratio, std::abs(s.f_hat) / s.pathwise_bound);
    all_hold = all_hold && a.holds();
    r.replica = i;
    for (auto [name, value] :
         {std::pair{"f_hat", s.f_hat}, std::pair{"g_even", s.g_even}, std::pair{"g_odd", s.g_odd},
          std::pair{"pathwise_bound", s.pathwise_bound}, std::pair{"annulus_lhs_even_odd", a.lhs_even_odd},
          std::pair{"annulus_lhs_odd_even", a.lhs_odd_even}, std::pair{"annulus_rhs", a.rhs},
          std::pair{"annulus_holds", a.holds() ? 1.0 : 0.0}}) {
      r.observable = name;
      r.value = value;
      out.push_back(r);
    }
  }

  r.replica.reset();
  const double mean = stats::mean(f_hat);
  const double cp = c_prime(cfg.lambda, spec);
  auto summary = [&](const char* name, double value, std::optional<double> se = std::nullopt) {
    r.observable = name;
    r.value = value;
    r.std_error = se;
    out.push_back(r);
  };
  summary("f_mean", mean, stats::std_error(f_hat));
  summary("max_ratio_to_bound", max_ratio);
  summary("all_hold", all_hold ? 1.0 : 0.0);
  summary("c_prime", cp);
  summary("c_prime_bound", cp * static_cast<double>(annulus_size(j)));
  r.L = L + 2;
  summary("f_mean", stats::mean(wider), stats::std_error(wider));
  summary("shift_from_L", stats::mean(wider) - mean);
  return out;
}

std::vector<ExperimentRecord> cmd_fluctuations(const ExperimentConfig& cfg) {
  require(!cfg.j_values.empty(), "need at least one j");
  require(cfg.lambda > 0.0 && std::isfinite(cfg.lambda), "lambda must be finite and > 0");
  const auto spec = DisorderSpec::parse(cfg.disorder);
  const int a = cfg.L_scale;
  const int b = cfg.L_offset;
  for (int j : cfg.j_values) require(2 * (a * j + b) <= kMaxTransferHeight, "L too large");
  const auto rows = fluctuation_scaling(cfg.j_values, [a, b](int j) { return a * j + b; }, cfg.lambda, spec,
                                        cfg.replicas, cfg.seed, cfg.workers);
  std::vector<ExperimentRecord> out;
  ExperimentRecord r;
  r.seed = cfg.seed;
  r.lambda = cfg.lambda;
  r.disorder = spec.to_string();
  for (const auto& row : rows) {
    r.j = row.j;
    r.L = row.L;
    r.observable = "f_hat";
    for (std::size_t i = 0; i < row.samples.size(); ++i) {
      r.replica = i;
      r.value = row.samples[i];
      out.push_back(r);
    }
  }
  r.replica.reset();
  for (const auto& row : rows) {
    r.j = row.j;
    r.L = row.L;
    r.observable = "variance";
    r.value = row.variance;
    r.std_error = row.variance_std_error;
    out.push_back(r);
    r.observable = "variance_per_site";
    r.value = row.ratio;
    r.std_error = row.variance_std_error / static_cast<double>(row.area);
    out.push_back(r);
  }
  return out;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.command == "logz") return cmd_logz(cfg);
  if (cfg.command == "occupation") return cmd_occupation(cfg);
  if (cfg.command == "influence") return cmd_influence(cfg);
  if (cfg.command == "free-energy") return cmd_free_energy(cfg);
  if (cfg.command == "fluctuations") return cmd_fluctuations(cfg);
  if (cfg.command == "sample") return cmd_sample(cfg);
  throw std::invalid_argument("unknown command: " + cfg.command);
}

std::string manifest_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json m;
  m["tool"] = "hardcore";
  m["version"] = kToolVersion;
  m["command"] = cfg.command;
  if (cfg.box_size) {
    m["box"] = {cfg.box_size->first, cfg.box_size->second};
    m["origin"] = {cfg.origin.x, cfg.origin.y};
  }
  if (cfg.j) m["j"] = *cfg.j;
  if (cfg.L) m["L"] = *cfg.L;
  m["lambda"] = cfg.lambda;
  m["bc"] = to_string(cfg.bc);
  m["field"] = cfg.field;
  m["field_file"] = cfg.field_file;
  m["disorder"] = cfg.disorder;
  m["replicas"] = cfg.replicas;
  m["seed"] = cfg.seed;
  m["workers"] = cfg.workers;
  m["sides"] = cfg.sides;
  m["jvalues"] = cfg.j_values;
  m["L_scale"] = cfg.L_scale;
  m["L_offset"] = cfg.L_offset;
  m["method"] = cfg.method;
  m["out"] = cfg.out;
  m["columns"] = std::string(kCsvHeader);
  return m.dump(2) + "\n";
}

}  // namespace hardcore
