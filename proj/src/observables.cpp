#include "hardcore/observables.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hardcore/exact_engine.hpp"
#include "hardcore/parallel.hpp"
#include "hardcore/stats.hpp"

namespace hardcore {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double log_z(const LatticeBox& box, const ActivityField& f, BoundaryKind tau) {
  return log_partition(box, f, BoundaryCondition::of_kind(tau)).log_z;
}

FEstimate summarise(int L, int j, double lambda, std::uint64_t seed,
                    std::vector<GapSample> samples) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.f_hat);
  FEstimate e;
  e.mean = stats::mean(values);
  e.std_error = stats::std_error(values);
  e.replicas = samples.size();
  e.j = j;
  e.L = L;
  e.lambda = lambda;
  e.seed = seed;
  e.samples = std::move(samples);
  return e;
}

// E[g(X)] as an integral of g over the upper quantile function on (0, 1).
template <class Dist, class G>
double expect_by_quantile(const Dist& dist, G g) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double s) {
    return g(boost::math::quantile(boost::math::complement(dist, s)));
  };
  return integrator.integrate(integrand, 0.0, 1.0, 1e-12);
}

}  // namespace

FreeEnergyG free_energy_G(int L, const LatticeBox& inner, const ActivityField& f,
                          BoundaryKind tau) {
  const double lambda = f.scale();
  require(lambda > 0.0, "free_energy_G: lambda must be > 0");
  const auto outer = box_lambda(L);
  require(outer.contains(inner) && f.region().contains(outer),
          "free_energy_G: need inner within Lambda_L within field region");
  const double value =
      (log_z(outer, f, tau) - log_z(outer, switch_off_inside(f, inner), tau)) / lambda;
  return {value, tau, L, inner, lambda};
}

double annulus_log_sum(int j, const ActivityField& f) {
  const auto inner = box_lambda(j);
  const auto ring = box_lambda(j + 1);
  require(f.region().contains(ring), "annulus_log_sum: field must cover Lambda_{j+1}");
  double s = 0.0;
  for (const auto& v : ring.sites()) {
    if (!inner.contains(v)) s += std::log1p(f.activity(v));
  }
  return s;
}

GapSample free_energy_gap(int L, int j, const ActivityField& f) {
  require(j >= 1 && j < L, "free_energy_gap: need 1 <= j < L");
  const auto inner = box_lambda(j);
  GapSample s;
  s.g_even = free_energy_G(L, inner, f, BoundaryKind::Even).value;
  s.g_odd = free_energy_G(L, inner, f, BoundaryKind::Odd).value;
  s.f_hat = s.g_even - s.g_odd;
  s.pathwise_bound = 2.0 / f.scale() * annulus_log_sum(j, f);
  return s;
}

ActivityField replica_field(int L, int j, double lambda, const DisorderSpec& spec,
                            std::uint64_t seed, std::uint64_t replica,
                            const ActivityField* inside) {
  auto field = sample_field(spec, box_lambda(L), lambda, {seed, replica});
  if (inside != nullptr) field = glue_inside(field, *inside, box_lambda(j));
  return field;
}

FEstimate estimate_F(int L, int j, double lambda, const ActivityField& inside_field,
                     const DisorderSpec& spec, std::size_t replicas, std::uint64_t seed,
                     unsigned workers) {
  require(j >= 1 && j < L, "estimate_F: need 1 <= j < L");
  require(replicas >= 2, "estimate_F: need at least 2 replicas");
  require(lambda > 0.0, "estimate_F: lambda must be > 0");
  require(inside_field.region().contains(box_lambda(j)),
          "estimate_F: inside field must cover Lambda_j");
  std::vector<GapSample> samples(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    samples[r] = free_energy_gap(L, j, replica_field(L, j, lambda, spec, seed, r, &inside_field));
  });
  return summarise(L, j, lambda, seed, std::move(samples));
}

FEstimate estimate_F_full(int L, int j, double lambda, const DisorderSpec& spec,
                          std::size_t replicas, std::uint64_t seed, unsigned workers) {
  require(j >= 1 && j < L, "estimate_F_full: need 1 <= j < L");
  require(replicas >= 2, "estimate_F_full: need at least 2 replicas");
  require(lambda > 0.0, "estimate_F_full: lambda must be > 0");
  std::vector<GapSample> samples(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    samples[r] = free_energy_gap(L, j, replica_field(L, j, lambda, spec, seed, r, nullptr));
  });
  return summarise(L, j, lambda, seed, std::move(samples));
}

InfluenceGap boundary_influence(const LatticeBox& box, const ActivityField& f, Site v) {
  require(box.contains(v), "boundary_influence: site outside box");
  InfluenceGap g;
  g.site = v;
  g.p_even = occupation_probability(box, f, BoundaryCondition::even(), v);
  g.p_odd = occupation_probability(box, f, BoundaryCondition::odd(), v);
  g.gap = g.p_even - g.p_odd;
  return g;
}

AnnulusReport annulus_bound_check(int L, int j, const ActivityField& f) {
  require(j >= 1 && j + 1 <= L, "annulus_bound_check: need j + 1 <= L");
  const auto outer = box_lambda(L);
  require(f.region().contains(outer) && f.region().theta_symmetric(),
          "annulus_bound_check: field region must contain Lambda_L and be reflection symmetric");
  const auto reflected = f.composed([j](Site v) { return phi_j(v, j); });
  AnnulusReport r;
  r.rhs = annulus_log_sum(j, f);
  r.lhs_even_odd = log_z(outer, f, BoundaryKind::Even) - log_z(outer, reflected, BoundaryKind::Odd);
  r.lhs_odd_even = log_z(outer, f, BoundaryKind::Odd) - log_z(outer, reflected, BoundaryKind::Even);
  r.holds_even_odd = r.lhs_even_odd <= r.rhs + kInequalityTolerance;
  r.holds_odd_even = r.lhs_odd_even <= r.rhs + kInequalityTolerance;
  return r;
}

double c_prime(double lambda, const DisorderSpec& spec) {
  require(lambda > 0.0 && std::isfinite(lambda), "c_prime: lambda must be > 0");
  const double a = spec.p1();
  const double b = spec.p2();
  auto g = [lambda](double x) { return std::log1p(lambda * x); };
  double expectation = 0.0;
  switch (spec.family()) {
    case DisorderFamily::Constant:
      expectation = g(a);
      break;
    case DisorderFamily::Bernoulli:
      expectation = a * g(1.0);
      break;
    case DisorderFamily::Uniform: {
      // Antiderivative of log(1 + lambda x) is ((1 + lambda x) log(1 + lambda x) - lambda x) / lambda.
      auto prim = [lambda](double x) {
        const double u = 1.0 + lambda * x;
        return (u * std::log(u) - lambda * x) / lambda;
      };
      expectation = (prim(b) - prim(a)) / (b - a);
      break;
    }
    case DisorderFamily::LogNormal:
      expectation = expect_by_quantile(boost::math::lognormal_distribution<double>(a, b), g);
      break;
    case DisorderFamily::Gamma:
      expectation = expect_by_quantile(boost::math::gamma_distribution<double>(a, b), g);
      break;
    case DisorderFamily::Pareto:
      expectation = expect_by_quantile(boost::math::pareto_distribution<double>(b, a), g);
      break;
  }
  return 2.0 / lambda * expectation;
}

std::vector<FluctuationRow> fluctuation_scaling(const std::vector<int>& j_values,
                                                const std::function<int(int)>& L_rule,
                                                double lambda, const DisorderSpec& spec,
                                                std::size_t replicas, std::uint64_t seed,
                                                unsigned workers) {
  require(replicas >= 30, "fluctuation_scaling: need at least 30 replicas");
  std::vector<FluctuationRow> rows;
  for (int j : j_values) {
    const int L = L_rule(j);
    require(j >= 1 && j < L, "fluctuation_scaling: need 1 <= j < L(j)");
    const auto est = estimate_F_full(L, j, lambda, spec, replicas, seed, workers);
    FluctuationRow row;
    row.j = j;
    row.L = L;
    row.area = box_lambda(j).size();
    for (const auto& s : est.samples) row.samples.push_back(s.f_hat);
    row.variance = stats::variance(row.samples);
    row.variance_std_error = stats::variance_std_error(row.samples);
    row.ratio = row.variance / static_cast<double>(row.area);
    rows.push_back(std::move(row));
  }
  return rows;
}

DerivativeReport derivative_identity_check(const LatticeBox& box, const ActivityField& f,
                                           const BoundaryCondition& bc, Site v, double h) {
  require(box.contains(v), "derivative_identity_check: site outside box");
  require(h > 0.0 && h < 0.1, "derivative_identity_check: need 0 < h < 0.1");
  const double x = f.value(v);
  require(x > 0.0, "derivative_identity_check: x_v = 0 has no log-derivative");
  const double up = log_partition(box, replace_at(f, v, x * std::exp(h)), bc).log_z;
  const double down = log_partition(box, replace_at(f, v, x * std::exp(-h)), bc).log_z;
  DerivativeReport r;
  r.fd = (up - down) / (2.0 * h);
  r.marginal = occupation_probability(box, f, bc, v);
  r.diff = std::abs(r.fd - r.marginal);
  return r;
}

double gap_log_derivative(int L, const LatticeBox& inner, const ActivityField& f, Site v,
                          double h) {
  require(h > 0.0 && h < 0.1, "gap_log_derivative: need 0 < h < 0.1");
  const double x = f.value(v);
  require(x > 0.0, "gap_log_derivative: x_v = 0 has no log-derivative");
  auto gap = [&](double value) {
    const auto g = replace_at(f, v, value);
    return free_energy_G(L, inner, g, BoundaryKind::Even).value -
           free_energy_G(L, inner, g, BoundaryKind::Odd).value;
  };
  return (gap(x * std::exp(h)) - gap(x * std::exp(-h))) / (2.0 * h);
}

}  // namespace hardcore
