#ifndef HARDCORE_OBSERVABLES_HPP
#define HARDCORE_OBSERVABLES_HPP

// Free-energy responses to the field inside a box, their even-minus-odd
// differences, boundary influence at a site, the reflection/annulus
// inequality, and disorder-fluctuation statistics.

#include <cstdint>
#include <functional>
#include <vector>

#include "hardcore/disorder.hpp"
#include "hardcore/lattice.hpp"

namespace hardcore {

/// G = (1/lambda) (log Z^tau_{Lambda_L}(x) - log Z^tau_{Lambda_L}(x switched off on inner)).
struct FreeEnergyG {
  double value = 0.0;
  BoundaryKind tau = BoundaryKind::Even;
  int L = 0;
  LatticeBox inner{0, 0, 0, 0};
  double lambda = 0.0;
};

/// lambda is f.scale(); f must cover box_lambda(L). Throws for lambda = 0.
FreeEnergyG free_energy_G(int L, const LatticeBox& inner, const ActivityField& f,
                          BoundaryKind tau);

/// One evaluation of G^e - G^o together with its pathwise annulus bound
/// (2/lambda) sum_{v in Lambda_{j+1} \ Lambda_j} log(1 + lambda x_v).
struct GapSample {
  double g_even = 0.0;
  double g_odd = 0.0;
  double f_hat = 0.0;
  double pathwise_bound = 0.0;
};

GapSample free_energy_gap(int L, int j, const ActivityField& f);

/// sum over Lambda_{j+1} \ Lambda_j of log(1 + lambda x_v).
double annulus_log_sum(int j, const ActivityField& f);

/// |Lambda_{j+1} \ Lambda_j| = 8j + 4.
inline std::size_t annulus_size(int j) { return static_cast<std::size_t>(8 * j + 4); }

struct FEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  int j = 0;
  int L = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<GapSample> samples;  // replica order
};

/// Outer field on Lambda_L for one replica: outside Lambda_j sampled from spec
/// with seed (seed, replica); inside Lambda_j copied from `inside` when given.
ActivityField replica_field(int L, int j, double lambda, const DisorderSpec& spec,
                            std::uint64_t seed, std::uint64_t replica,
                            const ActivityField* inside);

/// Conditional estimate of F: inside field held fixed, outside resampled per replica.
FEstimate estimate_F(int L, int j, double lambda, const ActivityField& inside_field,
                     const DisorderSpec& spec, std::size_t replicas, std::uint64_t seed,
                     unsigned workers = 1);

/// Unconditioned version: the whole field is resampled per replica.
FEstimate estimate_F_full(int L, int j, double lambda, const DisorderSpec& spec,
                          std::size_t replicas, std::uint64_t seed, unsigned workers = 1);

struct InfluenceGap {
  Site site;
  double p_even = 0.0;
  double p_odd = 0.0;
  double gap = 0.0;  // p_even - p_odd
};

/// Occupation of v under even minus under odd boundary conditions on box.
InfluenceGap boundary_influence(const LatticeBox& box, const ActivityField& f, Site v);

struct AnnulusReport {
  double lhs_even_odd = 0.0;  // log Z^e(y) - log Z^o(y o phi)
  double lhs_odd_even = 0.0;  // log Z^o(y) - log Z^e(y o phi)
  double rhs = 0.0;           // sum over the annulus of log(1 + lambda y_v)
  bool holds_even_odd = false;
  bool holds_odd_even = false;
  bool holds() const { return holds_even_odd && holds_odd_even; }
};

inline constexpr double kInequalityTolerance = 1e-9;

/// Compares Z^tau on Lambda_L with Z^tau' on the phi-reflected field.
/// f.region() must contain Lambda_L and be symmetric under reflect_theta.
AnnulusReport annulus_bound_check(int L, int j, const ActivityField& f);

/// c'_lambda = (2/lambda) E[log(1 + lambda X)].
double c_prime(double lambda, const DisorderSpec& spec);

struct FluctuationRow {
  int j = 0;
  int L = 0;
  std::size_t area = 0;
  double variance = 0.0;
  double variance_std_error = 0.0;
  double ratio = 0.0;  // variance / area
  std::vector<double> samples;
};

/// Variance of G^e - G^o over full-disorder replicas for each j, with L = L_rule(j).
std::vector<FluctuationRow> fluctuation_scaling(const std::vector<int>& j_values,
                                                const std::function<int(int)>& L_rule,
                                                double lambda, const DisorderSpec& spec,
                                                std::size_t replicas, std::uint64_t seed,
                                                unsigned workers = 1);

struct DerivativeReport {
  double fd = 0.0;
  double marginal = 0.0;
  double diff = 0.0;
};

/// Central difference of log Z in log x_v against the exact marginal at v.
DerivativeReport derivative_identity_check(const LatticeBox& box, const ActivityField& f,
                                           const BoundaryCondition& bc, Site v, double h);

/// Central difference in log x_v of G^e - G^o on Lambda_L with inner box `inner`.
double gap_log_derivative(int L, const LatticeBox& inner, const ActivityField& f, Site v,
                          double h);

}  // namespace hardcore

#endif  // HARDCORE_OBSERVABLES_HPP
