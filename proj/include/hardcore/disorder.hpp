#ifndef HARDCORE_DISORDER_HPP
#define HARDCORE_DISORDER_HPP

// Random activity fields lambda_v = lambda * x_v and the surgeries applied to them.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hardcore/lattice.hpp"

namespace hardcore {

enum class DisorderFamily { Constant, Bernoulli, Uniform, LogNormal, Gamma, Pareto };

/// Distribution of the i.i.d. site variables x_v. Parameter meaning by family:
///   Constant(c), Bernoulli(p), Uniform(a, b), LogNormal(m, s) with log x ~ N(m, s^2),
///   Gamma(shape k, scale t), Pareto(alpha, x_min).
class DisorderSpec {
 public:
  static DisorderSpec constant(double c);
  static DisorderSpec bernoulli(double p);
  static DisorderSpec uniform(double a, double b);
  static DisorderSpec lognormal(double m, double s);
  static DisorderSpec gamma(double k, double t);
  static DisorderSpec pareto(double alpha, double x_min);

  /// Grammar: constant:c | bernoulli:p | uniform:a,b | lognormal:m,s | gamma:k,t | pareto:a,xmin
  static DisorderSpec parse(const std::string& text);

  DisorderFamily family() const noexcept { return family_; }
  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return p2_; }

  /// Canonical text form, accepted by parse().
  std::string to_string() const;

  /// One draw using the generator's words.
  template <class Rng>
  double draw(Rng& rng) const;

  friend bool operator==(const DisorderSpec&, const DisorderSpec&) = default;

 private:
  DisorderSpec(DisorderFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
  DisorderFamily family_ = DisorderFamily::Constant;
  double p1_ = 1.0;
  double p2_ = 0.0;
};

struct ReplicaSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
};

/// Site values x_v on a box together with the global scale lambda.
class ActivityField {
 public:
  /// Field with x_v = fill everywhere on region.
  ActivityField(LatticeBox region, double scale, double fill = 1.0);
  /// values in lexicographic site order of region.
  ActivityField(LatticeBox region, double scale, std::vector<double> values);

  const LatticeBox& region() const noexcept { return region_; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// x_v; v must lie in the region (std::out_of_range otherwise).
  double value(Site v) const;
  /// lambda * x_v.
  double activity(Site v) const { return scale_ * value(v); }

  /// False only for region sites with x_v = 0 (deleted). Sites outside the
  /// region count as present.
  bool present(Site v) const noexcept {
    return !region_.contains(v) || values_[region_.index_of(v)] > 0.0;
  }

  ActivityField with_scale(double scale) const;

  /// Same sites, value at v taken from this field at map(v). Throws if map leaves the region.
  ActivityField composed(const std::function<Site(Site)>& map) const;

  /// Field on `region` translated by a.
  ActivityField translated(Site a) const;

  friend bool operator==(const ActivityField&, const ActivityField&) = default;

 private:
  LatticeBox region_;
  double scale_;
  std::vector<double> values_;
};

/// i.i.d. draws per site; each site's value depends only on (seed, site).
ActivityField sample_field(const DisorderSpec& spec, const LatticeBox& region, double scale,
                           ReplicaSeed seed);

/// x_v = 1 on inner, unchanged elsewhere.
ActivityField switch_off_inside(const ActivityField& f, const LatticeBox& inner);

/// Only entry v changes.
ActivityField replace_at(const ActivityField& f, Site v, double x);

/// Copy of `outer` with the values on `inner` taken from `inside`.
ActivityField glue_inside(const ActivityField& outer, const ActivityField& inside,
                          const LatticeBox& inner);

struct MomentReport {
  bool finite_2_plus_eps = false;
  bool non_constant = false;
};

/// Closed-form check of E[X^(2+eps)] < infinity and of non-degeneracy.
MomentReport moment_check(const DisorderSpec& spec, double eps);

/// #{even v in inner : x_v = 0} - #{odd v in inner : x_v = 0}. Values must be 0 or 1.
long parity_imbalance(const ActivityField& f, const LatticeBox& inner);

// ---------------------------------------------------------------------------

template <class Rng>
double DisorderSpec::draw(Rng& rng) const {
  switch (family_) {
    case DisorderFamily::Constant:
      return p1_;
    case DisorderFamily::Bernoulli:
      return rng.uniform() < p1_ ? 1.0 : 0.0;
    case DisorderFamily::Uniform:
      return p1_ + (p2_ - p1_) * rng.uniform();
    case DisorderFamily::LogNormal:
      return std::exp(p1_ + p2_ * rng.normal());
    case DisorderFamily::Gamma: {
      // Marsaglia-Tsang; shape < 1 boosted through Gamma(k + 1) * U^(1/k).
      const double k = p1_ < 1.0 ? p1_ + 1.0 : p1_;
      const double d = k - 1.0 / 3.0;
      const double c = 1.0 / std::sqrt(9.0 * d);
      double g = 0.0;
      for (;;) {
        double z, v;
        do {
          z = rng.normal();
          v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
          g = d * v;
          break;
        }
      }
      if (p1_ < 1.0) g *= std::pow(rng.uniform_open(), 1.0 / p1_);
      return g * p2_;
    }
    case DisorderFamily::Pareto:
      return p2_ * std::pow(rng.uniform_open(), -1.0 / p1_);
  }
  return 0.0;
}

}  // namespace hardcore

#endif  // HARDCORE_DISORDER_HPP
