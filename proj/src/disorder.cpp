#include "hardcore/disorder.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hardcore/rng.hpp"

namespace hardcore {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("DisorderSpec: " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::invalid_argument("DisorderSpec: cannot parse number '" + s + "'");
  }
  return v;
}

// Shortest text that reads back to the same double.
std::string fmt_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

DisorderSpec DisorderSpec::constant(double c) {
  require(finite_nonneg(c), "constant value must be finite and >= 0");
  return {DisorderFamily::Constant, c, 0.0};
}

DisorderSpec DisorderSpec::bernoulli(double p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "bernoulli p must lie in [0,1]");
  return {DisorderFamily::Bernoulli, p, 0.0};
}

DisorderSpec DisorderSpec::uniform(double a, double b) {
  require(finite_nonneg(a) && std::isfinite(b) && a < b, "uniform needs 0 <= a < b");
  return {DisorderFamily::Uniform, a, b};
}

DisorderSpec DisorderSpec::lognormal(double m, double s) {
  require(std::isfinite(m) && std::isfinite(s) && s > 0.0, "lognormal needs finite m and s > 0");
  return {DisorderFamily::LogNormal, m, s};
}

DisorderSpec DisorderSpec::gamma(double k, double t) {
  require(std::isfinite(k) && std::isfinite(t) && k > 0.0 && t > 0.0,
          "gamma needs shape > 0 and scale > 0");
  return {DisorderFamily::Gamma, k, t};
}

DisorderSpec DisorderSpec::pareto(double alpha, double x_min) {
  require(std::isfinite(alpha) && std::isfinite(x_min) && alpha > 0.0 && x_min > 0.0,
          "pareto needs alpha > 0 and x_min > 0");
  return {DisorderFamily::Pareto, alpha, x_min};
}

DisorderSpec DisorderSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("DisorderSpec: expected family:params, got '" + text + "'");
  }
  const std::string family = text.substr(0, colon);
  std::vector<double> params;
  std::stringstream rest(text.substr(colon + 1));
  for (std::string item; std::getline(rest, item, ',');) params.push_back(parse_number(item));

  auto expect = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument("DisorderSpec: '" + family + "' takes " + std::to_string(n) +
                                  " parameter(s)");
    }
  };
  if (family == "constant") { expect(1); return constant(params[0]); }
  if (family == "bernoulli") { expect(1); return bernoulli(params[0]); }
  if (family == "uniform") { expect(2); return uniform(params[0], params[1]); }
  if (family == "lognormal") { expect(2); return lognormal(params[0], params[1]); }
  if (family == "gamma") { expect(2); return gamma(params[0], params[1]); }
  if (family == "pareto") { expect(2); return pareto(params[0], params[1]); }
  throw std::invalid_argument("DisorderSpec: unknown family '" + family + "'");
}

std::string DisorderSpec::to_string() const {
  switch (family_) {
    case DisorderFamily::Constant: return "constant:" + fmt_number(p1_);
    case DisorderFamily::Bernoulli: return "bernoulli:" + fmt_number(p1_);
    case DisorderFamily::Uniform: return "uniform:" + fmt_number(p1_) + "," + fmt_number(p2_);
    case DisorderFamily::LogNormal:
      return "lognormal:" + fmt_number(p1_) + "," + fmt_number(p2_);
    case DisorderFamily::Gamma: return "gamma:" + fmt_number(p1_) + "," + fmt_number(p2_);
    case DisorderFamily::Pareto: return "pareto:" + fmt_number(p1_) + "," + fmt_number(p2_);
  }
  return "?";
}

ActivityField::ActivityField(LatticeBox region, double scale, double fill)
    : ActivityField(region, scale, std::vector<double>(region.size(), fill)) {}

ActivityField::ActivityField(LatticeBox region, double scale, std::vector<double> values)
    : region_(region), scale_(scale), values_(std::move(values)) {
  if (!(std::isfinite(scale) && scale >= 0.0)) {
    throw std::invalid_argument("ActivityField: scale must be finite and >= 0");
  }
  if (values_.size() != region_.size()) {
    throw std::invalid_argument("ActivityField: value count does not match region");
  }
  for (double v : values_) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      throw std::invalid_argument("ActivityField: values must be finite and >= 0");
    }
  }
}

double ActivityField::value(Site v) const {
  if (!region_.contains(v)) {
    throw std::out_of_range("ActivityField: site " + hardcore::to_string(v) + " outside region");
  }
  return values_[region_.index_of(v)];
}

ActivityField ActivityField::with_scale(double scale) const {
  return {region_, scale, values_};
}

ActivityField ActivityField::composed(const std::function<Site(Site)>& map) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Site target = map(region_.site_at(i));
    if (!region_.contains(target)) {
      throw std::invalid_argument("ActivityField::composed: map leaves the region");
    }
    out[i] = values_[region_.index_of(target)];
  }
  return {region_, scale_, std::move(out)};
}

ActivityField ActivityField::translated(Site a) const {
  return {region_.translated(a), scale_, values_};
}

ActivityField sample_field(const DisorderSpec& spec, const LatticeBox& region, double scale,
                           ReplicaSeed seed) {
  if (!(std::isfinite(scale) && scale >= 0.0)) {
    throw std::invalid_argument("sample_field: scale must be finite and >= 0");
  }
  std::vector<double> values;
  values.reserve(region.size());
  for (const auto& v : region.sites()) {
    CounterRng rng(hash_key({seed.master_seed, seed.replica_index,
                             static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)),
                             static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.y))}));
    values.push_back(spec.draw(rng));
  }
  return {region, scale, std::move(values)};
}

ActivityField switch_off_inside(const ActivityField& f, const LatticeBox& inner) {
  if (!f.region().contains(inner)) {
    throw std::invalid_argument("switch_off_inside: inner box not inside field region");
  }
  auto values = f.values();
  for (const auto& v : inner.sites()) values[f.region().index_of(v)] = 1.0;
  return {f.region(), f.scale(), std::move(values)};
}

ActivityField replace_at(const ActivityField& f, Site v, double x) {
  if (!f.region().contains(v)) {
    throw std::invalid_argument("replace_at: site " + to_string(v) + " outside region");
  }
  if (!(std::isfinite(x) && x >= 0.0)) {
    throw std::invalid_argument("replace_at: value must be finite and >= 0");
  }
  auto values = f.values();
  values[f.region().index_of(v)] = x;
  return {f.region(), f.scale(), std::move(values)};
}

ActivityField glue_inside(const ActivityField& outer, const ActivityField& inside,
                          const LatticeBox& inner) {
  if (!outer.region().contains(inner) || !inside.region().contains(inner)) {
    throw std::invalid_argument("glue_inside: inner box not covered by both fields");
  }
  auto values = outer.values();
  for (const auto& v : inner.sites()) values[outer.region().index_of(v)] = inside.value(v);
  return {outer.region(), outer.scale(), std::move(values)};
}

MomentReport moment_check(const DisorderSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("moment_check: eps must be > 0");
  MomentReport r;
  switch (spec.family()) {
    case DisorderFamily::Constant:
      r = {true, false};
      break;
    case DisorderFamily::Bernoulli:
      r = {true, spec.p1() > 0.0 && spec.p1() < 1.0};
      break;
    case DisorderFamily::Uniform:
    case DisorderFamily::LogNormal:
    case DisorderFamily::Gamma:
      r = {true, true};
      break;
    case DisorderFamily::Pareto:
      // E[X^q] < infinity iff q < alpha.
      r = {2.0 + eps < spec.p1(), true};
      break;
  }
  return r;
}

long parity_imbalance(const ActivityField& f, const LatticeBox& inner) {
  if (!f.region().contains(inner)) {
    throw std::invalid_argument("parity_imbalance: inner box not inside field region");
  }
  long n = 0;
  for (const auto& v : inner.sites()) {
    const double x = f.value(v);
    if (x != 0.0 && x != 1.0) {
      throw std::invalid_argument("parity_imbalance: field values must be 0 or 1");
    }
    if (x == 0.0) n += parity(v) == Parity::Even ? 1 : -1;
  }
  return n;
}

}  // namespace hardcore
