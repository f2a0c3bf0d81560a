#include "hardcore/oracle.hpp"

#include <limits>
#include <map>
#include <set>

namespace hardcore::oracle {

namespace {

using boost::multiprecision::cpp_int;

struct Enumerated {
  std::vector<Site> sites;                // lexicographic order of box
  std::vector<std::uint32_t> independent;  // bit i <-> sites[i]
};

Enumerated enumerate(const LatticeBox& box, const std::set<Site>& deleted,
                     const std::vector<Site>& frame) {
  if (box.size() > kMaxOracleSites) {
    throw CapacityError("oracle: box " + to_string(box) + " has more than " +
                        std::to_string(kMaxOracleSites) + " sites");
  }
  Enumerated out;
  out.sites = box.sites();
  const std::size_t n = out.sites.size();

  std::uint32_t forbidden = 0;
  const std::set<Site> frame_set(frame.begin(), frame.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Site v = out.sites[i];
    bool blocked = deleted.count(v) > 0;
    for (const auto& u : neighbours(v)) blocked = blocked || frame_set.count(u) > 0;
    if (blocked) forbidden |= std::uint32_t{1} << i;
  }
  // Pairs of box sites at L1 distance one.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      if (adjacent(out.sites[i], out.sites[k])) edges.emplace_back(i, k);
    }
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t s = 0; s < total; ++s) {
    const auto subset = static_cast<std::uint32_t>(s);
    if (subset & forbidden) continue;
    bool ok = true;
    for (const auto& [i, k] : edges) {
      if (((subset >> i) & 1U) && ((subset >> k) & 1U)) {
        ok = false;
        break;
      }
    }
    if (ok) out.independent.push_back(subset);
  }
  return out;
}

std::set<Site> deleted_sites(const LatticeBox& box, const ActivityField& f) {
  std::set<Site> out;
  for (const auto& v : box.sites()) {
    if (f.value(v) == 0.0 || f.scale() == 0.0) out.insert(v);
  }
  return out;
}

Enumerated enumerate_for(const LatticeBox& box, const ActivityField& f,
                         const BoundaryCondition& bc) {
  if (!f.region().contains(box)) {
    throw std::invalid_argument("oracle: box not inside field region");
  }
  // Frame sites deleted by the field are never occupied by even/odd frames.
  return enumerate(box, deleted_sites(box, f),
                   bc.occupied_frame(box, [&f](Site v) { return f.present(v); }));
}

std::vector<std::vector<Site>> to_site_sets(const Enumerated& e) {
  std::vector<std::vector<Site>> out;
  out.reserve(e.independent.size());
  for (auto subset : e.independent) {
    std::vector<Site> set;
    for (std::size_t i = 0; i < e.sites.size(); ++i) {
      if ((subset >> i) & 1U) set.push_back(e.sites[i]);
    }
    out.push_back(std::move(set));
  }
  return out;
}

bool fits_int64(const Rational& r) {
  const cpp_int limit = std::numeric_limits<std::int64_t>::max();
  const cpp_int num = boost::multiprecision::numerator(r);
  const cpp_int den = boost::multiprecision::denominator(r);
  return abs(num) <= limit && den <= limit;
}

Rational exact_activity(const ActivityField& f, Site v) {
  return Rational(f.scale()) * Rational(f.value(v));
}

Extended to_extended(const Rational& r) {
  return Extended(boost::multiprecision::numerator(r)) /
         Extended(boost::multiprecision::denominator(r));
}

// Per-site activities in both representations, and the sum over sets (restricted
// to sets containing `must_contain` when it is set).
struct Weights {
  WeightMode mode;
  std::vector<Rational> rational;
  std::vector<Extended> extended;
};

Weights site_weights(const LatticeBox& box, const ActivityField& f) {
  Weights w{weight_mode(box, f), {}, {}};
  for (const auto& v : box.sites()) {
    const Rational r = exact_activity(f, v);
    w.extended.push_back(Extended(f.scale()) * Extended(f.value(v)));
    w.rational.push_back(w.mode == WeightMode::Rational ? r : Rational(0));
  }
  return w;
}

ExactWeight set_weight(const Weights& w, std::uint32_t subset) {
  ExactWeight out;
  out.mode = w.mode;
  out.rational = 1;
  out.extended = 1;
  for (std::size_t i = 0; subset != 0; ++i, subset >>= 1) {
    if (subset & 1U) {
      if (w.mode == WeightMode::Rational) out.rational *= w.rational[i];
      out.extended *= w.extended[i];
    }
  }
  return out;
}

void accumulate(ExactWeight& acc, const ExactWeight& term) {
  acc.rational += term.rational;
  acc.extended += term.extended;
}

ExactWeight zero_weight(WeightMode mode) {
  ExactWeight z;
  z.mode = mode;
  z.rational = 0;
  z.extended = 0;
  return z;
}

}  // namespace

double ExactWeight::log() const {
  if (mode == WeightMode::Rational) {
    return static_cast<double>(boost::multiprecision::log(to_extended(rational)));
  }
  return static_cast<double>(boost::multiprecision::log(extended));
}

std::vector<std::vector<Site>> enumerate_independent_sets(const LatticeBox& box,
                                                          const ActivityField& f,
                                                          const BoundaryCondition& bc) {
  return to_site_sets(enumerate_for(box, f, bc));
}

std::vector<std::vector<Site>> enumerate_independent_sets(const LatticeBox& box,
                                                          const BoundaryCondition& bc) {
  return to_site_sets(enumerate(box, {}, bc.occupied_frame(box)));
}

WeightMode weight_mode(const LatticeBox& box, const ActivityField& f) {
  for (const auto& v : box.sites()) {
    if (!fits_int64(exact_activity(f, v))) return WeightMode::Extended;
  }
  return WeightMode::Rational;
}

ExactWeight oracle_partition(const LatticeBox& box, const ActivityField& f,
                             const BoundaryCondition& bc) {
  const auto e = enumerate_for(box, f, bc);
  const auto w = site_weights(box, f);
  auto z = zero_weight(w.mode);
  for (auto subset : e.independent) accumulate(z, set_weight(w, subset));
  if (w.mode == WeightMode::Rational) z.extended = to_extended(z.rational);
  return z;
}

ExactWeight oracle_occupation(const LatticeBox& box, const ActivityField& f,
                              const BoundaryCondition& bc, Site v) {
  if (!box.contains(v)) throw std::invalid_argument("oracle_occupation: site outside box");
  const auto e = enumerate_for(box, f, bc);
  const auto w = site_weights(box, f);
  const auto bit = std::uint32_t{1} << box.index_of(v);
  auto z = zero_weight(w.mode);
  auto with_v = zero_weight(w.mode);
  for (auto subset : e.independent) {
    const auto term = set_weight(w, subset);
    accumulate(z, term);
    if (subset & bit) accumulate(with_v, term);
  }
  ExactWeight p;
  p.mode = w.mode;
  if (w.mode == WeightMode::Rational) {
    p.rational = with_v.rational / z.rational;
    p.extended = to_extended(p.rational);
  } else {
    p.extended = with_v.extended / z.extended;
  }
  return p;
}

std::vector<WeightedSet> oracle_distribution(const LatticeBox& box, const ActivityField& f,
                                             const BoundaryCondition& bc) {
  const auto e = enumerate_for(box, f, bc);
  const auto w = site_weights(box, f);
  std::vector<Extended> weights;
  Extended z = 0;
  for (auto subset : e.independent) {
    weights.push_back(set_weight(w, subset).extended);
    z += weights.back();
  }
  const auto sets = to_site_sets(e);
  std::vector<WeightedSet> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out.push_back({sets[i], static_cast<double>(weights[i] / z)});
  }
  return out;
}

std::uint64_t count_grid_independent_sets(int rows, int cols) {
  if (rows < 1 || cols < 1) return 1;
  // All rows of length `cols` with no two horizontally adjacent occupied cells.
  std::vector<std::vector<bool>> patterns;
  std::vector<bool> current(cols, false);
  auto extend = [&](auto&& self, int pos) -> void {
    if (pos == cols) {
      patterns.push_back(current);
      return;
    }
    current[pos] = false;
    self(self, pos + 1);
    if (pos == 0 || !current[pos - 1]) {
      current[pos] = true;
      self(self, pos + 1);
      current[pos] = false;
    }
  };
  extend(extend, 0);

  auto compatible = [&](const std::vector<bool>& a, const std::vector<bool>& b) {
    for (int c = 0; c < cols; ++c) {
      if (a[c] && b[c]) return false;
    }
    return true;
  };
  std::vector<std::uint64_t> ways(patterns.size(), 1);
  for (int r = 1; r < rows; ++r) {
    std::vector<std::uint64_t> next(patterns.size(), 0);
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      for (std::size_t k = 0; k < patterns.size(); ++k) {
        if (compatible(patterns[i], patterns[k])) next[i] += ways[k];
      }
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

}  // namespace hardcore::oracle
