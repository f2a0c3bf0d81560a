#include "hardcore/mcmc.hpp"

#include <stdexcept>

namespace hardcore {

std::vector<Site> Configuration::sites() const {
  std::vector<Site> out;
  for (std::size_t i = 0; i < occupied_.size(); ++i) {
    if (occupied_[i]) out.push_back(box_.site_at(i));
  }
  return out;
}

std::size_t Configuration::count(Parity p) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < occupied_.size(); ++i) {
    if (occupied_[i] && parity(box_.site_at(i)) == p) ++n;
  }
  return n;
}

bool sandwiched(const Configuration& lower, const Configuration& upper) {
  if (!(lower.box() == upper.box())) return false;
  const auto n = lower.box().size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool lo = lower.occupied_at(i);
    const bool up = upper.occupied_at(i);
    if (parity(lower.box().site_at(i)) == Parity::Even ? (lo && !up) : (up && !lo)) {
      return false;
    }
  }
  return true;
}

HeatBathKernel::HeatBathKernel(const LatticeBox& box, const ActivityField& f,
                               const BoundaryCondition& bc)
    : box_(box), p_occupy_(box.size(), 0.0), nbr_(box.size()) {
  if (!f.region().contains(box)) {
    throw std::invalid_argument("HeatBathKernel: box not inside field region");
  }
  std::vector<bool> blocked(box.size(), false);
  for (const auto& u : bc.occupied_frame(box, [&f](Site v) { return f.present(v); })) {
    for (const auto& v : neighbours(u)) {
      if (box.contains(v)) blocked[box.index_of(v)] = true;
    }
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site v = box.site_at(i);
    const double a = f.activity(v);
    p_occupy_[i] = blocked[i] ? 0.0 : a / (1.0 + a);
    const auto nb = neighbours(v);
    for (std::size_t k = 0; k < 4; ++k) {
      nbr_[i][k] = box.contains(nb[k]) ? static_cast<int>(box.index_of(nb[k])) : -1;
    }
  }
}

Configuration HeatBathKernel::top() const {
  Configuration c(box_);
  for (std::size_t i = 0; i < box_.size(); ++i) {
    c.set_at(i, parity(box_.site_at(i)) == Parity::Even && p_occupy_[i] > 0.0);
  }
  return c;
}

Configuration HeatBathKernel::bottom() const {
  Configuration c(box_);
  for (std::size_t i = 0; i < box_.size(); ++i) {
    c.set_at(i, parity(box_.site_at(i)) == Parity::Odd && p_occupy_[i] > 0.0);
  }
  return c;
}

bool HeatBathKernel::neighbours_empty(const Configuration& c, std::size_t i) const noexcept {
  for (int k : nbr_[i]) {
    if (k >= 0 && c.occupied_at(static_cast<std::size_t>(k))) return false;
  }
  return true;
}

bool HeatBathKernel::admissible(const Configuration& c) const {
  if (!(c.box() == box_)) return false;
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (!c.occupied_at(i)) continue;
    if (p_occupy_[i] <= 0.0 || !neighbours_empty(c, i)) return false;
  }
  return true;
}

void HeatBathKernel::update(Configuration& c, std::size_t i, double u) const noexcept {
  c.set_at(i, u < p_occupy_[i] && neighbours_empty(c, i));
}

void HeatBathKernel::sweep(Configuration& c, CounterRng& rng) const {
  for (std::size_t i = 0; i < box_.size(); ++i) update(c, i, rng.uniform());
}

void HeatBathKernel::coupled_sweep(MonotonePair& p, CounterRng& rng) const {
  for (std::size_t i = 0; i < box_.size(); ++i) {
    const double u = rng.uniform();
    update(p.lower, i, u);
    update(p.upper, i, u);
  }
  if (!sandwiched(p.lower, p.upper)) {
    throw std::logic_error("monotone coupling broke the sandwich order");
  }
}

Configuration heat_bath_sweep(const Configuration& c, const ActivityField& f,
                              const BoundaryCondition& bc, CounterRng& rng) {
  HeatBathKernel kernel(c.box(), f, bc);
  Configuration next = c;
  kernel.sweep(next, rng);
  return next;
}

MonotonePair monotone_pair_sweep(const MonotonePair& p, const ActivityField& f,
                                 const BoundaryCondition& bc, CounterRng& shared_rng) {
  if (!sandwiched(p.lower, p.upper)) {
    throw std::invalid_argument("monotone_pair_sweep: pair is not ordered");
  }
  HeatBathKernel kernel(p.lower.box(), f, bc);
  MonotonePair next = p;
  kernel.coupled_sweep(next, shared_rng);
  return next;
}

CftpResult cftp_sample(const HeatBathKernel& kernel, ReplicaSeed seed, CftpOptions opts) {
  if (kernel.box().height() > kMaxBoxSide) {
    throw std::invalid_argument("cftp_sample: box too tall");
  }
  CftpResult result;
  for (std::uint64_t back = 1;; back *= 2) {
    ++result.epochs;
    result.sweeps = back;
    MonotonePair pair{kernel.bottom(), kernel.top()};
    for (std::uint64_t t = back; t >= 1; --t) {
      CounterRng rng(hash_key({seed.master_seed, seed.replica_index, t}));
      kernel.coupled_sweep(pair, rng);
    }
    if (pair.lower == pair.upper) {
      result.sample = std::move(pair.lower);
      return result;
    }
    if (back >= opts.max_sweeps) return result;
  }
}

CftpResult cftp_sample(const LatticeBox& box, const ActivityField& f,
                       const BoundaryCondition& bc, ReplicaSeed seed, CftpOptions opts) {
  return cftp_sample(HeatBathKernel(box, f, bc), seed, opts);
}

}  // namespace hardcore
