#ifndef HARDCORE_MCMC_HPP
#define HARDCORE_MCMC_HPP

// Single-site heat-bath dynamics for the hard-core model and monotone
// coupling from the past. Configurations are ordered by
//   I <= I'  iff  I cap even  is a subset of I' cap even  and
//                 I' cap odd  is a subset of I cap odd,
// under which the heat-bath update with a shared uniform is monotone.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hardcore/disorder.hpp"
#include "hardcore/lattice.hpp"
#include "hardcore/rng.hpp"

namespace hardcore {

class Configuration {
 public:
  explicit Configuration(LatticeBox box) : box_(box), occupied_(box.size(), 0) {}

  const LatticeBox& box() const noexcept { return box_; }
  bool occupied(Site v) const { return occupied_.at(box_.index_of(v)) != 0; }
  bool occupied_at(std::size_t i) const noexcept { return occupied_[i] != 0; }
  void set_at(std::size_t i, bool on) noexcept { occupied_[i] = on ? 1 : 0; }

  std::vector<Site> sites() const;
  std::size_t count(Parity p) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  LatticeBox box_;
  std::vector<std::uint8_t> occupied_;
};

struct MonotonePair {
  Configuration lower;
  Configuration upper;
};

/// lower <= upper in the even-up / odd-down order.
bool sandwiched(const Configuration& lower, const Configuration& upper);

/// Heat-bath kernel for one (box, field, boundary condition). Sites are updated
/// in lexicographic order, one uniform per site per sweep.
class HeatBathKernel {
 public:
  HeatBathKernel(const LatticeBox& box, const ActivityField& f, const BoundaryCondition& bc);

  const LatticeBox& box() const noexcept { return box_; }

  Configuration empty() const { return Configuration(box_); }
  /// Every admissible even site occupied: the maximum of the order.
  Configuration top() const;
  /// Every admissible odd site occupied: the minimum of the order.
  Configuration bottom() const;

  /// Independent, avoids deleted sites and sites next to the occupied frame.
  bool admissible(const Configuration& c) const;

  void sweep(Configuration& c, CounterRng& rng) const;

  /// Both chains consume the same uniform at every site. Throws std::logic_error
  /// if the order is ever broken.
  void coupled_sweep(MonotonePair& p, CounterRng& rng) const;

 private:
  bool neighbours_empty(const Configuration& c, std::size_t i) const noexcept;
  void update(Configuration& c, std::size_t i, double u) const noexcept;

  LatticeBox box_;
  std::vector<double> p_occupy_;             // lambda x / (1 + lambda x); 0 when blocked
  std::vector<std::array<int, 4>> nbr_;      // in-box neighbour indices, -1 if none
};

Configuration heat_bath_sweep(const Configuration& c, const ActivityField& f,
                              const BoundaryCondition& bc, CounterRng& rng);

MonotonePair monotone_pair_sweep(const MonotonePair& p, const ActivityField& f,
                                 const BoundaryCondition& bc, CounterRng& shared_rng);

struct CftpOptions {
  std::uint64_t max_sweeps = std::uint64_t{1} << 20;
};

struct CftpResult {
  /// Empty when the chains had not coalesced within max_sweeps.
  std::optional<Configuration> sample;
  int epochs = 0;
  std::uint64_t sweeps = 0;  // how far back the final epoch started
};

/// Monotone coupling from the past with epoch doubling. The uniforms of the
/// sweep at time -t are keyed by (seed, t), so every epoch reuses them.
CftpResult cftp_sample(const LatticeBox& box, const ActivityField& f,
                       const BoundaryCondition& bc, ReplicaSeed seed, CftpOptions opts = {});

CftpResult cftp_sample(const HeatBathKernel& kernel, ReplicaSeed seed, CftpOptions opts = {});

}  // namespace hardcore

#endif  // HARDCORE_MCMC_HPP
