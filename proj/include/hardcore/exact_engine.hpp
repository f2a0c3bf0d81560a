#ifndef HARDCORE_EXACT_ENGINE_HPP
#define HARDCORE_EXACT_ENGINE_HPP

// Exact partition functions, marginals and samples of the hard-core model on a
// box, by a column transfer matrix over vertically independent bitmasks.
//
// Columns run along x; a column state is a mask of the box height whose bit r
// marks site (x, y_min + r) occupied. Transfer vectors are renormalised per
// column and the log of each scale factor is accumulated, so log Z is exact up
// to double rounding for any box size that fits the state-space cap.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hardcore/disorder.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/lattice.hpp"

namespace hardcore {

/// Largest box height the transfer matrix accepts.
inline constexpr int kMaxTransferHeight = 24;

struct LogPartitionResult {
  double log_z = 0.0;
  /// Set when no configuration has positive weight. The empty configuration is
  /// always admissible, so this indicates an internal error.
  bool is_zero = false;
};

/// Vertically independent masks of a given height, ascending. Built once per
/// height and shared read-only.
struct MaskTable {
  int height = 0;
  std::vector<std::uint32_t> masks;
};
std::shared_ptr<const MaskTable> mask_table(int height);

struct MarginalTable {
  LatticeBox box;
  /// Occupation probabilities in lexicographic site order of box.
  std::vector<double> p;

  double at(Site v) const { return p.at(box.index_of(v)); }
};

/// Natural log of the sum over admissible independent sets of prod (lambda x_v).
/// Requires box inside f.region(); throws CapacityError when box height exceeds the cap.
LogPartitionResult log_partition(const LatticeBox& box, const ActivityField& f,
                                 const BoundaryCondition& bc);

double occupation_probability(const LatticeBox& box, const ActivityField& f,
                              const BoundaryCondition& bc, Site v);

/// Every single-site marginal from one forward and one backward pass.
MarginalTable marginals(const LatticeBox& box, const ActivityField& f,
                        const BoundaryCondition& bc);

/// log < x^{I cap inner} > on box_L, computed as log Z(f) - log Z(f switched off on inner).
double log_local_expectation(const LatticeBox& box_L, const LatticeBox& inner,
                             const ActivityField& f, const BoundaryCondition& bc);

/// exp(log_local_expectation(...)).
double local_expectation(const LatticeBox& box_L, const LatticeBox& inner,
                         const ActivityField& f, const BoundaryCondition& bc);

/// Exact draw from the hard-core measure by sequential column sampling.
/// Returns the occupied sites in lexicographic order.
std::vector<Site> sample_exact(const LatticeBox& box, const ActivityField& f,
                               const BoundaryCondition& bc, ReplicaSeed seed);

/// Reusable sampler: one forward pass, then any number of draws.
class ExactSampler {
 public:
  ExactSampler(const LatticeBox& box, const ActivityField& f, const BoundaryCondition& bc);
  ~ExactSampler();
  ExactSampler(ExactSampler&&) noexcept;
  ExactSampler& operator=(ExactSampler&&) noexcept;

  std::vector<Site> draw(ReplicaSeed seed) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hardcore

#endif  // HARDCORE_EXACT_ENGINE_HPP
