#ifndef HARDCORE_ORACLE_HPP
#define HARDCORE_ORACLE_HPP

// Brute-force ground truth for tiny boxes: subset enumeration with exact
// rational arithmetic, or 50-digit binary floating point when some activity is
// not a ratio of 64-bit integers. Shares no code with the transfer engine.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "hardcore/disorder.hpp"
#include "hardcore/errors.hpp"
#include "hardcore/lattice.hpp"

namespace hardcore::oracle {

using Rational = boost::multiprecision::cpp_rational;
using Extended = boost::multiprecision::cpp_bin_float_50;

inline constexpr std::size_t kMaxOracleSites = 20;

enum class WeightMode { Rational, Extended };

struct ExactWeight {
  WeightMode mode = WeightMode::Rational;
  Rational rational;  // valid in Rational mode
  Extended extended;  // valid in both modes

  double to_double() const { return static_cast<double>(extended); }
  double log() const;
};

/// Every independent subset of the box that avoids deleted sites (x_v = 0) and
/// the neighbours of occupied frame sites, each exactly once, in increasing
/// order of their lexicographic bit encoding. Throws CapacityError above 20 sites.
std::vector<std::vector<Site>> enumerate_independent_sets(const LatticeBox& box,
                                                          const ActivityField& f,
                                                          const BoundaryCondition& bc);

/// Same, with every site present (no deletions).
std::vector<std::vector<Site>> enumerate_independent_sets(const LatticeBox& box,
                                                          const BoundaryCondition& bc);

/// Rational when every lambda * x_v is a ratio of 64-bit integers.
WeightMode weight_mode(const LatticeBox& box, const ActivityField& f);

ExactWeight oracle_partition(const LatticeBox& box, const ActivityField& f,
                             const BoundaryCondition& bc);

inline double oracle_log_partition(const LatticeBox& box, const ActivityField& f,
                                   const BoundaryCondition& bc) {
  return oracle_partition(box, f, bc).log();
}

ExactWeight oracle_occupation(const LatticeBox& box, const ActivityField& f,
                              const BoundaryCondition& bc, Site v);

struct WeightedSet {
  std::vector<Site> sites;
  double probability = 0.0;
};

/// Full normalised distribution over admissible independent sets.
std::vector<WeightedSet> oracle_distribution(const LatticeBox& box, const ActivityField& f,
                                             const BoundaryCondition& bc);

/// Number of independent sets of the rows x cols grid graph, by a row-by-row
/// recursion over explicit occupancy rows (independent of subset enumeration).
std::uint64_t count_grid_independent_sets(int rows, int cols);

}  // namespace hardcore::oracle

#endif  // HARDCORE_ORACLE_HPP
