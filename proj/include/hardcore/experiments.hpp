#ifndef HARDCORE_EXPERIMENTS_HPP
#define HARDCORE_EXPERIMENTS_HPP

// Batch experiments behind the command line tool. Each command turns an
// ExperimentConfig into CSV records; identical configs give identical records
// for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardcore/csv.hpp"
#include "hardcore/disorder.hpp"
#include "hardcore/lattice.hpp"

namespace hardcore {

inline constexpr const char* kToolVersion = "1.0.0";

struct ExperimentConfig {
  std::string command;
  std::optional<std::pair<int, int>> box_size;  // --box WxH
  Site origin{0, 0};
  std::optional<int> j;
  std::optional<int> L;
  double lambda = 1.0;
  BoundaryKind bc = BoundaryKind::Empty;
  std::string field = "constant:1";  // disorder spec sampled for single-field commands
  std::string field_file;
  std::string disorder = "bernoulli:0.5";
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::vector<int> sides{4, 8, 12};
  std::vector<int> j_values{1, 2, 3};
  int L_scale = 2;  // fluctuations: L = L_scale * j + L_offset
  int L_offset = 0;
  std::string method = "exact";  // exact | cftp
  std::string out = "-";
};

/// Box from --box (at origin) or --j (Lambda_j). Throws std::invalid_argument if neither.
LatticeBox config_box(const ExperimentConfig& cfg);

/// Field from --field-file, or --field sampled on `box` with (seed, replica 0).
ActivityField config_field(const ExperimentConfig& cfg, const LatticeBox& box);

std::vector<ExperimentRecord> cmd_logz(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> cmd_occupation(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> cmd_influence(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> cmd_free_energy(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> cmd_fluctuations(const ExperimentConfig& cfg);
std::vector<ExperimentRecord> cmd_sample(const ExperimentConfig& cfg);

/// Dispatch on cfg.command.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

/// Sidecar manifest: full config, tool version and CSV columns.
std::string manifest_json(const ExperimentConfig& cfg);

}  // namespace hardcore

#endif  // HARDCORE_EXPERIMENTS_HPP
