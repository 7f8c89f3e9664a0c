#pragma once

// Run configuration: a JSON tree with one block per concern. Unknown keys,
// wrong types and out-of-range values raise ConfigError naming the dotted key.
// The schema is documented in README.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqc/ehrenfest.hpp"
#include "hqc/grid.hpp"
#include "hqc/hierarchy.hpp"
#include "hqc/maxent.hpp"
#include "hqc/scenario.hpp"

namespace hqc {

struct ScenarioConfig {
  // "paper_example", "uncoupled", "transport" or "custom"
  std::string name = "paper_example";
  double r0 = 1.0;                         // uncoupled
  ClassicalPoint center{1.0, 0.0};         // transport
  double sigma = 1.0;                      // transport
  std::array<std::string, 4> hamiltonian;  // custom: H_0..H_3 in R, P
  std::string marginal, weight, angle;     // custom density
  double fd_step = kDefaultFiniteDifferenceStep;
};

struct GridConfig {
  double R_min = -8.0, R_max = 8.0, P_min = -8.0, P_max = 8.0;
  std::size_t nR = 64, nP = 64;
  PhaseGrid grid() const { return PhaseGrid(R_min, R_max, P_min, P_max, nR, nP); }
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
};

struct EnsembleConfig {
  std::size_t N = 10000;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;  // <= 0: Silverman
};

struct OutputConfig {
  std::string directory;
  std::vector<double> sample_times;  // absolute; empty: default schedule
};

struct TrajectoryConfig {
  ClassicalPoint xi{1.0, 0.0};
  Vec3 bloch{0.0, 0.0, 1.0};
  std::size_t stride = 1;
};

struct MaxentConfig {
  std::vector<PauliVector> first_moments;  // rows (μ0, μ1, μ2, μ3)
  std::size_t random = 0;                  // extra uniformly drawn Bloch-ball states
};

struct EvolutionConfig {
  Discretization disc{Stencil::kCentral2, BracketForm::kConservative};
  bool purity_projection = false;
};

struct RunConfig {
  std::optional<ScenarioConfig> scenario;
  std::optional<GridConfig> grid;
  std::optional<IntegratorConfig> integrator;
  std::optional<EnsembleConfig> ensemble;
  ClosureSpec closure;
  OutputConfig output;
  Fig1Options fig1;
  std::optional<TrajectoryConfig> trajectory;
  std::optional<MaxentConfig> maxent;
  EvolutionConfig evolution;

  // Canonical (key-sorted, compact) JSON of the tree that was parsed, after
  // any seed override. Feeding it back to parse_config gives the same run.
  std::string canonical;
};

// A run manifest is accepted too: its "config" member is parsed.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Replaces ensemble.seed (creating the block's seed entry if the block
// exists) and refreshes `canonical`.
void override_seed(RunConfig& c, std::uint64_t seed);

Scenario build_scenario(const ScenarioConfig& s);

// The blocks a subcommand reads; a missing one raises ConfigError naming it.
void require_blocks(const RunConfig& c, const std::string& subcommand);

// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace hqc
