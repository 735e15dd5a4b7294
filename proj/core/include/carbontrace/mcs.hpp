#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "carbontrace/cef.hpp"
#include "carbontrace/scenario.hpp"
#include "carbontrace/stats.hpp"
#include "carbontrace/virtual_bus.hpp"

namespace carbontrace {

enum class RunMode { full, virtual_bus };

struct RunConfig {
  std::uint64_t seed = 42;
  std::int64_t samples = 1000;
  RunMode mode = RunMode::full;
  IntensityMethod solver = IntensityMethod::automatic;
  std::vector<double> penetrations;  // empty: run the network as-is
  int workers = 0;                   // 0: hardware concurrency
  bool skip_failures = false;        // count failing scenarios instead of aborting
  int bins = 100;
  std::int64_t pilot_samples = 1000;  // scenarios used to fix histogram ranges
};

struct ComponentInfo {
  enum class Kind { load, ev_station, generator, losses, total };
  Kind kind;
  std::string id;   // "load:<bus>", "ev:<bus>", "gen:<id>", "losses", "total"
  int element = -1; // index into the owning Network collection
};

/// Tracked components in output order: loads, EV stations, generators,
/// the aggregate losses component, and the system total.
std::vector<ComponentInfo> component_registry(const Network& net);

/// Everything computed for one scenario. `carbon` always refers to the
/// full-topology graph (virtual mode expands before returning).
struct ScenarioSolution {
  DispatchResult dispatch;
  FlowGraph graph;
  CarbonSolution carbon;
  bool fallback = false;  // virtual mode fell back to the full solve
};

/// Immutable per-run pipeline: cached susceptance factorization and, in
/// virtual mode, the reference-scenario partition. Safe to share across
/// threads.
class ScenarioEngine {
 public:
  ScenarioEngine(const Network& net, RunMode mode,
                 IntensityMethod solver = IntensityMethod::automatic);

  ScenarioSolution solve_scenario(const ScenarioSample& s) const;

  /// Registry-aligned emission rates (tCO2/h) of one scenario.
  std::vector<double> component_rates(const ScenarioSolution& sol,
                                      const ScenarioSample& s) const;

  const Network& network() const { return *net_; }
  RunMode mode() const { return mode_; }
  /// Node count the intensity solver works on (buses, or virtual buses).
  int solve_node_count() const;
  const VirtualBusPartition* partition() const {
    return partition_ ? &partition_->partition : nullptr;
  }

 private:
  const Network* net_;
  RunMode mode_;
  IntensityMethod solver_;
  std::shared_ptr<const DcSolver> dc_;
  std::shared_ptr<const Decomposition> partition_;  // virtual mode only
};

struct LevelResult {
  double penetration = -1.0;  // -1: network ran as-is
  std::vector<StatsAccumulator> stats;  // one per registry component
  double wall_seconds = 0.0;            // scenario loop (pilot + main pass)
  double prep_seconds = 0.0;            // factorization + reference partition
  std::int64_t samples = 0;
  std::int64_t failures = 0;
  std::int64_t fallbacks = 0;
  int nodes_solved = 0;

  double mean_total(const std::vector<ComponentInfo>& components) const;
};

struct ResultSet {
  std::vector<ComponentInfo> components;
  std::vector<LevelResult> levels;
};

/// Runs the Monte Carlo study: per penetration level, a pilot pass fixes
/// per-component histogram ranges at [0, 1.05 x pilot max], then all
/// scenarios are evaluated and folded into the accumulators in scenario
/// index order. Identical (config, network) give bit-identical statistics
/// for any worker count. Scenario errors abort with the failing index
/// unless skip_failures is set.
ResultSet run_mcs(const RunConfig& cfg, const Network& net);

}  // namespace carbontrace
