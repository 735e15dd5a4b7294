#pragma once

#include <cstdint>
#include <vector>

#include "carbontrace/cef.hpp"
#include "carbontrace/flow_graph.hpp"

namespace carbontrace {

/// Partition of a flow graph into virtual buses: maximal downstream runs
/// that provably share one carbon intensity. Every block is a directed
/// subtree rooted at its start node; only the start may carry local
/// injection or more than one inflow.
struct VirtualBusPartition {
  int n_nodes = 0;
  int n_blocks = 0;
  std::vector<int> block_of;               // node -> block
  std::vector<std::vector<int>> members;   // block -> nodes, start first
  std::vector<int> start_node;             // block -> start node
  std::vector<std::uint8_t> is_start;      // per node
  std::uint64_t signature = 0;             // hash of the edge orientations built for

  // per original branch index: the sending node seen at build time (-1 if
  // the branch carried no flow), and the list of branches that were
  // block-internal
  std::vector<int> built_from;
  std::vector<int> internal_branches;
};

struct Decomposition {
  VirtualBusPartition partition;
  FlowGraph aggregated;  // virtual buses as nodes, inter-block branches kept
};

/// Start nodes of the partition: local injection, two or more inflows,
/// no inflow at all, or a distribution bus fed straight from a
/// transmission bus (the feeder metering boundary).
std::vector<int> find_start_buses(const FlowGraph& g);

/// Splits the graph at its start buses and aggregates each block into one
/// node. Aggregated totals (generation, consumption, attached losses)
/// equal the originals. Throws ModelingError if a node cannot be walked
/// back to a start (cyclic chain of single-inflow nodes).
Decomposition decompose(const FlowGraph& g);

/// Contracts a scenario's flow graph over an existing partition. The
/// caller is responsible for checking partition_valid_for first.
FlowGraph aggregate(const FlowGraph& g, const VirtualBusPartition& p);

/// True when the partition is still exact for this scenario's flow graph:
/// no non-start node gained an injection or a new inflow, every internal
/// edge kept its orientation, and every inter-block edge enters a start.
bool partition_valid_for(const VirtualBusPartition& p, const FlowGraph& g);

/// Orientation-signature of a flow graph (matches
/// VirtualBusPartition::signature when directions are unchanged).
std::uint64_t flow_signature(const FlowGraph& g);

/// Maps an aggregated solution back onto the original buses: every member
/// inherits its block's intensity, rates are re-derived from original
/// consumptions and losses. Throws ModelingError when the partition is
/// stale for `full`.
CarbonSolution expand_solution(const CarbonSolution& aggregated,
                               const VirtualBusPartition& p, const FlowGraph& full);

}  // namespace carbontrace
