#pragma once

#include <string>
#include <vector>

#include "carbontrace/dispatch.hpp"
#include "carbontrace/power_flow.hpp"
#include "carbontrace/types.hpp"

namespace carbontrace {

/// Minimum flow (MW) for a branch to appear as a flow-graph edge.
inline constexpr double kFlowEpsilonMw = 1e-9;

/// Directed graph of one scenario's power transfers: nodes are buses,
/// edges are branches oriented along the flow and weighted with the
/// receiving-end power. Branch losses are attached to the bus that sends
/// them. Node balance gen + inflow = consumption + attached_loss + outflow
/// holds within kBalanceTolMw at every node.
struct FlowGraph {
  int n = 0;
  std::vector<BusKind> kind;
  std::vector<double> gen_mw;            // sum of local generator outputs
  std::vector<double> gen_rate;          // sum of output x intensity, tCO2/h
  std::vector<double> consumption_mw;    // base load + EV
  std::vector<double> attached_loss_mw;  // losses withdrawn at this bus

  std::vector<int> efrom, eto;       // edge endpoints, oriented along flow
  std::vector<double> eflow;         // receiving-end MW, > 0
  std::vector<double> eloss;         // branch loss, >= 0
  std::vector<int> eattach;          // node the edge loss is withdrawn at
  std::vector<int> ebranch;          // originating Network branch index

  int edge_count() const { return static_cast<int>(efrom.size()); }
};

inline constexpr double kBalanceTolMw = 1e-6;

/// Per-bus labels used in diagnostics; falls back to the node index when
/// the graph did not come from a Network.
struct FlowGraphLabels {
  const Network* net = nullptr;
  std::string label(int node) const;
};

/// Orients branches along their final flows, omits branches carrying less
/// than kFlowEpsilonMw, and verifies node balance. Throws NumericalError
/// naming the first out-of-balance bus.
FlowGraph build_flow_graph(const Network& net, const DispatchResult& d,
                           const FlowSolution& flow, const ScenarioSample& s);

/// Balance verification for graphs assembled by other means (aggregation,
/// tests). Throws NumericalError naming the first out-of-balance node.
void verify_balance(const FlowGraph& g, const FlowGraphLabels& labels = {});

}  // namespace carbontrace
