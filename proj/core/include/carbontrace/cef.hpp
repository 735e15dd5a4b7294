#pragma once

#include <vector>

#include "carbontrace/flow_graph.hpp"

namespace carbontrace {

enum class IntensityMethod {
  automatic,  // topological sweep when the flow graph is acyclic, else sparse
  sweep,      // topological sweep only (fails on cycles)
  dense,      // dense LU on the node matrix
  sparse,     // sparse LU on the node matrix
};

struct CarbonSolution {
  std::vector<double> bus_intensity;   // e_i per node, tCO2/MWh
  std::vector<double> edge_intensity;  // per flow-graph edge, = e at the sender
  // filled by allocate_emissions:
  std::vector<double> node_consumption_rate;  // consumption x e_i, tCO2/h
  std::vector<double> edge_loss_rate;         // loss x e at the attachment, tCO2/h
  double total_generation_rate = 0.0;
  double total_consumption_rate = 0.0;
  double total_loss_rate = 0.0;
};

/// Bus intensities by the inflow-weighted mixing rule: each bus averages
/// its local generation emissions with its inflows, every inflow carrying
/// the sending bus's intensity. Buses with neither inflow nor generation
/// get intensity 0 and must not consume (ModelingError otherwise).
CarbonSolution solve_intensities(const FlowGraph& g,
                                 IntensityMethod method = IntensityMethod::automatic,
                                 const FlowGraphLabels& labels = {});

/// Fills the emission-rate fields: consumption rate per node, loss rate
/// per edge, and the generation/consumption/loss totals.
void allocate_emissions(const FlowGraph& g, CarbonSolution& sol);

/// Fraction of each node's power originating from injections at
/// `source_node` carrying `source_mw` of its generation: re-solves the
/// mixing system with that injection's intensity set to 1 and everything
/// else to 0.
std::vector<double> trace_fractions(const FlowGraph& g, int source_node,
                                    double source_mw,
                                    IntensityMethod method = IntensityMethod::automatic);

/// True if the directed flow graph has no cycles.
bool is_acyclic(const FlowGraph& g);

}  // namespace carbontrace
