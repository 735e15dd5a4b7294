#include "carbontrace/flow_graph.hpp"

#include <cmath>
#include <cstdio>

#include "carbontrace/errors.hpp"

namespace carbontrace {

std::string FlowGraphLabels::label(int node) const {
  if (net && node >= 0 && node < static_cast<int>(net->buses.size()))
    return net->buses[node].id;
  return "node " + std::to_string(node);
}

FlowGraph build_flow_graph(const Network& net, const DispatchResult& d,
                           const FlowSolution& flow, const ScenarioSample& s) {
  FlowGraph g;
  g.n = static_cast<int>(net.buses.size());
  g.kind.resize(g.n);
  for (int i = 0; i < g.n; ++i) g.kind[i] = net.buses[i].kind;
  g.gen_mw.assign(g.n, 0.0);
  g.gen_rate.assign(g.n, 0.0);
  g.attached_loss_mw.assign(g.n, 0.0);
  g.consumption_mw = consumption_per_bus(net, s);

  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    const int b = net.generators[i].bus_index;
    g.gen_mw[b] += d.output_mw[i];
    g.gen_rate[b] += d.output_mw[i] * d.intensity[i];
  }

  const std::size_t ne = net.branches.size();
  g.efrom.reserve(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    if (flow.loss_mw[e] > 0.0) g.attached_loss_mw[flow.loss_bus[e]] += flow.loss_mw[e];
    const double p = flow.p_recv_mw[e];
    if (std::abs(p) < kFlowEpsilonMw) continue;
    const auto& br = net.branches[e];
    g.efrom.push_back(p > 0.0 ? br.from : br.to);
    g.eto.push_back(p > 0.0 ? br.to : br.from);
    g.eflow.push_back(std::abs(p));
    g.eloss.push_back(flow.loss_mw[e]);
    g.eattach.push_back(flow.loss_bus[e]);
    g.ebranch.push_back(static_cast<int>(e));
  }

  verify_balance(g, FlowGraphLabels{&net});
  return g;
}

void verify_balance(const FlowGraph& g, const FlowGraphLabels& labels) {
  std::vector<double> net_flow(g.n, 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    net_flow[g.efrom[e]] -= g.eflow[e];
    net_flow[g.eto[e]] += g.eflow[e];
  }
  for (int i = 0; i < g.n; ++i) {
    const double imbalance = g.gen_mw[i] + net_flow[i] - g.consumption_mw[i] -
                             g.attached_loss_mw[i];
    const double scale =
        std::max({1.0, g.gen_mw[i], g.consumption_mw[i], std::abs(net_flow[i])});
    if (std::abs(imbalance) > kBalanceTolMw * scale) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "flow graph out of balance at %s: %.3e MW",
                    labels.label(i).c_str(), imbalance);
      throw NumericalError(buf);
    }
  }
}

}  // namespace carbontrace
