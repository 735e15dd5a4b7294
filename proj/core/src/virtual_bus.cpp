#include "carbontrace/virtual_bus.hpp"

#include <algorithm>
#include <cstdio>

#include "carbontrace/errors.hpp"

namespace carbontrace {

namespace {

std::vector<std::uint8_t> start_mask(const FlowGraph& g) {
  std::vector<int> indeg(g.n, 0);
  std::vector<std::uint8_t> boundary(g.n, 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    ++indeg[g.eto[e]];
    if (g.kind[g.eto[e]] == BusKind::distribution &&
        g.kind[g.efrom[e]] == BusKind::transmission)
      boundary[g.eto[e]] = 1;
  }
  std::vector<std::uint8_t> mask(g.n, 0);
  for (int i = 0; i < g.n; ++i)
    mask[i] = g.gen_mw[i] > 0.0 || indeg[i] != 1 || boundary[i];
  return mask;
}

}  // namespace

std::vector<int> find_start_buses(const FlowGraph& g) {
  const auto mask = start_mask(g);
  std::vector<int> out;
  for (int i = 0; i < g.n; ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

std::uint64_t flow_signature(const FlowGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  for (int e = 0; e < g.edge_count(); ++e) {
    mix(static_cast<std::uint64_t>(g.ebranch[e]) + 1);
    mix(static_cast<std::uint64_t>(g.efrom[e]) * 2654435761u + 17);
  }
  return h;
}

Decomposition decompose(const FlowGraph& g) {
  Decomposition d;
  auto& p = d.partition;
  p.n_nodes = g.n;
  p.is_start = start_mask(g);

  // unique inflow parent of every non-start node
  std::vector<int> parent(g.n, -1);
  for (int e = 0; e < g.edge_count(); ++e)
    if (!p.is_start[g.eto[e]]) parent[g.eto[e]] = g.efrom[e];

  p.block_of.assign(g.n, -1);
  p.n_blocks = 0;
  for (int i = 0; i < g.n; ++i) {
    if (p.is_start[i]) {
      p.block_of[i] = p.n_blocks++;
      p.start_node.push_back(i);
    }
  }
  std::vector<int> chain;
  for (int i = 0; i < g.n; ++i) {
    if (p.block_of[i] >= 0) continue;
    chain.clear();
    int cur = i;
    while (p.block_of[cur] < 0) {
      chain.push_back(cur);
      if (static_cast<int>(chain.size()) > g.n) break;
      cur = parent[cur];
    }
    if (p.block_of[cur] < 0) {
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "node %d has no upstream start bus (cyclic inflow chain)", i);
      throw ModelingError(buf);
    }
    for (int node : chain) p.block_of[node] = p.block_of[cur];
  }

  p.members.resize(p.n_blocks);
  for (int b = 0; b < p.n_blocks; ++b) p.members[b].push_back(p.start_node[b]);
  for (int i = 0; i < g.n; ++i)
    if (!p.is_start[i]) p.members[p.block_of[i]].push_back(i);

  int max_branch = -1;
  for (int e = 0; e < g.edge_count(); ++e) max_branch = std::max(max_branch, g.ebranch[e]);
  p.built_from.assign(max_branch + 1, -1);
  for (int e = 0; e < g.edge_count(); ++e) {
    p.built_from[g.ebranch[e]] = g.efrom[e];
    if (p.block_of[g.efrom[e]] == p.block_of[g.eto[e]])
      p.internal_branches.push_back(g.ebranch[e]);
  }
  p.signature = flow_signature(g);
  d.aggregated = aggregate(g, p);
  return d;
}

FlowGraph aggregate(const FlowGraph& g, const VirtualBusPartition& p) {
  FlowGraph a;
  a.n = p.n_blocks;
  a.kind.resize(a.n);
  a.gen_mw.assign(a.n, 0.0);
  a.gen_rate.assign(a.n, 0.0);
  a.consumption_mw.assign(a.n, 0.0);
  a.attached_loss_mw.assign(a.n, 0.0);
  for (int b = 0; b < p.n_blocks; ++b) a.kind[b] = g.kind[p.start_node[b]];
  for (int i = 0; i < g.n; ++i) {
    const int b = p.block_of[i];
    a.gen_mw[b] += g.gen_mw[i];
    a.gen_rate[b] += g.gen_rate[i];
    a.consumption_mw[b] += g.consumption_mw[i];
    a.attached_loss_mw[b] += g.attached_loss_mw[i];
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const int bf = p.block_of[g.efrom[e]], bt = p.block_of[g.eto[e]];
    if (bf == bt) continue;
    a.efrom.push_back(bf);
    a.eto.push_back(bt);
    a.eflow.push_back(g.eflow[e]);
    a.eloss.push_back(g.eloss[e]);
    a.eattach.push_back(p.block_of[g.eattach[e]]);
    a.ebranch.push_back(g.ebranch[e]);
  }
  return a;
}

bool partition_valid_for(const VirtualBusPartition& p, const FlowGraph& g) {
  if (g.n != p.n_nodes) return false;
  for (int i = 0; i < g.n; ++i)
    if (!p.is_start[i] && g.gen_mw[i] > kFlowEpsilonMw) return false;

  std::vector<std::uint8_t> seen(p.built_from.size(), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    const int a = g.efrom[e], b = g.eto[e];
    const int br = g.ebranch[e];
    if (p.block_of[a] == p.block_of[b]) {
      if (br >= static_cast<int>(p.built_from.size()) || p.built_from[br] != a)
        return false;  // internal edge flipped or newly appeared
      seen[br] = 1;
    } else {
      if (!p.is_start[b]) return false;  // inter-block edge entering a member
    }
  }
  for (int br : p.internal_branches)
    if (!seen[br]) return false;  // a member lost its supply path
  return true;
}

CarbonSolution expand_solution(const CarbonSolution& aggregated,
                               const VirtualBusPartition& p, const FlowGraph& full) {
  if (!partition_valid_for(p, full))
    throw ModelingError(
        "stale virtual-bus partition: flow directions changed since decomposition");

  CarbonSolution sol;
  sol.bus_intensity.resize(full.n);
  for (int i = 0; i < full.n; ++i)
    sol.bus_intensity[i] = aggregated.bus_intensity[p.block_of[i]];
  sol.edge_intensity.resize(full.edge_count());
  for (int e = 0; e < full.edge_count(); ++e)
    sol.edge_intensity[e] = sol.bus_intensity[full.efrom[e]];
  allocate_emissions(full, sol);
  return sol;
}

}  // namespace carbontrace
