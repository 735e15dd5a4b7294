#include "carbontrace/cef.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "carbontrace/errors.hpp"

namespace carbontrace {

namespace {

constexpr double kConsumptionTolMw = 1e-6;

// Mixing system: e_i * (gen_i + inflow_i) - sum_{j->i} flow_ji * e_j = rhs_i.
// rhs is the locally injected emission rate. Nodes with zero denominator
// are pinned to e = 0 after checking they consume nothing.

struct SweepResult {
  bool acyclic = true;
  std::vector<double> e;
};

SweepResult sweep_solve(const FlowGraph& g, const std::vector<double>& rhs,
                        const FlowGraphLabels& labels) {
  SweepResult r;
  const int n = g.n;
  std::vector<double> denom(n);
  std::vector<double> numer = rhs;
  std::vector<int> indeg(n, 0);
  for (int e = 0; e < g.edge_count(); ++e) ++indeg[g.eto[e]];
  // CSR out-adjacency
  std::vector<int> head(n + 1, 0);
  for (int e = 0; e < g.edge_count(); ++e) ++head[g.efrom[e] + 1];
  for (int i = 0; i < n; ++i) head[i + 1] += head[i];
  std::vector<int> out_edges(g.edge_count());
  {
    std::vector<int> cursor(head.begin(), head.end() - 1);
    for (int e = 0; e < g.edge_count(); ++e) out_edges[cursor[g.efrom[e]]++] = e;
  }
  for (int i = 0; i < n; ++i) denom[i] = g.gen_mw[i];
  for (int e = 0; e < g.edge_count(); ++e) denom[g.eto[e]] += g.eflow[e];

  std::vector<int> queue;
  queue.reserve(n);
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  r.e.assign(n, 0.0);
  std::size_t qi = 0;
  int processed = 0;
  while (qi < queue.size()) {
    const int i = queue[qi++];
    ++processed;
    if (denom[i] > 0.0) {
      r.e[i] = numer[i] / denom[i];
    } else {
      if (g.consumption_mw[i] > kConsumptionTolMw) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "consuming bus %s is unreachable from any generator",
                      labels.label(i).c_str());
        throw ModelingError(buf);
      }
      r.e[i] = 0.0;
    }
    for (int k = head[i]; k < head[i + 1]; ++k) {
      const int e = out_edges[k];
      numer[g.eto[e]] += g.eflow[e] * r.e[i];
      if (--indeg[g.eto[e]] == 0) queue.push_back(g.eto[e]);
    }
  }
  r.acyclic = processed == n;
  return r;
}

std::vector<double> linear_solve(const FlowGraph& g, const std::vector<double>& rhs,
                                 bool dense, const FlowGraphLabels& labels) {
  const int n = g.n;
  std::vector<double> denom(n);
  for (int i = 0; i < n; ++i) denom[i] = g.gen_mw[i];
  for (int e = 0; e < g.edge_count(); ++e) denom[g.eto[e]] += g.eflow[e];
  for (int i = 0; i < n; ++i) {
    if (denom[i] == 0.0 && g.consumption_mw[i] > kConsumptionTolMw) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "consuming bus %s is unreachable from any generator",
                    labels.label(i).c_str());
      throw ModelingError(buf);
    }
  }
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = denom[i] == 0.0 ? 0.0 : rhs[i];

  Eigen::VectorXd x;
  if (dense) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = denom[i] == 0.0 ? 1.0 : denom[i];
    for (int e = 0; e < g.edge_count(); ++e)
      if (denom[g.eto[e]] != 0.0) m(g.eto[e], g.efrom[e]) -= g.eflow[e];
    x = Eigen::PartialPivLU<Eigen::MatrixXd>(m).solve(b);
  } else {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n + g.edge_count());
    for (int i = 0; i < n; ++i)
      trip.emplace_back(i, i, denom[i] == 0.0 ? 1.0 : denom[i]);
    for (int e = 0; e < g.edge_count(); ++e)
      if (denom[g.eto[e]] != 0.0)
        trip.emplace_back(g.eto[e], g.efrom[e], -g.eflow[e]);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success)
      throw NumericalError("singular carbon-intensity system");
    x = lu.solve(b);
  }
  if (!x.allFinite()) throw NumericalError("carbon-intensity solve produced non-finite values");
  return {x.data(), x.data() + n};
}

std::vector<double> solve_mixing(const FlowGraph& g, const std::vector<double>& rhs,
                                 IntensityMethod method, const FlowGraphLabels& labels) {
  switch (method) {
    case IntensityMethod::sweep: {
      auto r = sweep_solve(g, rhs, labels);
      if (!r.acyclic)
        throw NumericalError("flow graph is cyclic: the topological sweep cannot run");
      return std::move(r.e);
    }
    case IntensityMethod::automatic: {
      auto r = sweep_solve(g, rhs, labels);
      if (r.acyclic) return std::move(r.e);
      return linear_solve(g, rhs, /*dense=*/false, labels);
    }
    case IntensityMethod::dense:
      return linear_solve(g, rhs, /*dense=*/true, labels);
    case IntensityMethod::sparse:
      return linear_solve(g, rhs, /*dense=*/false, labels);
  }
  throw NumericalError("unknown intensity method");
}

}  // namespace

bool is_acyclic(const FlowGraph& g) {
  std::vector<int> indeg(g.n, 0);
  for (int e = 0; e < g.edge_count(); ++e) ++indeg[g.eto[e]];
  std::vector<int> queue;
  for (int i = 0; i < g.n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::size_t qi = 0;
  int processed = 0;
  std::vector<std::vector<int>> out(g.n);
  for (int e = 0; e < g.edge_count(); ++e) out[g.efrom[e]].push_back(g.eto[e]);
  while (qi < queue.size()) {
    const int i = queue[qi++];
    ++processed;
    for (int t : out[i])
      if (--indeg[t] == 0) queue.push_back(t);
  }
  return processed == g.n;
}

CarbonSolution solve_intensities(const FlowGraph& g, IntensityMethod method,
                                 const FlowGraphLabels& labels) {
  CarbonSolution sol;
  sol.bus_intensity = solve_mixing(g, g.gen_rate, method, labels);
  sol.edge_intensity.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e)
    sol.edge_intensity[e] = sol.bus_intensity[g.efrom[e]];
  return sol;
}

void allocate_emissions(const FlowGraph& g, CarbonSolution& sol) {
  sol.node_consumption_rate.resize(g.n);
  sol.edge_loss_rate.resize(g.edge_count());
  sol.total_generation_rate = 0.0;
  sol.total_consumption_rate = 0.0;
  sol.total_loss_rate = 0.0;
  for (int i = 0; i < g.n; ++i) {
    sol.node_consumption_rate[i] = g.consumption_mw[i] * sol.bus_intensity[i];
    sol.total_generation_rate += g.gen_rate[i];
    sol.total_consumption_rate += sol.node_consumption_rate[i];
    sol.total_loss_rate += g.attached_loss_mw[i] * sol.bus_intensity[i];
  }
  for (int e = 0; e < g.edge_count(); ++e)
    sol.edge_loss_rate[e] = g.eloss[e] * sol.bus_intensity[g.eattach[e]];
}

std::vector<double> trace_fractions(const FlowGraph& g, int source_node,
                                    double source_mw, IntensityMethod method) {
  std::vector<double> rhs(g.n, 0.0);
  rhs[source_node] = source_mw;
  return solve_mixing(g, rhs, method, {});
}

}  // namespace carbontrace
