#include "carbontrace/power_flow.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "carbontrace/errors.hpp"
#include "carbontrace/sampling.hpp"

namespace carbontrace {

struct DcSolver::Impl {
  const Network* net;
  int n = 0;
  int slack = -1;
  std::vector<int> reduced_index;  // bus -> row in the reduced system, -1 for slack
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;

  explicit Impl(const Network& network) : net(&network) {
    n = static_cast<int>(network.buses.size());
    slack = network.slack_bus();
    if (slack < 0) throw ModelingError("dc power flow requires a slack bus");
    reduced_index.assign(n, -1);
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (i != slack) reduced_index[i] = r++;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * network.branches.size());
    for (const auto& br : network.branches) {
      const int a = reduced_index[br.from], b = reduced_index[br.to];
      const double y = br.susceptance;
      if (a >= 0) trip.emplace_back(a, a, y);
      if (b >= 0) trip.emplace_back(b, b, y);
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -y);
        trip.emplace_back(b, a, -y);
      }
    }
    Eigen::SparseMatrix<double> B(n - 1, n - 1);
    B.setFromTriplets(trip.begin(), trip.end());
    factor.compute(B);
    if (factor.info() != Eigen::Success)
      throw NumericalError(
          "singular susceptance system (is the network connected?)");
  }

  std::vector<double> solve(std::span<const double> injections_mw) const {
    Eigen::VectorXd rhs(n - 1);
    for (int i = 0; i < n; ++i)
      if (i != slack) rhs[reduced_index[i]] = injections_mw[i] / net->base_mva;
    Eigen::VectorXd theta = factor.solve(rhs);
    if (factor.info() != Eigen::Success)
      throw NumericalError("dc power flow solve failed");
    std::vector<double> flows(net->branches.size());
    for (std::size_t e = 0; e < net->branches.size(); ++e) {
      const auto& br = net->branches[e];
      const double tf = br.from == slack ? 0.0 : theta[reduced_index[br.from]];
      const double tt = br.to == slack ? 0.0 : theta[reduced_index[br.to]];
      flows[e] = br.susceptance * (tf - tt) * net->base_mva;
    }
    return flows;
  }
};

DcSolver::DcSolver(const Network& net) : impl_(std::make_unique<Impl>(net)) {}
DcSolver::~DcSolver() = default;
DcSolver::DcSolver(DcSolver&&) noexcept = default;
DcSolver& DcSolver::operator=(DcSolver&&) noexcept = default;

std::vector<double> DcSolver::solve_flows(std::span<const double> injections_mw) const {
  return impl_->solve(injections_mw);
}

int DcSolver::slack_bus() const { return impl_->slack; }

FlowSolution dc_power_flow(const Network& net, std::span<const double> injections_mw) {
  DcSolver solver(net);
  FlowSolution f;
  f.p_send_mw = solver.solve_flows(injections_mw);
  f.p_recv_mw = f.p_send_mw;
  f.loss_mw.assign(net.branches.size(), 0.0);
  f.loss_bus.assign(net.branches.size(), -1);
  f.injection_mw.assign(injections_mw.begin(), injections_mw.end());
  double sum = 0.0;
  for (double v : f.injection_mw) sum += v;
  f.slack_residual_mw = -sum;
  return f;
}

FlowSolution estimate_losses(const FlowSolution& lossless, const Network& net,
                             const DcSolver& solver, DispatchResult& d,
                             const ScenarioSample& s) {
  FlowSolution f;
  const std::size_t ne = net.branches.size();
  f.loss_mw.assign(ne, 0.0);
  f.loss_bus.assign(ne, -1);

  double total_loss = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& br = net.branches[e];
    const double p = lossless.p_send_mw[e];
    f.loss_mw[e] = br.resistance * (p / net.base_mva) * (p / net.base_mva) * net.base_mva;
    f.loss_bus[e] = p >= 0.0 ? br.from : br.to;
    total_loss += f.loss_mw[e];
  }
  f.total_loss_mw = total_loss;

  // make-up generation at the slack unit; its intensity tracks the new output
  const int sg = net.slack_generator();
  d.output_mw[sg] += total_loss;
  if (d.output_mw[sg] > net.generators[sg].p_lim) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "infeasible dispatch: slack unit at %.3f MW of %.3f MW "
                  "after loss make-up",
                  d.output_mw[sg], net.generators[sg].p_lim);
    throw ModelingError(buf);
  }
  d.intensity[sg] = marginal_cei(d.output_mw[sg], *net.generators[sg].cei);

  f.injection_mw = injections_from(net, d, s);
  for (std::size_t e = 0; e < ne; ++e) f.injection_mw[f.loss_bus[e]] -= f.loss_mw[e];

  f.p_recv_mw = solver.solve_flows(f.injection_mw);
  f.p_send_mw.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const double sign = f.p_recv_mw[e] >= 0.0 ? 1.0 : -1.0;
    f.p_send_mw[e] = f.p_recv_mw[e] + sign * f.loss_mw[e];
  }
  double sum = 0.0;
  for (double v : f.injection_mw) sum += v;
  f.slack_residual_mw = -sum;
  return f;
}

FlowSolution solve_with_losses(const Network& net, const DcSolver& solver,
                               DispatchResult& d, const ScenarioSample& s) {
  const auto inj = injections_from(net, d, s);
  FlowSolution lossless;
  lossless.p_send_mw = solver.solve_flows(inj);
  lossless.p_recv_mw = lossless.p_send_mw;
  lossless.injection_mw = inj;
  lossless.loss_mw.assign(net.branches.size(), 0.0);
  lossless.loss_bus.assign(net.branches.size(), -1);
  return estimate_losses(lossless, net, solver, d, s);
}

}  // namespace carbontrace
