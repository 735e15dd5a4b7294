#pragma once

#include <memory>
#include <span>
#include <vector>

#include "carbontrace/dispatch.hpp"
#include "carbontrace/types.hpp"

namespace carbontrace {

struct FlowSolution {
  // Signed flows oriented from->to per branch. p_send is the power leaving
  // the loss-attachment end, p_recv the power arriving after the branch
  // loss is withdrawn.
  std::vector<double> p_send_mw;
  std::vector<double> p_recv_mw;
  std::vector<double> loss_mw;      // >= 0
  std::vector<int> loss_bus;        // bus the loss is withdrawn at
  std::vector<double> injection_mw; // per-bus net injection of the final pass
  double slack_residual_mw = 0.0;   // imbalance absorbed by the slack angle reference
  double total_loss_mw = 0.0;
};

/// DC power flow on a fixed network. The reduced susceptance factorization
/// is computed once and shared read-only across scenarios.
class DcSolver {
 public:
  explicit DcSolver(const Network& net);
  ~DcSolver();
  DcSolver(DcSolver&&) noexcept;
  DcSolver& operator=(DcSolver&&) noexcept;

  /// Branch flows (MW, signed from->to) for the given per-bus injections.
  /// Injections must sum to ~0; any residual lands on the slack bus.
  std::vector<double> solve_flows(std::span<const double> injections_mw) const;

  int slack_bus() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Lossless DC solution for explicit injections.
FlowSolution dc_power_flow(const Network& net, std::span<const double> injections_mw);

/// Two-pass loss treatment: per-branch quadratic losses from the lossless
/// flows, loss make-up added to the slack unit (its marginal CEI is
/// re-evaluated), losses withdrawn at the sending bus of each branch, and
/// the flow re-solved exactly once.
FlowSolution solve_with_losses(const Network& net, const DcSolver& solver,
                               DispatchResult& d, const ScenarioSample& s);

/// Convenience variant matching the spec operation: fills losses and
/// re-solves, starting from an already computed lossless solution.
FlowSolution estimate_losses(const FlowSolution& lossless, const Network& net,
                             const DcSolver& solver, DispatchResult& d,
                             const ScenarioSample& s);

}  // namespace carbontrace
