#pragma once

#include <cstdint>

#include "carbontrace/types.hpp"

namespace carbontrace {

struct SyntheticConfig {
  int n_feeders = 30;
  int der_per_feeder = 1;
  double der_capacity_fraction = 0.2;  // of the local bus mean load
  double penetration = 0.4;            // expected RES energy share, [0, 1)
  std::uint64_t seed = 1;
  double res_capacity_cap_mw = 5000.0;  // scaling beyond this is infeasible
};

/// Test system following the case-study layout: a 16-bus meshed
/// transmission backbone (slack coal unit at t01, gas units at t02/t03,
/// wind farms at t06/t08, EV stations at t09-t11) with n_feeders radial
/// 33-bus distribution feeders attached round-robin to the non-slack
/// backbone buses, and der_per_feeder PV units placed at seeded-random
/// non-head feeder buses. Deterministic in (config, seed).
Network build_synthetic(const SyntheticConfig& cfg);

/// Nine-node radial network with a grid injection at the head and PV units
/// at nodes 3, 5 and 8; decomposes into four virtual buses.
Network make_fig3_network();

/// Minimal two-bus network: slack generator feeding one load over one
/// branch.
Network make_two_bus_network(double load_mw = 100.0, double intensity = 0.8);

/// Expected RES energy production divided by expected load energy, using
/// analytic means (Weibull turbine quadrature, Beta mean, normal mu).
double expected_res_share(const Network& net);

/// Returns a copy with every RES rated capacity scaled by a common factor
/// so that expected_res_share equals target. Throws ModelingError if the
/// network has no RES capacity to scale (unless target is 0) or target is
/// outside [0, 1).
Network scale_to_penetration(const Network& net, double target);

}  // namespace carbontrace
