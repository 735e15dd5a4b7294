#pragma once

#include <cstdint>
#include <vector>

#include "carbontrace/types.hpp"

namespace carbontrace {

/// One Monte Carlo draw of every stochastic element. Vectors are indexed
/// by the element's position among elements of its kind (wind generators
/// in generator order, DER units in generator order, loads and EV stations
/// in declaration order).
struct ScenarioSample {
  std::int64_t index = 0;
  std::vector<double> wind_speeds;   // m/s, one per wind generator
  std::vector<double> der_factors;   // [0,1], one per der_pv generator
  std::vector<double> base_loads;    // MW, one per LoadSpec
  std::vector<double> ev_demands;    // MW, one per EvStationSpec
};

/// Draws scenario `idx` from stream (seed, idx). Identical arguments give
/// identical samples under any execution order.
ScenarioSample sample_scenario(const Network& net, std::int64_t idx,
                               std::uint64_t seed);

/// Deterministic expected-value scenario: loads at their means, EV demand
/// at the Weibull mean, DER factor at the Beta mean, and wind speed chosen
/// on the ramp so the turbine produces its expected output.
ScenarioSample expected_scenario(const Network& net);

}  // namespace carbontrace
