#pragma once

#include <vector>

#include "carbontrace/scenario.hpp"
#include "carbontrace/types.hpp"

namespace carbontrace {

struct DispatchResult {
  std::vector<double> output_mw;       // per generator
  std::vector<double> intensity;       // per generator, tCO2/MWh
  std::vector<double> curtailment_mw;  // per generator (RES only)
  double slack_extra_mw = 0.0;  // residual moved to the slack unit by clamping
  double total_load_mw = 0.0;   // base + EV consumption of the sample
  double total_res_mw = 0.0;    // RES production after curtailment
};

/// Available (pre-curtailment) RES output per generator; zero entries for
/// conventional units.
std::vector<double> res_available(const Network& net, const ScenarioSample& s);

/// Closes the generation-consumption gap of one scenario: RES produce
/// from the sample, conventional units share the net load in proportion to
/// their participation factors (clamped to [0, p_lim], residual to the
/// slack unit), and surplus RES is curtailed proportionally. Intensities
/// come from the marginal CEI model (conventional) or the fixed intensity
/// (RES). Throws ModelingError when net load exceeds total conventional
/// capability.
DispatchResult dispatch(const Network& net, const ScenarioSample& s);

/// Per-bus consumption (base load + EV demand) of the sample, MW.
std::vector<double> consumption_per_bus(const Network& net, const ScenarioSample& s);

/// Per-bus net injection (generation minus consumption), MW.
std::vector<double> injections_from(const Network& net, const DispatchResult& d,
                                    const ScenarioSample& s);

}  // namespace carbontrace
