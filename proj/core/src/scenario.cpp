#include "carbontrace/scenario.hpp"

#include <algorithm>

#include "carbontrace/rng.hpp"
#include "carbontrace/sampling.hpp"

namespace carbontrace {

ScenarioSample sample_scenario(const Network& net, std::int64_t idx,
                               std::uint64_t seed) {
  ScenarioSample s;
  s.index = idx;
  RngStream rng(seed, static_cast<std::uint64_t>(idx));
  for (const auto& g : net.generators) {
    if (g.kind == GeneratorKind::wind)
      s.wind_speeds.push_back(weibull_sample(*g.wind, rng));
    else if (g.kind == GeneratorKind::der_pv)
      s.der_factors.push_back(beta_sample(*g.der_factor, rng));
  }
  for (const auto& l : net.loads)
    s.base_loads.push_back(base_load_sample(l.normal, rng));
  for (const auto& ev : net.ev_stations)
    s.ev_demands.push_back(ev_demand_sample(ev.weibull, rng));
  return s;
}

ScenarioSample expected_scenario(const Network& net) {
  ScenarioSample s;
  s.index = -1;
  for (const auto& g : net.generators) {
    if (g.kind == GeneratorKind::wind) {
      const auto& t = *g.turbine;
      double speed = 0.0;
      if (t.p_rate > 0.0) {
        const double frac =
            std::clamp(expected_wind_power(*g.wind, t) / t.p_rate, 0.0, 1.0);
        speed = t.v_in + frac * (t.v_rate - t.v_in);
      }
      s.wind_speeds.push_back(speed);
    } else if (g.kind == GeneratorKind::der_pv) {
      s.der_factors.push_back(beta_mean(*g.der_factor));
    }
  }
  for (const auto& l : net.loads) s.base_loads.push_back(l.normal.mu);
  for (const auto& ev : net.ev_stations)
    s.ev_demands.push_back(weibull_mean(ev.weibull));
  return s;
}

}  // namespace carbontrace
