#include "carbontrace/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "carbontrace/errors.hpp"
#include "carbontrace/sampling.hpp"

namespace carbontrace {

std::vector<double> res_available(const Network& net, const ScenarioSample& s) {
  std::vector<double> out(net.generators.size(), 0.0);
  int wi = 0, di = 0;
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const auto& gen = net.generators[g];
    if (gen.kind == GeneratorKind::wind)
      out[g] = wind_power(s.wind_speeds.at(wi++), *gen.turbine);
    else if (gen.kind == GeneratorKind::der_pv)
      out[g] = gen.p_rate * s.der_factors.at(di++);
  }
  return out;
}

DispatchResult dispatch(const Network& net, const ScenarioSample& s) {
  const std::size_t ng = net.generators.size();
  DispatchResult d;
  d.output_mw.assign(ng, 0.0);
  d.intensity.assign(ng, 0.0);
  d.curtailment_mw.assign(ng, 0.0);

  const double total_load =
      std::accumulate(s.base_loads.begin(), s.base_loads.end(), 0.0) +
      std::accumulate(s.ev_demands.begin(), s.ev_demands.end(), 0.0);
  d.total_load_mw = total_load;

  auto avail = res_available(net, s);
  double total_res = std::accumulate(avail.begin(), avail.end(), 0.0);

  double net_load = total_load - total_res;
  if (net_load < 0.0) {
    // surplus: curtail every RES unit by the same fraction
    const double keep = total_load / total_res;
    for (std::size_t g = 0; g < ng; ++g) {
      if (net.generators[g].kind == GeneratorKind::conventional) continue;
      d.curtailment_mw[g] = avail[g] * (1.0 - keep);
      avail[g] *= keep;
    }
    total_res = total_load;
    net_load = 0.0;
  }
  d.total_res_mw = total_res;

  for (std::size_t g = 0; g < ng; ++g)
    if (net.generators[g].kind != GeneratorKind::conventional)
      d.output_mw[g] = avail[g];

  double factor_sum = 0.0;
  for (const auto& g : net.generators)
    if (g.kind == GeneratorKind::conventional) factor_sum += g.participation_factor;

  const int slack = net.slack_generator();
  double assigned = 0.0;
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    if (gen.kind != GeneratorKind::conventional) continue;
    const double share =
        factor_sum > 0.0 ? net_load * gen.participation_factor / factor_sum : 0.0;
    d.output_mw[g] = std::clamp(share, 0.0, gen.p_lim);
    assigned += d.output_mw[g];
  }
  const double residual = net_load - assigned;
  if (std::abs(residual) > 1e-12 * std::max(1.0, net_load)) {
    d.slack_extra_mw = residual;
    d.output_mw[slack] += residual;
    if (d.output_mw[slack] < -1e-9 || d.output_mw[slack] > net.generators[slack].p_lim + 1e-9) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "infeasible dispatch: net load %.3f MW outside conventional "
                    "capability (slack at %.3f of %.3f MW)",
                    net_load, d.output_mw[slack], net.generators[slack].p_lim);
      throw ModelingError(buf);
    }
    d.output_mw[slack] = std::clamp(d.output_mw[slack], 0.0, net.generators[slack].p_lim);
  }

  for (std::size_t g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    d.intensity[g] = gen.kind == GeneratorKind::conventional
                         ? marginal_cei(d.output_mw[g], *gen.cei)
                         : gen.fixed_intensity;
  }
  return d;
}

std::vector<double> consumption_per_bus(const Network& net, const ScenarioSample& s) {
  std::vector<double> c(net.buses.size(), 0.0);
  for (std::size_t i = 0; i < net.loads.size(); ++i)
    c[net.loads[i].bus_index] += s.base_loads[i];
  for (std::size_t i = 0; i < net.ev_stations.size(); ++i)
    c[net.ev_stations[i].bus_index] += s.ev_demands[i];
  return c;
}

std::vector<double> injections_from(const Network& net, const DispatchResult& d,
                                    const ScenarioSample& s) {
  std::vector<double> inj = consumption_per_bus(net, s);
  for (auto& v : inj) v = -v;
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    inj[net.generators[g].bus_index] += d.output_mw[g];
  return inj;
}

}  // namespace carbontrace
