#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace carbontrace {

// Units used throughout: power in MW, carbon intensity in tCO2/MWh
// (numerically equal to kgCO2/kWh), emission rates in tCO2/h; branch
// impedances per-unit on the network's base_mva.

enum class BusKind { transmission, distribution, slack };

enum class GeneratorKind { conventional, wind, der_pv };

struct NormalParams {
  double mu = 0.0;     // MW
  double sigma = 0.0;  // MW
};

struct WeibullParams {
  double lambda = 1.0;  // scale, same unit as the sampled quantity
  double k = 1.0;       // shape
};

struct BetaParams {
  double alpha = 2.0;
  double beta = 2.0;
};

struct WindTurbineParams {
  double p_rate = 0.0;  // MW, copied from the owning generator
  double v_in = 3.0;    // m/s
  double v_rate = 12.0;
  double v_out = 25.0;
};

/// Piecewise-linear marginal carbon intensity of a conventional unit:
/// below the design point the intensity falls as a_down - b_down*P,
/// above it rises as a_over + b_over*P.
struct MarginalCeiParams {
  double a_down = 0.0;  // tCO2/MWh
  double b_down = 0.0;  // tCO2/MWh per MW
  double a_over = 0.0;
  double b_over = 0.0;
  double p_rate = 0.0;  // design-optimal output, MW
  double p_lim = 0.0;   // maximum output, MW
};

struct Bus {
  std::string id;
  BusKind kind = BusKind::distribution;
  int base_load_ref = -1;   // index into Network::loads, -1 if none
  int ev_station_ref = -1;  // index into Network::ev_stations, -1 if none
};

struct Branch {
  std::string from_bus;
  std::string to_bus;
  double susceptance = 0.0;  // per-unit, > 0
  double resistance = 0.0;   // per-unit, >= 0
  std::optional<double> rating;  // MW
  int from = -1;  // resolved bus indices
  int to = -1;
};

struct Generator {
  std::string id;
  std::string bus;
  GeneratorKind kind = GeneratorKind::conventional;
  double p_rate = 0.0;  // rated output, MW
  double p_lim = 0.0;   // maximum output, MW (conventional only)
  std::optional<MarginalCeiParams> cei;       // conventional only
  double fixed_intensity = 0.0;               // tCO2/MWh (wind / der_pv)
  std::optional<WindTurbineParams> turbine;   // wind only
  std::optional<WeibullParams> wind;          // wind-speed distribution, wind only
  std::optional<BetaParams> der_factor;       // der_pv only
  double participation_factor = 1.0;          // conventional only
  int bus_index = -1;
};

struct LoadSpec {
  std::string bus;
  NormalParams normal;
  int bus_index = -1;
};

struct EvStationSpec {
  std::string bus;
  WeibullParams weibull;
  int bus_index = -1;
};

struct Network {
  double base_mva = 100.0;
  double penetration_target = 0.0;  // fraction in [0,1)
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<LoadSpec> loads;
  std::vector<EvStationSpec> ev_stations;

  std::unordered_map<std::string, int> bus_index;

  int index_of_bus(const std::string& id) const {
    auto it = bus_index.find(id);
    return it == bus_index.end() ? -1 : it->second;
  }
  int slack_bus() const {
    for (int i = 0; i < static_cast<int>(buses.size()); ++i)
      if (buses[i].kind == BusKind::slack) return i;
    return -1;
  }
  /// Conventional generator absorbing the dispatch residual and losses:
  /// the first conventional unit at the slack bus.
  int slack_generator() const {
    const int sb = slack_bus();
    for (int g = 0; g < static_cast<int>(generators.size()); ++g)
      if (generators[g].kind == GeneratorKind::conventional &&
          generators[g].bus_index == sb)
        return g;
    return -1;
  }
};

}  // namespace carbontrace
