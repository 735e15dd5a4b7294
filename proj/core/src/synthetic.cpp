#include "carbontrace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "carbontrace/errors.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/rng.hpp"
#include "carbontrace/sampling.hpp"

namespace carbontrace {

namespace {

std::string bus_name(const char* prefix, int a, int b = -1) {
  char buf[32];
  if (b < 0)
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, a);
  else
    std::snprintf(buf, sizeof(buf), "%s%02d_%02d", prefix, a, b);
  return buf;
}

// IEEE-33-style feeder topology: parent of bus i (1-based, bus 1 is the
// feeder head attached to the backbone).
constexpr int kFeederParent[34] = {
    0,  0,  1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12, 13, 14, 15,
    16, 17, 2,  19, 20, 21, 3,  23, 24, 6,  26, 27, 28, 29, 30, 31, 32};

// Mean feeder bus loads in MW (bus 1 carries none), after the usual
// 12.66 kV test-feeder pattern.
constexpr double kFeederLoadMw[34] = {
    0,    0,    0.10, 0.09, 0.12, 0.06, 0.06, 0.20, 0.20, 0.06, 0.06, 0.045,
    0.06, 0.06, 0.12, 0.06, 0.06, 0.06, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09,
    0.42, 0.42, 0.06, 0.06, 0.06, 0.12, 0.20, 0.15, 0.21, 0.06};

// Backbone mean loads, MW; zero entries carry no load (slack bus t01 and
// the wind-farm bus pair t07/t08).
constexpr double kBackboneLoadMw[17] = {0,  0,  22, 18, 25, 20, 16, 0, 0,
                                        24, 21, 19, 23, 17, 20, 18, 22};

double total_res_capacity(const Network& net) {
  double cap = 0.0;
  for (const auto& g : net.generators)
    if (g.kind != GeneratorKind::conventional) cap += g.p_rate;
  return cap;
}

double expected_load_mw(const Network& net) {
  double e = 0.0;
  for (const auto& l : net.loads) e += l.normal.mu;
  for (const auto& ev : net.ev_stations) e += weibull_mean(ev.weibull);
  return e;
}

double expected_res_mw(const Network& net) {
  double e = 0.0;
  for (const auto& g : net.generators) {
    if (g.kind == GeneratorKind::wind && g.turbine && g.wind)
      e += expected_wind_power(*g.wind, *g.turbine);
    else if (g.kind == GeneratorKind::der_pv && g.der_factor)
      e += g.p_rate * beta_mean(*g.der_factor);
  }
  return e;
}

void scale_res_capacity(Network& net, double factor) {
  for (auto& g : net.generators) {
    if (g.kind == GeneratorKind::conventional) continue;
    g.p_rate *= factor;
    if (g.turbine) g.turbine->p_rate = g.p_rate;
  }
}

}  // namespace

double expected_res_share(const Network& net) {
  const double load = expected_load_mw(net);
  return load > 0.0 ? expected_res_mw(net) / load : 0.0;
}

Network scale_to_penetration(const Network& net, double target) {
  if (!(target >= 0.0 && target < 1.0))
    throw ModelingError("penetration target must lie in [0, 1)");
  Network out = net;
  if (target == 0.0) {
    scale_res_capacity(out, 0.0);
    out.penetration_target = 0.0;
    return out;
  }
  const double current = expected_res_mw(net);
  if (current <= 0.0)
    throw ModelingError(
        "cannot scale to a nonzero penetration: network has no RES capacity");
  const double factor = target * expected_load_mw(net) / current;
  scale_res_capacity(out, factor);
  out.penetration_target = target;
  return out;
}

Network build_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_feeders < 1) throw ModelingError("n_feeders must be >= 1");
  if (!(cfg.penetration >= 0.0 && cfg.penetration < 1.0))
    throw ModelingError("penetration must lie in [0, 1)");
  if (!(cfg.der_capacity_fraction >= 0.0 && cfg.der_capacity_fraction < 1.0))
    throw ModelingError("der_capacity_fraction must lie in [0, 1)");
  if (cfg.der_per_feeder < 0 || cfg.der_per_feeder > 32)
    throw ModelingError("der_per_feeder must lie in [0, 32]");

  Network net;
  net.base_mva = 100.0;
  net.penetration_target = cfg.penetration;

  // 16-bus double-ring backbone: ring edges plus skip-2 chords so every
  // sink bus keeps at least two upstream inflows.
  for (int i = 1; i <= 16; ++i) {
    Bus b;
    b.id = bus_name("t", i);
    b.kind = i == 1 ? BusKind::slack : BusKind::transmission;
    net.buses.push_back(b);
  }
  auto add_branch = [&](const std::string& f, const std::string& t, double b,
                        double r) {
    Branch br;
    br.from_bus = f;
    br.to_bus = t;
    br.susceptance = b;
    br.resistance = r;
    net.branches.push_back(br);
  };
  for (int i = 1; i <= 16; ++i) {
    const int j = i % 16 + 1;
    add_branch(bus_name("t", i), bus_name("t", j), 12.0, 0.006);
  }
  for (int i = 1; i <= 16; ++i) {
    const int j = (i + 1) % 16 + 1;
    add_branch(bus_name("t", i), bus_name("t", j), 8.0, 0.009);
  }

  for (int i = 2; i <= 16; ++i) {
    if (kBackboneLoadMw[i] <= 0.0) continue;
    LoadSpec l;
    l.bus = bus_name("t", i);
    l.normal = {kBackboneLoadMw[i], 0.1 * kBackboneLoadMw[i]};
    net.loads.push_back(l);
  }
  for (int i : {9, 10, 11}) {
    EvStationSpec ev;
    ev.bus = bus_name("t", i);
    ev.weibull = {0.3 * kBackboneLoadMw[i], 2.0};
    net.ev_stations.push_back(ev);
  }

  auto conventional = [&](const std::string& id, const std::string& bus,
                          double p_rate, double p_lim, double a_down,
                          double b_down, double a_over, double b_over,
                          double factor) {
    Generator g;
    g.id = id;
    g.bus = bus;
    g.kind = GeneratorKind::conventional;
    g.p_rate = p_rate;
    g.p_lim = p_lim;
    g.cei = MarginalCeiParams{a_down, b_down, a_over, b_over, p_rate, p_lim};
    g.participation_factor = factor;
    net.generators.push_back(g);
  };
  conventional("g1", "t01", 300.0, 400.0, 0.95, 3e-4, 0.62, 8e-4, 1.0);
  conventional("g2", "t02", 150.0, 250.0, 0.55, 4e-4, 0.37, 8e-4, 1.5);
  conventional("g3", "t03", 120.0, 200.0, 0.50, 3e-4, 0.398, 5.5e-4, 1.5);

  auto wind_farm = [&](const std::string& id, const std::string& bus,
                       double p_rate, WeibullParams w) {
    Generator g;
    g.id = id;
    g.bus = bus;
    g.kind = GeneratorKind::wind;
    g.p_rate = p_rate;
    g.p_lim = p_rate;
    g.fixed_intensity = 0.0;
    g.turbine = WindTurbineParams{p_rate, 3.0, 12.0, 25.0};
    g.wind = w;
    net.generators.push_back(g);
  };
  wind_farm("wf06", "t06", 180.0, {8.0, 2.0});
  wind_farm("wf08", "t08", 180.0, {7.5, 2.2});

  // Feeders attach round-robin to the non-slack backbone buses t02..t16;
  // the slack bus carries the balancing unit only.
  for (int f = 1; f <= cfg.n_feeders; ++f) {
    const std::string attach = bus_name("t", 2 + (f - 1) % 15);
    for (int i = 1; i <= 33; ++i) {
      Bus b;
      b.id = bus_name("f", f, i);
      b.kind = BusKind::distribution;
      net.buses.push_back(b);
      if (kFeederLoadMw[i] > 0.0) {
        LoadSpec l;
        l.bus = b.id;
        l.normal = {kFeederLoadMw[i], 0.1 * kFeederLoadMw[i]};
        net.loads.push_back(l);
      }
    }
    add_branch(attach, bus_name("f", f, 1), 6.0, 0.02);
    for (int i = 2; i <= 33; ++i)
      add_branch(bus_name("f", f, kFeederParent[i]), bus_name("f", f, i), 4.0, 0.3);

    // PV units at distinct seeded-random non-head buses
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(f));
    std::vector<int> candidates;
    for (int i = 2; i <= 33; ++i) candidates.push_back(i);
    for (int d = 0; d < cfg.der_per_feeder; ++d) {
      const int pick =
          d + static_cast<int>(rng.uniform() * (candidates.size() - d));
      std::swap(candidates[d], candidates[pick]);
      const int bus = candidates[d];
      Generator g;
      g.id = "der_" + bus_name("f", f, bus);
      g.bus = bus_name("f", f, bus);
      g.kind = GeneratorKind::der_pv;
      g.p_rate = cfg.der_capacity_fraction * kFeederLoadMw[bus];
      g.p_lim = g.p_rate;
      g.fixed_intensity = 0.0;
      g.der_factor = BetaParams{2.0, 2.0};
      net.generators.push_back(g);
    }
  }

  resolve_references(net);
  Network scaled = scale_to_penetration(net, cfg.penetration);
  if (total_res_capacity(scaled) > cfg.res_capacity_cap_mw) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "infeasible penetration %.3g: requires %.1f MW of RES "
                  "capacity, cap is %.1f MW",
                  cfg.penetration, total_res_capacity(scaled),
                  cfg.res_capacity_cap_mw);
    throw ModelingError(buf);
  }
  resolve_references(scaled);
  return scaled;
}

Network make_fig3_network() {
  Network net;
  net.base_mva = 100.0;
  net.penetration_target = 0.0;
  for (int i = 1; i <= 9; ++i) {
    Bus b;
    b.id = bus_name("n", i);
    b.kind = i == 1 ? BusKind::slack : BusKind::distribution;
    net.buses.push_back(b);
  }
  for (int i = 1; i <= 8; ++i) {
    Branch br;
    br.from_bus = bus_name("n", i);
    br.to_bus = bus_name("n", i + 1);
    br.susceptance = 4.0;
    br.resistance = 0.05;
    net.branches.push_back(br);
  }
  Generator grid;
  grid.id = "grid";
  grid.bus = "n01";
  grid.kind = GeneratorKind::conventional;
  grid.p_rate = 20.0;
  grid.p_lim = 30.0;
  grid.cei = MarginalCeiParams{0.8, 0.0, 0.8, 0.0, 20.0, 30.0};
  net.generators.push_back(grid);
  for (int i : {3, 5, 8}) {
    Generator g;
    g.id = "der_" + bus_name("n", i);
    g.bus = bus_name("n", i);
    g.kind = GeneratorKind::der_pv;
    g.p_rate = 0.5;
    g.p_lim = 0.5;
    g.der_factor = BetaParams{2.0, 2.0};
    net.generators.push_back(g);
  }
  for (int i = 2; i <= 9; ++i) {
    LoadSpec l;
    l.bus = bus_name("n", i);
    l.normal = {1.0, 0.1};
    net.loads.push_back(l);
  }
  resolve_references(net);
  return net;
}

Network make_two_bus_network(double load_mw, double intensity) {
  Network net;
  net.base_mva = 100.0;
  Bus a;
  a.id = "a";
  a.kind = BusKind::slack;
  Bus b;
  b.id = "b";
  b.kind = BusKind::transmission;
  net.buses = {a, b};
  Branch br;
  br.from_bus = "a";
  br.to_bus = "b";
  br.susceptance = 10.0;
  br.resistance = 0.0;
  net.branches = {br};
  Generator g;
  g.id = "g";
  g.bus = "a";
  g.kind = GeneratorKind::conventional;
  g.p_rate = 2.0 * load_mw + 10.0;
  g.p_lim = 2.0 * load_mw + 10.0;
  g.cei = MarginalCeiParams{intensity, 0.0, intensity, 0.0, g.p_rate, g.p_lim};
  net.generators = {g};
  LoadSpec l;
  l.bus = "b";
  l.normal = {load_mw, 0.0};
  net.loads = {l};
  resolve_references(net);
  return net;
}

}  // namespace carbontrace
