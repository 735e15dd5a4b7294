#include <doctest.h>

#include <numeric>

#include "carbontrace/dispatch.hpp"
#include "carbontrace/errors.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/sampling.hpp"
#include "carbontrace/synthetic.hpp"
#include "test_helpers.hpp"

using namespace carbontrace;

namespace {

// slack + one extra conventional unit + one wind farm, loads configurable
Network dispatch_testbed(double factor1, double factor2, double p_lim1,
                         double p_lim2) {
  Network net;
  net.base_mva = 100.0;
  for (const char* id : {"s", "x", "w"}) {
    Bus b;
    b.id = id;
    b.kind = BusKind::transmission;
    net.buses.push_back(b);
  }
  net.buses[0].kind = BusKind::slack;
  auto link = [&](const char* f, const char* t) {
    Branch br;
    br.from_bus = f;
    br.to_bus = t;
    br.susceptance = 10.0;
    net.branches.push_back(br);
  };
  link("s", "x");
  link("x", "w");
  Generator g1;
  g1.id = "u1";
  g1.bus = "s";
  g1.kind = GeneratorKind::conventional;
  g1.p_rate = p_lim1;
  g1.p_lim = p_lim1;
  g1.cei = MarginalCeiParams{0.9, 1e-4, 0.9, 1e-4, p_lim1, p_lim1};
  g1.participation_factor = factor1;
  Generator g2 = g1;
  g2.id = "u2";
  g2.bus = "x";
  g2.p_rate = p_lim2;
  g2.p_lim = p_lim2;
  g2.cei = MarginalCeiParams{0.5, 0.0, 0.5, 0.0, p_lim2, p_lim2};
  g2.participation_factor = factor2;
  Generator w;
  w.id = "wf";
  w.bus = "w";
  w.kind = GeneratorKind::wind;
  w.p_rate = 100.0;
  w.p_lim = 100.0;
  w.turbine = WindTurbineParams{100.0, 3.0, 12.0, 25.0};
  w.wind = WeibullParams{8.0, 2.0};
  net.generators = {g1, g2, w};
  LoadSpec l;
  l.bus = "x";
  l.normal = {90.0, 0.0};
  net.loads.push_back(l);
  resolve_references(net);
  return net;
}

ScenarioSample fixed_sample(const Network& net, double wind_speed, double load) {
  ScenarioSample s;
  for (const auto& g : net.generators) {
    if (g.kind == GeneratorKind::wind) s.wind_speeds.push_back(wind_speed);
    if (g.kind == GeneratorKind::der_pv) s.der_factors.push_back(0.5);
  }
  s.base_loads.assign(net.loads.size(), load);
  s.ev_demands.assign(net.ev_stations.size(), 0.0);
  return s;
}

}  // namespace

TEST_CASE("zero RES, single unit serves the whole load") {
  const Network net = make_two_bus_network(100.0, 0.8);
  const ScenarioSample s = expected_scenario(net);
  const DispatchResult d = dispatch(net, s);
  CHECK(d.output_mw[0] == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(d.intensity[0] == doctest::Approx(0.8));
  CHECK(d.total_res_mw == 0.0);
}

TEST_CASE("RES equal to the load: conventional zero, no curtailment") {
  const Network net = dispatch_testbed(1.0, 1.0, 200.0, 200.0);
  // rated output at v >= v_rate: wind = 100 MW; load 90+10=100? load 100 exactly:
  const ScenarioSample s = fixed_sample(net, 15.0, 100.0);
  const DispatchResult d = dispatch(net, s);
  CHECK(d.output_mw[2] == doctest::Approx(100.0));
  CHECK(d.output_mw[0] == doctest::Approx(0.0));
  CHECK(d.output_mw[1] == doctest::Approx(0.0));
  for (double c : d.curtailment_mw) CHECK(c == 0.0);
}

TEST_CASE("proportional split by participation factors") {
  const Network net = dispatch_testbed(2.0, 1.0, 500.0, 500.0);
  const ScenarioSample s = fixed_sample(net, 0.0, 90.0);  // no wind
  const DispatchResult d = dispatch(net, s);
  CHECK(d.output_mw[0] == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(d.output_mw[1] == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(d.slack_extra_mw == doctest::Approx(0.0));
}

TEST_CASE("clamping pushes the residual to the slack unit") {
  const Network net = dispatch_testbed(1.0, 1.0, 500.0, 20.0);
  const ScenarioSample s = fixed_sample(net, 0.0, 90.0);
  const DispatchResult d = dispatch(net, s);
  CHECK(d.output_mw[1] == doctest::Approx(20.0));  // clamped at p_lim
  CHECK(d.output_mw[0] == doctest::Approx(70.0));
  CHECK(d.slack_extra_mw == doctest::Approx(25.0));  // 45 proportional + 25 residual
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    CHECK(d.output_mw[g] >= 0.0);
    CHECK(d.output_mw[g] <= net.generators[g].p_lim + 1e-9);
  }
}

TEST_CASE("negative net load curtails RES proportionally") {
  const Network net = dispatch_testbed(1.0, 1.0, 200.0, 200.0);
  const ScenarioSample s = fixed_sample(net, 15.0, 60.0);  // wind 100 > load 60
  const DispatchResult d = dispatch(net, s);
  CHECK(d.output_mw[2] == doctest::Approx(60.0));
  CHECK(d.curtailment_mw[2] == doctest::Approx(40.0));
  CHECK(d.output_mw[0] == 0.0);
  CHECK(d.output_mw[1] == 0.0);
  CHECK(d.total_res_mw == doctest::Approx(60.0));
}

TEST_CASE("infeasible net load raises ModelingError") {
  const Network net = dispatch_testbed(1.0, 1.0, 30.0, 20.0);
  const ScenarioSample s = fixed_sample(net, 0.0, 90.0);  // 90 > 50 capability
  CHECK_THROWS_AS(dispatch(net, s), ModelingError);
}

TEST_CASE("curtailment and conventional output are mutually exclusive") {
  const Network net = dispatch_testbed(1.0, 1.0, 300.0, 300.0);
  RngStream rng(77, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const ScenarioSample s =
        fixed_sample(net, 30.0 * rng.uniform(), 150.0 * rng.uniform());
    const DispatchResult d = dispatch(net, s);
    const double curtailed =
        std::accumulate(d.curtailment_mw.begin(), d.curtailment_mw.end(), 0.0);
    const double conventional = d.output_mw[0] + d.output_mw[1];
    if (curtailed > 1e-9) CHECK(conventional == doctest::Approx(0.0));
    const double res = d.total_res_mw;
    CHECK(res + conventional == doctest::Approx(d.total_load_mw).epsilon(1e-9));
  }
}

TEST_CASE("intensities come from the marginal model at the dispatched point") {
  const Network net = dispatch_testbed(1.0, 1.0, 500.0, 500.0);
  const ScenarioSample s = fixed_sample(net, 0.0, 90.0);
  const DispatchResult d = dispatch(net, s);
  CHECK(d.intensity[0] ==
        doctest::Approx(marginal_cei(d.output_mw[0], *net.generators[0].cei)));
  CHECK(d.intensity[2] == 0.0);  // wind fixed intensity
}
