#include <doctest.h>

#include <cmath>

#include "carbontrace/errors.hpp"
#include "carbontrace/mcs.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/sampling.hpp"
#include "carbontrace/synthetic.hpp"
#include "test_helpers.hpp"

using namespace carbontrace;

namespace {

const Network& small_fixture() {
  static const Network net = [] {
    SyntheticConfig cfg;
    cfg.n_feeders = 3;
    cfg.penetration = 0.3;
    return build_synthetic(cfg);
  }();
  return net;
}

bool stats_identical(const ResultSet& a, const ResultSet& b) {
  if (a.levels.size() != b.levels.size()) return false;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    const auto& sa = a.levels[l].stats;
    const auto& sb = b.levels[l].stats;
    if (sa.size() != sb.size()) return false;
    for (std::size_t c = 0; c < sa.size(); ++c) {
      if (sa[c].count() != sb[c].count()) return false;
      if (sa[c].mean() != sb[c].mean()) return false;
      if (sa[c].variance() != sb[c].variance()) return false;
      if (sa[c].min() != sb[c].min() || sa[c].max() != sb[c].max()) return false;
      for (int bin = 0; bin < sa[c].bin_count(); ++bin)
        if (sa[c].bin_samples(bin) != sb[c].bin_samples(bin)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sample_scenario is deterministic in (seed, index)") {
  const Network& net = small_fixture();
  const ScenarioSample a = sample_scenario(net, 11, 99);
  const ScenarioSample b = sample_scenario(net, 11, 99);
  CHECK(a.base_loads == b.base_loads);
  CHECK(a.wind_speeds == b.wind_speeds);
  CHECK(a.der_factors == b.der_factors);
  CHECK(a.ev_demands == b.ev_demands);
  const ScenarioSample c = sample_scenario(net, 12, 99);
  CHECK(a.base_loads != c.base_loads);
}

TEST_CASE("deterministic models produce a deterministic sample") {
  Network net = make_two_bus_network(100.0);
  const ScenarioSample a = sample_scenario(net, 5, 1);
  CHECK(a.base_loads[0] == 100.0);  // sigma = 0
}

TEST_CASE("empirical wind-speed mean approaches the Weibull mean") {
  // one wind generator, tiny network
  Network net = make_two_bus_network(50.0);
  Generator w;
  w.id = "wf";
  w.bus = "b";
  w.kind = GeneratorKind::wind;
  w.p_rate = 10.0;
  w.p_lim = 10.0;
  w.turbine = WindTurbineParams{10.0, 3.0, 12.0, 25.0};
  w.wind = WeibullParams{8.0, 2.0};
  net.generators.push_back(w);
  resolve_references(net);
  double sum = 0.0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) sum += sample_scenario(net, i, 31).wind_speeds[0];
  const double expect = weibull_mean({8.0, 2.0});
  CHECK(std::abs(sum / n - expect) / expect < 0.01);
}

TEST_CASE("single-generator lossless scenario allocates the full load") {
  const Network net = make_two_bus_network(100.0, 0.8);
  const ScenarioEngine engine(net, RunMode::full);
  const ScenarioSample s = expected_scenario(net);
  const ScenarioSolution sol = engine.solve_scenario(s);
  const auto rates = engine.component_rates(sol, s);
  const auto reg = component_registry(net);
  REQUIRE(rates.size() == reg.size());
  CHECK(reg[0].id == "load:b");
  CHECK(rates[0] == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(sol.carbon.total_loss_rate == 0.0);
}

TEST_CASE("virtual mode equals full mode scenario by scenario") {
  const Network& net = small_fixture();
  const ScenarioEngine full(net, RunMode::full);
  const ScenarioEngine contracted(net, RunMode::virtual_bus);
  for (std::int64_t i = 0; i < 10; ++i) {
    const ScenarioSample s = sample_scenario(net, i, 5);
    const auto ra = full.component_rates(full.solve_scenario(s), s);
    const auto rb = contracted.component_rates(contracted.solve_scenario(s), s);
    for (std::size_t c = 0; c < ra.size(); ++c)
      CHECK(std::abs(ra[c] - rb[c]) <= 1e-10 * std::max(1.0, std::abs(ra[c])));
  }
}

TEST_CASE("all-RES scenario zeroes the conventional rates") {
  // oversized wind farm, penetration scaling not involved
  Network net = make_two_bus_network(50.0, 0.8);
  Generator w;
  w.id = "wf";
  w.bus = "b";
  w.kind = GeneratorKind::wind;
  w.p_rate = 500.0;
  w.p_lim = 500.0;
  w.turbine = WindTurbineParams{500.0, 3.0, 12.0, 25.0};
  w.wind = WeibullParams{14.0, 4.0};  // essentially always near rated speed
  net.generators.push_back(w);
  resolve_references(net);
  const ScenarioEngine engine(net, RunMode::full);
  ScenarioSample s = expected_scenario(net);
  s.wind_speeds[0] = 15.0;  // rated output, way above the 50 MW load
  const ScenarioSolution sol = engine.solve_scenario(s);
  CHECK(sol.dispatch.output_mw[0] == 0.0);
  CHECK(sol.dispatch.curtailment_mw[1] > 0.0);
  const auto rates = engine.component_rates(sol, s);
  const auto reg = component_registry(net);
  for (std::size_t c = 0; c < reg.size(); ++c)
    if (reg[c].id == "gen:g") CHECK(rates[c] == 0.0);
}

TEST_CASE("run_mcs basics: N=1 and zero-variance inputs") {
  const Network net = make_two_bus_network(100.0, 0.8);
  RunConfig cfg;
  cfg.samples = 1;
  cfg.seed = 3;
  const ResultSet rs = run_mcs(cfg, net);
  REQUIRE(rs.levels.size() == 1);
  for (const auto& st : rs.levels[0].stats) {
    CHECK(st.count() == 1);
    CHECK(st.variance() == 0.0);
  }

  RunConfig cfg2;
  cfg2.samples = 200;
  const ResultSet rs2 = run_mcs(cfg2, net);  // all-deterministic inputs
  for (const auto& st : rs2.levels[0].stats) CHECK(st.variance() == 0.0);
  CHECK(rs2.levels[0].mean_total(rs2.components) == doctest::Approx(80.0));
}

TEST_CASE("statistics are bit-identical for 1, 4 and 16 workers") {
  const Network& net = small_fixture();
  RunConfig cfg;
  cfg.samples = 300;
  cfg.seed = 2025;
  cfg.mode = RunMode::virtual_bus;
  cfg.pilot_samples = 100;
  cfg.workers = 1;
  const ResultSet r1 = run_mcs(cfg, net);
  cfg.workers = 4;
  const ResultSet r4 = run_mcs(cfg, net);
  cfg.workers = 16;
  const ResultSet r16 = run_mcs(cfg, net);
  CHECK(stats_identical(r1, r4));
  CHECK(stats_identical(r1, r16));
}

TEST_CASE("full and virtual runs agree in the mean") {
  const Network& net = small_fixture();
  RunConfig cfg;
  cfg.samples = 200;
  cfg.seed = 6;
  cfg.mode = RunMode::full;
  const ResultSet full = run_mcs(cfg, net);
  cfg.mode = RunMode::virtual_bus;
  const ResultSet contracted = run_mcs(cfg, net);
  for (std::size_t c = 0; c < full.components.size(); ++c) {
    const double a = full.levels[0].stats[c].mean();
    const double b = contracted.levels[0].stats[c].mean();
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
  CHECK(contracted.levels[0].fallbacks == 0);
  CHECK(contracted.levels[0].nodes_solved < full.levels[0].nodes_solved);
}

TEST_CASE("mean total emission decreases with penetration") {
  const Network& net = small_fixture();
  RunConfig cfg;
  cfg.samples = 400;
  cfg.seed = 99;
  cfg.mode = RunMode::virtual_bus;
  cfg.penetrations = {0.0, 0.3, 0.6};
  const ResultSet rs = run_mcs(cfg, net);
  REQUIRE(rs.levels.size() == 3);
  const double t0 = rs.levels[0].mean_total(rs.components);
  const double t1 = rs.levels[1].mean_total(rs.components);
  const double t2 = rs.levels[2].mean_total(rs.components);
  CHECK(t0 > t1);
  CHECK(t1 > t2);
}

TEST_CASE("scenario failures: fail-fast names the index, skip counts") {
  // slack unit barely covers the mean load; high draws are infeasible
  Network net = make_two_bus_network(100.0, 0.8);
  net.generators[0].p_lim = 101.0;
  net.generators[0].p_rate = 101.0;
  net.generators[0].cei->p_lim = 101.0;
  net.generators[0].cei->p_rate = 101.0;
  net.loads[0].normal.sigma = 10.0;
  resolve_references(net);

  RunConfig cfg;
  cfg.samples = 200;
  cfg.seed = 31;
  bool threw = false;
  try {
    run_mcs(cfg, net);
  } catch (const ModelingError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("scenario") != std::string::npos);
  }
  CHECK(threw);

  cfg.skip_failures = true;
  const ResultSet rs = run_mcs(cfg, net);
  CHECK(rs.levels[0].failures > 0);
  CHECK(rs.levels[0].failures < cfg.samples);
  for (const auto& st : rs.levels[0].stats)
    CHECK(st.count() == cfg.samples - rs.levels[0].failures);
}

TEST_CASE("per-scenario conservation holds across a seeded run") {
  const Network& net = small_fixture();
  const ScenarioEngine engine(net, RunMode::full);
  for (std::int64_t i = 0; i < 50; ++i) {
    const ScenarioSample s = sample_scenario(net, i, 13);
    const ScenarioSolution sol = engine.solve_scenario(s);
    const double out = sol.carbon.total_consumption_rate + sol.carbon.total_loss_rate;
    CHECK(std::abs(sol.carbon.total_generation_rate - out) <=
          1e-9 * std::max(1.0, sol.carbon.total_generation_rate));
  }
}
