#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "carbontrace/errors.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/synthetic.hpp"
#include "test_helpers.hpp"

using namespace carbontrace;

namespace {

const char* kTwoBusJson = R"({
  "base_mva": 100.0,
  "penetration_target": 0.0,
  "buses": [
    {"id": "a", "kind": "slack"},
    {"id": "b", "kind": "transmission"}
  ],
  "branches": [
    {"from_bus": "a", "to_bus": "b", "susceptance": 10.0, "resistance": 0.0}
  ],
  "generators": [
    {"id": "g", "bus": "a", "kind": "conventional", "p_rate": 150.0, "p_lim": 200.0,
     "cei": {"a_down": 0.8, "b_down": 0.0, "a_over": 0.8, "b_over": 0.0}}
  ],
  "loads": [
    {"bus": "b", "normal": {"mu": 100.0, "sigma": 0.0}}
  ],
  "ev_stations": []
})";

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

int count_violations(const std::vector<Violation>& vs, ViolationKind kind) {
  return static_cast<int>(std::count_if(
      vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == kind; }));
}

}  // namespace

TEST_CASE("minimal two-bus file parses") {
  const Network net = parse_network(kTwoBusJson);
  CHECK(net.buses.size() == 2);
  CHECK(net.branches.size() == 1);
  CHECK(net.generators.size() == 1);
  CHECK(validate(net).empty());
  CHECK(net.slack_bus() == 0);
  CHECK(net.slack_generator() == 0);
  CHECK(net.branches[0].from == 0);
  CHECK(net.branches[0].to == 1);
}

TEST_CASE("malformed file raises ParseError") {
  CHECK_THROWS_AS(parse_network("{ not json"), ParseError);
  CHECK_THROWS_AS(parse_network(R"({"buses": [{"kind": "slack"}]})"), ParseError);
  CHECK_THROWS_AS(parse_network(R"({"buses": [{"id": "a", "kind": "nope"}]})"), ParseError);
}

TEST_CASE("branch referencing an unknown bus is a named violation") {
  Network net = parse_network(kTwoBusJson);
  net.branches[0].to_bus = "ghost";
  resolve_references(net);
  const auto vs = validate(net);
  REQUIRE(has_violation(vs, ViolationKind::unknown_bus));
  bool names_branch = false;
  for (const auto& v : vs)
    if (v.kind == ViolationKind::unknown_bus && v.subject.find("a-ghost") != std::string::npos)
      names_branch = true;
  CHECK(names_branch);
}

TEST_CASE("validation reports every violation, not just the first") {
  Network net = parse_network(kTwoBusJson);
  net.branches[0].susceptance = -1.0;
  net.loads[0].normal.sigma = -2.0;
  net.penetration_target = 1.5;
  const auto vs = validate(net);
  CHECK(has_violation(vs, ViolationKind::nonpositive_susceptance));
  CHECK(has_violation(vs, ViolationKind::bad_distribution_params));
  CHECK(has_violation(vs, ViolationKind::bad_penetration));
  CHECK(vs.size() >= 3);
}

TEST_CASE("mutation of one invariant yields exactly the matching violation class") {
  SUBCASE("duplicate bus id") {
    Network net = parse_network(kTwoBusJson);
    net.buses[1].id = "a";
    const auto vs = validate(net);
    CHECK(count_violations(vs, ViolationKind::duplicate_bus_id) == 1);
  }
  SUBCASE("self loop") {
    Network net = parse_network(kTwoBusJson);
    net.branches[0].to_bus = "a";
    resolve_references(net);
    const auto vs = validate(net);
    CHECK(has_violation(vs, ViolationKind::self_loop));
  }
  SUBCASE("two slack buses") {
    Network net = parse_network(kTwoBusJson);
    net.buses[1].kind = BusKind::slack;
    CHECK(count_violations(validate(net), ViolationKind::multiple_slack) == 1);
  }
  SUBCASE("no slack bus") {
    Network net = parse_network(kTwoBusJson);
    net.buses[0].kind = BusKind::transmission;
    CHECK(count_violations(validate(net), ViolationKind::missing_slack) == 1);
  }
  SUBCASE("slack without a conventional unit") {
    Network net = parse_network(kTwoBusJson);
    net.generators[0].bus = "b";
    resolve_references(net);
    CHECK(count_violations(validate(net), ViolationKind::slack_without_generator) == 1);
  }
  SUBCASE("conventional limits") {
    Network net = parse_network(kTwoBusJson);
    net.generators[0].p_rate = 500.0;  // above p_lim
    CHECK(count_violations(validate(net), ViolationKind::bad_generator_limits) == 1);
  }
  SUBCASE("negative marginal intensity range") {
    Network net = parse_network(kTwoBusJson);
    net.generators[0].cei->b_down = 1.0;  // drives r negative before p_rate
    CHECK(count_violations(validate(net), ViolationKind::bad_cei_params) == 1);
  }
  SUBCASE("disconnected bus") {
    Network net = parse_network(kTwoBusJson);
    Bus c;
    c.id = "c";
    c.kind = BusKind::transmission;
    net.buses.push_back(c);
    resolve_references(net);
    CHECK(count_violations(validate(net), ViolationKind::disconnected) == 1);
  }
}

TEST_CASE("distribution feeder with a cycle is non-radial") {
  Network net = make_fig3_network();
  CHECK(validate(net).empty());
  Branch extra;
  extra.from_bus = "n04";
  extra.to_bus = "n09";
  extra.susceptance = 2.0;
  net.branches.push_back(extra);
  resolve_references(net);
  const auto vs = validate(net);
  CHECK(count_violations(vs, ViolationKind::nonradial_feeder) == 1);
}

TEST_CASE("feeder attached to the grid twice is non-radial") {
  Network net = test::standard_fixture();
  Branch extra;
  extra.from_bus = "t05";
  extra.to_bus = "f01_18";
  extra.susceptance = 2.0;
  net.branches.push_back(extra);
  resolve_references(net);
  CHECK(has_violation(validate(net), ViolationKind::nonradial_feeder));
}

TEST_CASE("synthetic fixture has the documented element counts") {
  const Network& net = test::standard_fixture();
  CHECK(net.buses.size() == 1006);  // 16 + 30 x 33
  int ders = 0, wind = 0, conventional = 0;
  for (const auto& g : net.generators) {
    ders += g.kind == GeneratorKind::der_pv;
    wind += g.kind == GeneratorKind::wind;
    conventional += g.kind == GeneratorKind::conventional;
  }
  CHECK(ders == 30);
  CHECK(wind == 2);
  CHECK(conventional == 3);
  CHECK(validate(net).empty());
  CHECK(net.penetration_target == 0.4);
}

TEST_CASE("synthetic fixture round-trips through the file format") {
  namespace fs = std::filesystem;
  const Network& net = test::standard_fixture();
  const fs::path path = fs::temp_directory_path() / "ct_roundtrip.json";
  save_network(net, path);
  const Network back = load_network(path);
  CHECK(network_to_json(back) == network_to_json(net));

  const fs::path path2 = fs::temp_directory_path() / "ct_roundtrip2.json";
  save_network(back, path2);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("build_synthetic determinism in the seed") {
  SyntheticConfig cfg;
  cfg.n_feeders = 4;
  const Network a = build_synthetic(cfg);
  const Network b = build_synthetic(cfg);
  CHECK(network_to_json(a) == network_to_json(b));

  cfg.seed = 2;
  const Network c = build_synthetic(cfg);
  CHECK(network_to_json(a) != network_to_json(c));
  // only DER placement may differ: same buses, branches, loads
  CHECK(a.buses.size() == c.buses.size());
  CHECK(a.branches.size() == c.branches.size());
  CHECK(a.loads.size() == c.loads.size());
  int diffs = 0;
  for (std::size_t g = 0; g < a.generators.size(); ++g)
    diffs += a.generators[g].bus != c.generators[g].bus;
  CHECK(diffs > 0);
  for (std::size_t g = 0; g < a.generators.size(); ++g)
    if (a.generators[g].kind != GeneratorKind::der_pv)
      CHECK(a.generators[g].bus == c.generators[g].bus);
}

TEST_CASE("penetration zero zeroes every RES capacity") {
  SyntheticConfig cfg;
  cfg.n_feeders = 2;
  cfg.penetration = 0.0;
  const Network net = build_synthetic(cfg);
  for (const auto& g : net.generators)
    if (g.kind != GeneratorKind::conventional) CHECK(g.p_rate == 0.0);
}

TEST_CASE("scale_to_penetration hits the requested share") {
  const Network& base = test::standard_fixture();
  for (double target : {0.2, 0.6, 0.8}) {
    const Network scaled = scale_to_penetration(base, target);
    CHECK(expected_res_share(scaled) == doctest::Approx(target).epsilon(1e-9));
  }
  CHECK_THROWS_AS(scale_to_penetration(base, 1.2), ModelingError);
  const Network zero = scale_to_penetration(base, 0.0);
  CHECK_THROWS_AS(scale_to_penetration(zero, 0.5), ModelingError);
}

TEST_CASE("infeasible penetration is rejected") {
  SyntheticConfig cfg;
  cfg.n_feeders = 2;
  cfg.penetration = 0.9;  // outside [0,1) is rejected on its own
  CHECK_THROWS_AS(build_synthetic({.n_feeders = 2, .penetration = 1.0}), ModelingError);
  cfg.penetration = 0.8;
  cfg.res_capacity_cap_mw = 10.0;
  CHECK_THROWS_AS(build_synthetic(cfg), ModelingError);
}
