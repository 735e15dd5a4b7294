#include "carbontrace/network.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carbontrace/errors.hpp"

namespace carbontrace {

using ordered_json = nlohmann::ordered_json;

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::duplicate_bus_id: return "duplicate_bus_id";
    case ViolationKind::unknown_bus: return "unknown_bus";
    case ViolationKind::self_loop: return "self_loop";
    case ViolationKind::nonpositive_susceptance: return "nonpositive_susceptance";
    case ViolationKind::negative_resistance: return "negative_resistance";
    case ViolationKind::bad_generator_limits: return "bad_generator_limits";
    case ViolationKind::negative_intensity: return "negative_intensity";
    case ViolationKind::bad_cei_params: return "bad_cei_params";
    case ViolationKind::bad_turbine_speeds: return "bad_turbine_speeds";
    case ViolationKind::bad_distribution_params: return "bad_distribution_params";
    case ViolationKind::duplicate_attachment: return "duplicate_attachment";
    case ViolationKind::bad_penetration: return "bad_penetration";
    case ViolationKind::bad_base_mva: return "bad_base_mva";
    case ViolationKind::missing_slack: return "missing_slack";
    case ViolationKind::multiple_slack: return "multiple_slack";
    case ViolationKind::slack_without_generator: return "slack_without_generator";
    case ViolationKind::disconnected: return "disconnected";
    case ViolationKind::nonradial_feeder: return "nonradial_feeder";
  }
  return "unknown";
}

void resolve_references(Network& net) {
  net.bus_index.clear();
  for (int i = 0; i < static_cast<int>(net.buses.size()); ++i) {
    net.bus_index.emplace(net.buses[i].id, i);
    net.buses[i].base_load_ref = -1;
    net.buses[i].ev_station_ref = -1;
  }
  for (auto& br : net.branches) {
    br.from = net.index_of_bus(br.from_bus);
    br.to = net.index_of_bus(br.to_bus);
  }
  for (auto& g : net.generators) g.bus_index = net.index_of_bus(g.bus);
  for (int i = 0; i < static_cast<int>(net.loads.size()); ++i) {
    auto& l = net.loads[i];
    l.bus_index = net.index_of_bus(l.bus);
    if (l.bus_index >= 0 && net.buses[l.bus_index].base_load_ref < 0)
      net.buses[l.bus_index].base_load_ref = i;
  }
  for (int i = 0; i < static_cast<int>(net.ev_stations.size()); ++i) {
    auto& ev = net.ev_stations[i];
    ev.bus_index = net.index_of_bus(ev.bus);
    if (ev.bus_index >= 0 && net.buses[ev.bus_index].ev_station_ref < 0)
      net.buses[ev.bus_index].ev_station_ref = i;
  }
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // returns false if already united (a cycle-closing edge)
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

void check_graph(const Network& net, std::vector<Violation>& out) {
  const int n = static_cast<int>(net.buses.size());
  if (n == 0) return;

  UnionFind all(n);
  for (const auto& br : net.branches)
    if (br.from >= 0 && br.to >= 0 && br.from != br.to) all.unite(br.from, br.to);
  const int root = all.find(0);
  for (int i = 1; i < n; ++i) {
    if (all.find(i) != root) {
      out.push_back({ViolationKind::disconnected, net.buses[i].id,
                     "bus not connected to bus " + net.buses[0].id});
      break;
    }
  }

  // Radiality of distribution sub-networks: branches between distribution
  // buses must not close a cycle, and every distribution component must
  // hang off exactly one non-distribution bus.
  UnionFind dist(n);
  auto is_dist = [&](int b) { return net.buses[b].kind == BusKind::distribution; };
  for (const auto& br : net.branches) {
    if (br.from < 0 || br.to < 0 || br.from == br.to) continue;
    if (is_dist(br.from) && is_dist(br.to)) {
      if (!dist.unite(br.from, br.to)) {
        out.push_back({ViolationKind::nonradial_feeder,
                       br.from_bus + "-" + br.to_bus,
                       "branch closes a cycle inside a distribution feeder"});
      }
    }
  }
  std::vector<int> attachments(n, 0);
  for (const auto& br : net.branches) {
    if (br.from < 0 || br.to < 0 || br.from == br.to) continue;
    const bool fd = is_dist(br.from), td = is_dist(br.to);
    if (fd != td) ++attachments[dist.find(fd ? br.from : br.to)];
  }
  for (int i = 0; i < n; ++i) {
    if (!is_dist(i) || dist.find(i) != i) continue;
    if (attachments[i] > 1) {
      out.push_back({ViolationKind::nonradial_feeder, net.buses[i].id,
                     "feeder attached to the transmission grid more than once"});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;

  if (!(net.base_mva > 0.0))
    out.push_back({ViolationKind::bad_base_mva, "network", "base_mva must be > 0"});
  if (!(net.penetration_target >= 0.0 && net.penetration_target < 1.0))
    out.push_back({ViolationKind::bad_penetration, "network",
                   "penetration_target must lie in [0, 1)"});

  std::unordered_map<std::string, int> seen;
  bool ids_ok = true;
  for (const auto& b : net.buses) {
    if (++seen[b.id] == 2) {
      out.push_back({ViolationKind::duplicate_bus_id, b.id, "bus id appears more than once"});
      ids_ok = false;
    }
  }

  auto known = [&](const std::string& id) { return seen.count(id) > 0; };
  bool refs_ok = true;
  auto check_ref = [&](const std::string& id, const std::string& owner) {
    if (!known(id)) {
      out.push_back({ViolationKind::unknown_bus, owner, "references unknown bus " + id});
      refs_ok = false;
    }
  };

  for (const auto& br : net.branches) {
    const std::string bid = br.from_bus + "-" + br.to_bus;
    check_ref(br.from_bus, "branch " + bid);
    check_ref(br.to_bus, "branch " + bid);
    if (br.from_bus == br.to_bus)
      out.push_back({ViolationKind::self_loop, bid, "branch endpoints coincide"});
    if (!(br.susceptance > 0.0))
      out.push_back({ViolationKind::nonpositive_susceptance, bid, "susceptance must be > 0"});
    if (br.resistance < 0.0)
      out.push_back({ViolationKind::negative_resistance, bid, "resistance must be >= 0"});
  }

  for (const auto& g : net.generators) {
    check_ref(g.bus, "generator " + g.id);
    if (g.p_rate < 0.0)
      out.push_back({ViolationKind::bad_generator_limits, g.id, "p_rate must be >= 0"});
    if (g.kind == GeneratorKind::conventional) {
      if (!(g.p_lim > 0.0) || g.p_rate > g.p_lim)
        out.push_back({ViolationKind::bad_generator_limits, g.id,
                       "conventional unit needs 0 <= p_rate <= p_lim, p_lim > 0"});
      if (g.participation_factor < 0.0)
        out.push_back({ViolationKind::bad_generator_limits, g.id,
                       "participation_factor must be >= 0"});
      if (!g.cei) {
        out.push_back({ViolationKind::bad_cei_params, g.id,
                       "conventional unit needs a cei model"});
      } else {
        const auto& c = *g.cei;
        if (c.p_rate > c.p_lim || !(c.p_lim > 0.0))
          out.push_back({ViolationKind::bad_cei_params, g.id,
                         "cei needs 0 <= p_rate <= p_lim"});
        const double r_ends[] = {c.a_down, c.a_down - c.b_down * c.p_rate,
                                 c.a_over + c.b_over * c.p_rate,
                                 c.a_over + c.b_over * c.p_lim};
        for (double r : r_ends) {
          if (r < 0.0) {
            out.push_back({ViolationKind::bad_cei_params, g.id,
                           "marginal intensity becomes negative within (0, p_lim]"});
            break;
          }
        }
      }
    } else {
      if (g.fixed_intensity < 0.0)
        out.push_back({ViolationKind::negative_intensity, g.id,
                       "fixed intensity must be >= 0"});
    }
    if (g.kind == GeneratorKind::wind) {
      if (!g.turbine) {
        out.push_back({ViolationKind::bad_turbine_speeds, g.id, "wind unit needs turbine params"});
      } else if (!(g.turbine->v_in >= 0.0 && g.turbine->v_in < g.turbine->v_rate &&
                   g.turbine->v_rate < g.turbine->v_out)) {
        out.push_back({ViolationKind::bad_turbine_speeds, g.id,
                       "turbine speeds need 0 <= v_in < v_rate < v_out"});
      }
      if (!g.wind || !(g.wind->lambda > 0.0) || !(g.wind->k > 0.0))
        out.push_back({ViolationKind::bad_distribution_params, g.id,
                       "wind unit needs weibull {lambda > 0, k > 0}"});
    }
    if (g.kind == GeneratorKind::der_pv) {
      if (!g.der_factor || !(g.der_factor->alpha > 0.0) || !(g.der_factor->beta > 0.0))
        out.push_back({ViolationKind::bad_distribution_params, g.id,
                       "der_pv unit needs beta {alpha > 0, beta > 0}"});
    }
  }

  std::unordered_map<std::string, int> load_count, ev_count;
  for (const auto& l : net.loads) {
    check_ref(l.bus, "load at " + l.bus);
    if (l.normal.mu < 0.0 || l.normal.sigma < 0.0)
      out.push_back({ViolationKind::bad_distribution_params, "load at " + l.bus,
                     "normal needs mu >= 0 and sigma >= 0"});
    if (++load_count[l.bus] == 2)
      out.push_back({ViolationKind::duplicate_attachment, l.bus,
                     "more than one base load at the same bus"});
  }
  for (const auto& ev : net.ev_stations) {
    check_ref(ev.bus, "ev_station at " + ev.bus);
    if (!(ev.weibull.lambda > 0.0) || !(ev.weibull.k > 0.0))
      out.push_back({ViolationKind::bad_distribution_params, "ev_station at " + ev.bus,
                     "weibull needs lambda > 0 and k > 0"});
    if (++ev_count[ev.bus] == 2)
      out.push_back({ViolationKind::duplicate_attachment, ev.bus,
                     "more than one ev_station at the same bus"});
  }

  int slack_count = 0;
  for (const auto& b : net.buses)
    if (b.kind == BusKind::slack) ++slack_count;
  if (slack_count == 0)
    out.push_back({ViolationKind::missing_slack, "network", "no slack bus"});
  if (slack_count > 1)
    out.push_back({ViolationKind::multiple_slack, "network",
                   "more than one slack bus"});
  if (slack_count == 1) {
    std::string slack_id;
    for (const auto& b : net.buses)
      if (b.kind == BusKind::slack) slack_id = b.id;
    bool has_unit = false;
    for (const auto& g : net.generators)
      if (g.kind == GeneratorKind::conventional && g.bus == slack_id) has_unit = true;
    if (!has_unit)
      out.push_back({ViolationKind::slack_without_generator, "network",
                     "slack bus has no conventional generator"});
  }

  if (ids_ok && refs_ok) {
    Network resolved = net;
    resolve_references(resolved);
    check_graph(resolved, out);
  }
  return out;
}

void require_valid(const Network& net) {
  auto violations = validate(net);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "network validation failed with " << violations.size() << " violation(s):";
  for (const auto& v : violations)
    os << "\n  [" << to_string(v.kind) << "] " << v.subject << ": " << v.detail;
  throw ValidationError(os.str());
}

namespace {

double require_number(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ParseError(where + ": missing or non-numeric field '" + key + "'");
  return j.at(key).get<double>();
}

std::string require_string(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ParseError(where + ": missing or non-string field '" + key + "'");
  return j.at(key).get<std::string>();
}

BusKind parse_bus_kind(const std::string& s, const std::string& where) {
  if (s == "transmission") return BusKind::transmission;
  if (s == "distribution") return BusKind::distribution;
  if (s == "slack") return BusKind::slack;
  throw ParseError(where + ": unknown bus kind '" + s + "'");
}

GeneratorKind parse_gen_kind(const std::string& s, const std::string& where) {
  if (s == "conventional") return GeneratorKind::conventional;
  if (s == "wind") return GeneratorKind::wind;
  if (s == "der_pv") return GeneratorKind::der_pv;
  throw ParseError(where + ": unknown generator kind '" + s + "'");
}

const char* bus_kind_name(BusKind k) {
  switch (k) {
    case BusKind::transmission: return "transmission";
    case BusKind::distribution: return "distribution";
    case BusKind::slack: return "slack";
  }
  return "?";
}

const char* gen_kind_name(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::conventional: return "conventional";
    case GeneratorKind::wind: return "wind";
    case GeneratorKind::der_pv: return "der_pv";
  }
  return "?";
}

Network from_json(const ordered_json& j) {
  Network net;
  net.base_mva = j.value("base_mva", 100.0);
  net.penetration_target = j.value("penetration_target", 0.0);

  for (const auto& jb : j.value("buses", ordered_json::array())) {
    Bus b;
    b.id = require_string(jb, "id", "bus");
    b.kind = parse_bus_kind(jb.value("kind", "distribution"), "bus " + b.id);
    net.buses.push_back(std::move(b));
  }
  for (const auto& jb : j.value("branches", ordered_json::array())) {
    Branch br;
    br.from_bus = require_string(jb, "from_bus", "branch");
    br.to_bus = require_string(jb, "to_bus", "branch");
    const std::string where = "branch " + br.from_bus + "-" + br.to_bus;
    br.susceptance = require_number(jb, "susceptance", where);
    br.resistance = jb.value("resistance", 0.0);
    if (jb.contains("rating")) br.rating = jb.at("rating").get<double>();
    net.branches.push_back(std::move(br));
  }
  for (const auto& jg : j.value("generators", ordered_json::array())) {
    Generator g;
    g.id = require_string(jg, "id", "generator");
    const std::string where = "generator " + g.id;
    g.bus = require_string(jg, "bus", where);
    g.kind = parse_gen_kind(require_string(jg, "kind", where), where);
    g.p_rate = require_number(jg, "p_rate", where);
    g.p_lim = jg.value("p_lim", g.p_rate);
    g.fixed_intensity = jg.value("fixed_intensity", 0.0);
    g.participation_factor = jg.value("participation_factor", 1.0);
    if (jg.contains("cei")) {
      const auto& jc = jg.at("cei");
      MarginalCeiParams c;
      c.a_down = require_number(jc, "a_down", where + " cei");
      c.b_down = require_number(jc, "b_down", where + " cei");
      c.a_over = require_number(jc, "a_over", where + " cei");
      c.b_over = require_number(jc, "b_over", where + " cei");
      c.p_rate = jc.value("p_rate", g.p_rate);
      c.p_lim = jc.value("p_lim", g.p_lim);
      g.cei = c;
    }
    if (jg.contains("turbine")) {
      const auto& jt = jg.at("turbine");
      WindTurbineParams t;
      t.p_rate = g.p_rate;
      t.v_in = require_number(jt, "v_in", where + " turbine");
      t.v_rate = require_number(jt, "v_rate", where + " turbine");
      t.v_out = require_number(jt, "v_out", where + " turbine");
      g.turbine = t;
    }
    if (jg.contains("weibull")) {
      const auto& jw = jg.at("weibull");
      g.wind = WeibullParams{require_number(jw, "lambda", where + " weibull"),
                             require_number(jw, "k", where + " weibull")};
    }
    if (jg.contains("beta")) {
      const auto& jbb = jg.at("beta");
      g.der_factor = BetaParams{require_number(jbb, "alpha", where + " beta"),
                                require_number(jbb, "beta", where + " beta")};
    }
    net.generators.push_back(std::move(g));
  }
  for (const auto& jl : j.value("loads", ordered_json::array())) {
    LoadSpec l;
    l.bus = require_string(jl, "bus", "load");
    if (!jl.contains("normal")) throw ParseError("load at " + l.bus + ": missing 'normal'");
    const auto& jn = jl.at("normal");
    l.normal.mu = require_number(jn, "mu", "load at " + l.bus);
    l.normal.sigma = require_number(jn, "sigma", "load at " + l.bus);
    net.loads.push_back(std::move(l));
  }
  for (const auto& je : j.value("ev_stations", ordered_json::array())) {
    EvStationSpec ev;
    ev.bus = require_string(je, "bus", "ev_station");
    if (!je.contains("weibull"))
      throw ParseError("ev_station at " + ev.bus + ": missing 'weibull'");
    const auto& jw = je.at("weibull");
    ev.weibull.lambda = require_number(jw, "lambda", "ev_station at " + ev.bus);
    ev.weibull.k = require_number(jw, "k", "ev_station at " + ev.bus);
    net.ev_stations.push_back(std::move(ev));
  }
  return net;
}

ordered_json to_json(const Network& net) {
  ordered_json j;
  j["base_mva"] = net.base_mva;
  j["penetration_target"] = net.penetration_target;
  j["buses"] = ordered_json::array();
  for (const auto& b : net.buses)
    j["buses"].push_back({{"id", b.id}, {"kind", bus_kind_name(b.kind)}});
  j["branches"] = ordered_json::array();
  for (const auto& br : net.branches) {
    ordered_json jb{{"from_bus", br.from_bus},
                    {"to_bus", br.to_bus},
                    {"susceptance", br.susceptance},
                    {"resistance", br.resistance}};
    if (br.rating) jb["rating"] = *br.rating;
    j["branches"].push_back(std::move(jb));
  }
  j["generators"] = ordered_json::array();
  for (const auto& g : net.generators) {
    ordered_json jg{{"id", g.id},
                    {"bus", g.bus},
                    {"kind", gen_kind_name(g.kind)},
                    {"p_rate", g.p_rate},
                    {"p_lim", g.p_lim}};
    if (g.kind != GeneratorKind::conventional) jg["fixed_intensity"] = g.fixed_intensity;
    if (g.kind == GeneratorKind::conventional)
      jg["participation_factor"] = g.participation_factor;
    if (g.cei)
      jg["cei"] = {{"a_down", g.cei->a_down}, {"b_down", g.cei->b_down},
                   {"a_over", g.cei->a_over}, {"b_over", g.cei->b_over},
                   {"p_rate", g.cei->p_rate}, {"p_lim", g.cei->p_lim}};
    if (g.turbine)
      jg["turbine"] = {{"v_in", g.turbine->v_in},
                       {"v_rate", g.turbine->v_rate},
                       {"v_out", g.turbine->v_out}};
    if (g.wind) jg["weibull"] = {{"lambda", g.wind->lambda}, {"k", g.wind->k}};
    if (g.der_factor)
      jg["beta"] = {{"alpha", g.der_factor->alpha}, {"beta", g.der_factor->beta}};
    j["generators"].push_back(std::move(jg));
  }
  j["loads"] = ordered_json::array();
  for (const auto& l : net.loads)
    j["loads"].push_back(
        {{"bus", l.bus}, {"normal", {{"mu", l.normal.mu}, {"sigma", l.normal.sigma}}}});
  j["ev_stations"] = ordered_json::array();
  for (const auto& ev : net.ev_stations)
    j["ev_stations"].push_back(
        {{"bus", ev.bus},
         {"weibull", {{"lambda", ev.weibull.lambda}, {"k", ev.weibull.k}}}});
  return j;
}

}  // namespace

Network parse_network(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network file is not valid JSON: ") + e.what());
  }
  Network net;
  try {
    net = from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network schema error: ") + e.what());
  }
  resolve_references(net);
  return net;
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Network net = parse_network(buf.str());
  require_valid(net);
  return net;
}

std::string network_to_json(const Network& net) { return to_json(net).dump(2) + "\n"; }

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write network file: " + path.string());
  out << network_to_json(net);
}

}  // namespace carbontrace
