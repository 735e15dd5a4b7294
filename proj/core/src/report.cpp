#include "carbontrace/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carbontrace/errors.hpp"
#include "carbontrace/version.hpp"

namespace carbontrace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* kind_name(ComponentInfo::Kind k) {
  switch (k) {
    case ComponentInfo::Kind::load: return "load";
    case ComponentInfo::Kind::ev_station: return "ev_station";
    case ComponentInfo::Kind::generator: return "generator";
    case ComponentInfo::Kind::losses: return "losses";
    case ComponentInfo::Kind::total: return "total";
  }
  return "?";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write output file: " + path.string());
  return out;
}

std::string penetration_label(double p) {
  return p < 0.0 ? "as_built" : format_double(p);
}

}  // namespace

void write_summary_csv(const std::filesystem::path& path, const ResultSet& rs) {
  auto out = open_out(path);
  out << "penetration,component,kind,mean_tco2_per_h,variance,p05,p50,p95,min,max,count\n";
  for (const auto& level : rs.levels) {
    for (std::size_t c = 0; c < rs.components.size(); ++c) {
      const auto& st = level.stats[c];
      out << penetration_label(level.penetration) << ',' << rs.components[c].id << ','
          << kind_name(rs.components[c].kind) << ',' << format_double(st.mean()) << ','
          << format_double(st.variance()) << ',' << format_double(st.quantile(0.05))
          << ',' << format_double(st.quantile(0.50)) << ','
          << format_double(st.quantile(0.95)) << ',' << format_double(st.min()) << ','
          << format_double(st.max()) << ',' << st.count() << '\n';
    }
  }
}

void write_histogram_csv(const std::filesystem::path& path, const ResultSet& rs,
                         int level) {
  auto out = open_out(path);
  out << "component,bin_lo,bin_hi,count,pdf,cdf\n";
  const auto& lv = rs.levels.at(level);
  for (std::size_t c = 0; c < rs.components.size(); ++c) {
    const auto series = empirical_distribution(lv.stats[c]);
    for (std::size_t b = 0; b < series.pdf.size(); ++b) {
      out << rs.components[c].id << ',' << format_double(series.bin_lo[b]) << ','
          << format_double(series.bin_hi[b]) << ',' << lv.stats[c].bin_samples(b)
          << ',' << format_double(series.pdf[b]) << ',' << format_double(series.cdf[b])
          << '\n';
    }
  }
}

void write_metadata_json(const std::filesystem::path& path, const RunConfig& cfg,
                         const ResultSet& rs, const std::string& network_file) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["git"] = kGitDescribe;
  j["network_file"] = network_file;
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["mode"] = cfg.mode == RunMode::full ? "full" : "virtual";
  switch (cfg.solver) {
    case IntensityMethod::automatic: j["solver"] = "auto"; break;
    case IntensityMethod::sweep: j["solver"] = "sweep"; break;
    case IntensityMethod::dense: j["solver"] = "dense"; break;
    case IntensityMethod::sparse: j["solver"] = "sparse"; break;
  }
  j["workers"] = cfg.workers;
  j["bins"] = cfg.bins;
  j["skip_failures"] = cfg.skip_failures;
  j["penetrations"] = cfg.penetrations;
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& level : rs.levels) {
    nlohmann::ordered_json jl;
    jl["penetration"] = penetration_label(level.penetration);
    jl["samples"] = level.samples;
    jl["wall_seconds"] = level.wall_seconds;
    jl["prep_seconds"] = level.prep_seconds;
    jl["failures"] = level.failures;
    jl["fallbacks"] = level.fallbacks;
    jl["nodes_solved"] = level.nodes_solved;
    jl["mean_total_tco2_per_h"] = level.mean_total(rs.components);
    j["levels"].push_back(std::move(jl));
  }
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_bench_csv(const std::filesystem::path& path, const BenchReport& report) {
  auto out = open_out(path);
  out << "samples,full_seconds,virtual_seconds,speedup,nodes_full,nodes_virtual\n";
  for (const auto& r : report.rows) {
    out << r.samples << ',' << format_double(r.full_seconds) << ','
        << format_double(r.virtual_seconds) << ',' << format_double(r.speedup) << ','
        << r.nodes_full << ',' << r.nodes_virtual << '\n';
  }
}

std::string bench_table(const BenchReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%10s %14s %17s %10s %12s %14s\n", "samples",
                "full (s)", "virtual (s)", "speedup", "nodes_full", "nodes_virtual");
  os << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%10lld %14.3f %17.4f %9.1fx %12d %14d\n",
                  static_cast<long long>(r.samples), r.full_seconds, r.virtual_seconds,
                  r.speedup, r.nodes_full, r.nodes_virtual);
    os << line;
  }
  return os.str();
}

void write_partition_csv(std::ostream& os, const Network& net, const Decomposition& d) {
  os << "bus_id,virtual_bus_id,is_start\n";
  const auto& p = d.partition;
  for (int i = 0; i < p.n_nodes; ++i) {
    const int b = p.block_of[i];
    os << net.buses[i].id << ',' << net.buses[p.start_node[b]].id << ','
       << (p.is_start[i] ? 1 : 0) << '\n';
  }
}

ResponsibilityResult run_responsibility(const Network& net, const std::string& gen_id,
                                        std::int64_t samples, std::uint64_t seed) {
  int target = -1;
  for (int g = 0; g < static_cast<int>(net.generators.size()); ++g)
    if (net.generators[g].id == gen_id) target = g;
  if (target < 0) throw ValidationError("unknown generator id: " + gen_id);
  if (samples < 1) throw ModelingError("sample count must be >= 1");

  const ScenarioEngine engine(net, RunMode::full);
  ResponsibilityResult r;
  r.generator = gen_id;
  r.samples = samples;
  for (const auto& c : component_registry(net))
    if (c.kind == ComponentInfo::Kind::load || c.kind == ComponentInfo::Kind::ev_station ||
        c.kind == ComponentInfo::Kind::losses)
      r.components.push_back(c);
  const std::size_t nc = r.components.size();
  r.mean_fraction.assign(nc, 0.0);
  r.mean_rate.assign(nc, 0.0);

  const int target_bus = net.generators[target].bus_index;
  for (std::int64_t i = 0; i < samples; ++i) {
    const ScenarioSample s = sample_scenario(net, i, seed);
    const ScenarioSolution sol = engine.solve_scenario(s);
    const double p_g = sol.dispatch.output_mw[target];
    const double e_g = sol.dispatch.intensity[target];
    // frac[i]: share of bus i's power originating at the target unit
    const auto frac = trace_fractions(sol.graph, target_bus, p_g);

    double allocated = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& info = r.components[c];
      double fraction = 0.0, rate = 0.0;
      if (info.kind == ComponentInfo::Kind::load) {
        fraction = frac[net.loads[info.element].bus_index];
        rate = s.base_loads[info.element] * fraction * e_g;
        allocated += s.base_loads[info.element] * fraction;
      } else if (info.kind == ComponentInfo::Kind::ev_station) {
        fraction = frac[net.ev_stations[info.element].bus_index];
        rate = s.ev_demands[info.element] * fraction * e_g;
        allocated += s.ev_demands[info.element] * fraction;
      } else {
        double traced_loss = 0.0, loss_mw = 0.0;
        for (int node = 0; node < sol.graph.n; ++node) {
          traced_loss += sol.graph.attached_loss_mw[node] * frac[node];
          loss_mw += sol.graph.attached_loss_mw[node];
        }
        fraction = loss_mw > 0.0 ? traced_loss / loss_mw : 0.0;
        rate = traced_loss * e_g;
        allocated += traced_loss;
      }
      r.mean_fraction[c] += (fraction - r.mean_fraction[c]) / static_cast<double>(i + 1);
      r.mean_rate[c] += (rate - r.mean_rate[c]) / static_cast<double>(i + 1);
    }
    const double gen_rate = p_g * e_g;
    r.generator_mean_rate += (gen_rate - r.generator_mean_rate) / static_cast<double>(i + 1);
    const double scale = std::max(1.0, p_g);
    if (std::abs(allocated - p_g) > 1e-9 * scale) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "responsibility trace does not conserve at scenario %lld: "
                    "allocated %.12g MW vs generated %.12g MW",
                    static_cast<long long>(i), allocated, p_g);
      throw NumericalError(buf);
    }
  }
  for (double v : r.mean_rate) r.responsibility_total += v;
  return r;
}

void write_responsibility_csv(const std::filesystem::path& path,
                              const ResponsibilityResult& r) {
  auto out = open_out(path);
  out << "component,kind,mean_fraction,mean_rate_tco2_per_h\n";
  for (std::size_t c = 0; c < r.components.size(); ++c) {
    out << r.components[c].id << ',' << kind_name(r.components[c].kind) << ','
        << format_double(r.mean_fraction[c]) << ',' << format_double(r.mean_rate[c])
        << '\n';
  }
  out << "TOTAL,,," << format_double(r.responsibility_total) << '\n';
  out << "gen:" << r.generator << ",generator,," << format_double(r.generator_mean_rate)
      << '\n';
}

}  // namespace carbontrace
