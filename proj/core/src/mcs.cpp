#include "carbontrace/mcs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "carbontrace/errors.hpp"
#include "carbontrace/synthetic.hpp"

namespace carbontrace {

std::vector<ComponentInfo> component_registry(const Network& net) {
  std::vector<ComponentInfo> out;
  for (int i = 0; i < static_cast<int>(net.loads.size()); ++i)
    out.push_back({ComponentInfo::Kind::load, "load:" + net.loads[i].bus, i});
  for (int i = 0; i < static_cast<int>(net.ev_stations.size()); ++i)
    out.push_back({ComponentInfo::Kind::ev_station, "ev:" + net.ev_stations[i].bus, i});
  for (int i = 0; i < static_cast<int>(net.generators.size()); ++i)
    out.push_back({ComponentInfo::Kind::generator, "gen:" + net.generators[i].id, i});
  out.push_back({ComponentInfo::Kind::losses, "losses", -1});
  out.push_back({ComponentInfo::Kind::total, "total", -1});
  return out;
}

ScenarioEngine::ScenarioEngine(const Network& net, RunMode mode, IntensityMethod solver)
    : net_(&net), mode_(mode), solver_(solver), dc_(std::make_shared<DcSolver>(net)) {
  if (mode_ == RunMode::virtual_bus) {
    ScenarioSample ref = expected_scenario(net);
    DispatchResult d = dispatch(net, ref);
    FlowSolution flow = solve_with_losses(net, *dc_, d, ref);
    FlowGraph g = build_flow_graph(net, d, flow, ref);
    partition_ = std::make_shared<Decomposition>(decompose(g));
  }
}

int ScenarioEngine::solve_node_count() const {
  return mode_ == RunMode::virtual_bus ? partition_->partition.n_blocks
                                       : static_cast<int>(net_->buses.size());
}

ScenarioSolution ScenarioEngine::solve_scenario(const ScenarioSample& s) const {
  ScenarioSolution out;
  out.dispatch = dispatch(*net_, s);
  FlowSolution flow = solve_with_losses(*net_, *dc_, out.dispatch, s);
  out.graph = build_flow_graph(*net_, out.dispatch, flow, s);
  const FlowGraphLabels labels{net_};

  if (mode_ == RunMode::virtual_bus &&
      partition_valid_for(partition_->partition, out.graph)) {
    FlowGraph agg = aggregate(out.graph, partition_->partition);
    CarbonSolution agg_sol = solve_intensities(agg, solver_);
    out.carbon = expand_solution(agg_sol, partition_->partition, out.graph);
  } else {
    out.fallback = mode_ == RunMode::virtual_bus;
    out.carbon = solve_intensities(out.graph, solver_, labels);
    allocate_emissions(out.graph, out.carbon);
  }

  const double total_out = out.carbon.total_consumption_rate + out.carbon.total_loss_rate;
  const double scale = std::max(1.0, out.carbon.total_generation_rate);
  if (std::abs(out.carbon.total_generation_rate - total_out) > 1e-8 * scale) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "emission conservation violated: generation %.12g vs "
                  "allocation %.12g tCO2/h",
                  out.carbon.total_generation_rate, total_out);
    throw NumericalError(buf);
  }
  return out;
}

std::vector<double> ScenarioEngine::component_rates(const ScenarioSolution& sol,
                                                    const ScenarioSample& s) const {
  std::vector<double> rates;
  rates.reserve(net_->loads.size() + net_->ev_stations.size() +
                net_->generators.size() + 2);
  const auto& e = sol.carbon.bus_intensity;
  for (std::size_t i = 0; i < net_->loads.size(); ++i)
    rates.push_back(s.base_loads[i] * e[net_->loads[i].bus_index]);
  for (std::size_t i = 0; i < net_->ev_stations.size(); ++i)
    rates.push_back(s.ev_demands[i] * e[net_->ev_stations[i].bus_index]);
  for (std::size_t g = 0; g < net_->generators.size(); ++g)
    rates.push_back(sol.dispatch.output_mw[g] * sol.dispatch.intensity[g]);
  rates.push_back(sol.carbon.total_loss_rate);
  rates.push_back(sol.carbon.total_generation_rate);
  return rates;
}

double LevelResult::mean_total(const std::vector<ComponentInfo>& components) const {
  for (std::size_t c = 0; c < components.size(); ++c)
    if (components[c].kind == ComponentInfo::Kind::total) return stats[c].mean();
  return 0.0;
}

namespace {

constexpr std::int64_t kChunk = 512;

struct RowStore {
  std::vector<double> rates;   // n_rows x n_components
  std::vector<std::uint8_t> failed;
  std::vector<std::uint8_t> fallback;
  std::int64_t rows = 0;
  int width = 0;

  void resize(std::int64_t n, int c) {
    rows = n;
    width = c;
    rates.assign(static_cast<std::size_t>(n) * c, 0.0);
    failed.assign(n, 0);
    fallback.assign(n, 0);
  }
  double* row(std::int64_t i) { return rates.data() + static_cast<std::size_t>(i) * width; }
  const double* row(std::int64_t i) const {
    return rates.data() + static_cast<std::size_t>(i) * width;
  }
};

struct ScenarioFailure {
  std::int64_t index;
  std::string message;
};

// Evaluates scenarios [begin, end) into `store` rows [0, end-begin) with
// `workers` threads pulling indices from a shared counter. Rows with
// index < reuse_count are copied from `reuse` instead of recomputed.
void evaluate_range(const ScenarioEngine& engine, const RunConfig& cfg,
                    std::int64_t begin, std::int64_t end, RowStore& store,
                    const RowStore* reuse, std::int64_t reuse_count, int workers,
                    std::vector<ScenarioFailure>& failures) {
  std::atomic<std::int64_t> next{begin};
  std::atomic<bool> abort{false};
  std::mutex fail_mu;

  auto work = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= end || abort.load(std::memory_order_relaxed)) return;
      const std::int64_t r = i - begin;
      if (reuse && i < reuse_count) {
        std::copy(reuse->row(i), reuse->row(i) + store.width, store.row(r));
        store.failed[r] = reuse->failed[i];
        store.fallback[r] = reuse->fallback[i];
        continue;
      }
      try {
        const ScenarioSample s = sample_scenario(engine.network(), i, cfg.seed);
        const ScenarioSolution sol = engine.solve_scenario(s);
        const auto rates = engine.component_rates(sol, s);
        std::copy(rates.begin(), rates.end(), store.row(r));
        store.fallback[r] = sol.fallback ? 1 : 0;
      } catch (const std::exception& ex) {
        store.failed[r] = 1;
        std::lock_guard<std::mutex> lock(fail_mu);
        failures.push_back({i, ex.what()});
        if (!cfg.skip_failures) abort.store(true, std::memory_order_relaxed);
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
}

void throw_first_failure(std::vector<ScenarioFailure>& failures) {
  if (failures.empty()) return;
  auto first = failures.front();
  for (const auto& f : failures)
    if (f.index < first.index) first = f;
  throw ModelingError("scenario " + std::to_string(first.index) + " failed: " +
                      first.message);
}

LevelResult run_level(const RunConfig& cfg, const Network& net, double penetration) {
  LevelResult level;
  level.penetration = penetration;
  level.samples = cfg.samples;

  const auto t_prep0 = std::chrono::steady_clock::now();
  const ScenarioEngine engine(net, cfg.mode, cfg.solver);
  const auto components = component_registry(net);
  const int nc = static_cast<int>(components.size());
  level.nodes_solved = engine.solve_node_count();
  const auto t_prep1 = std::chrono::steady_clock::now();
  level.prep_seconds = std::chrono::duration<double>(t_prep1 - t_prep0).count();

  const int workers = cfg.workers > 0
                          ? cfg.workers
                          : std::max(1u, std::thread::hardware_concurrency());
  const std::int64_t n = cfg.samples;
  const std::int64_t pilot = std::min<std::int64_t>(std::max<std::int64_t>(1, cfg.pilot_samples), n);

  const auto t0 = std::chrono::steady_clock::now();

  std::vector<ScenarioFailure> failures;
  RowStore pilot_rows;
  pilot_rows.resize(pilot, nc);
  evaluate_range(engine, cfg, 0, pilot, pilot_rows, nullptr, 0, workers, failures);
  if (!cfg.skip_failures) throw_first_failure(failures);

  std::vector<double> hi(nc, 0.0);
  for (std::int64_t i = 0; i < pilot; ++i) {
    if (pilot_rows.failed[i]) continue;
    const double* r = pilot_rows.row(i);
    for (int c = 0; c < nc; ++c) hi[c] = std::max(hi[c], r[c]);
  }
  level.stats.clear();
  level.stats.reserve(nc);
  for (int c = 0; c < nc; ++c) {
    const double top = hi[c] > 0.0 ? 1.05 * hi[c] : 1.0;
    level.stats.emplace_back(cfg.bins, 0.0, top);
  }

  RowStore chunk_rows;
  for (std::int64_t begin = 0; begin < n; begin += kChunk) {
    const std::int64_t end = std::min(n, begin + kChunk);
    chunk_rows.resize(end - begin, nc);
    evaluate_range(engine, cfg, begin, end, chunk_rows, &pilot_rows, pilot,
                   workers, failures);
    if (!cfg.skip_failures) throw_first_failure(failures);
    for (std::int64_t r = 0; r < end - begin; ++r) {
      if (chunk_rows.failed[r]) {
        ++level.failures;
        continue;
      }
      if (chunk_rows.fallback[r]) ++level.fallbacks;
      const double* row = chunk_rows.row(r);
      for (int c = 0; c < nc; ++c) level.stats[c].add(row[c]);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  level.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return level;
}

}  // namespace

ResultSet run_mcs(const RunConfig& cfg, const Network& net) {
  if (cfg.samples < 1) throw ModelingError("sample count must be >= 1");
  if (cfg.bins < 2) throw ModelingError("histogram bin count must be >= 2");

  ResultSet rs;
  rs.components = component_registry(net);
  if (cfg.penetrations.empty()) {
    rs.levels.push_back(run_level(cfg, net, -1.0));
  } else {
    for (double p : cfg.penetrations) {
      const Network scaled = scale_to_penetration(net, p);
      rs.levels.push_back(run_level(cfg, scaled, p));
    }
  }
  return rs;
}

}  // namespace carbontrace
