#include "carbontrace/bench.hpp"

#include <cmath>
#include <cstdio>

#include "carbontrace/errors.hpp"

namespace carbontrace {

namespace {

double probe_equivalence(const Network& net, const BenchConfig& cfg) {
  const ScenarioEngine full(net, RunMode::full, cfg.solver);
  const ScenarioEngine contracted(net, RunMode::virtual_bus, cfg.solver);
  double worst = 0.0;
  for (int i = 0; i < cfg.probe_scenarios; ++i) {
    const ScenarioSample s = sample_scenario(net, i, cfg.seed);
    const auto a = full.solve_scenario(s);
    const auto b = contracted.solve_scenario(s);
    for (std::size_t k = 0; k < a.carbon.bus_intensity.size(); ++k)
      worst = std::max(worst, std::abs(a.carbon.bus_intensity[k] -
                                       b.carbon.bus_intensity[k]));
  }
  if (worst > cfg.probe_tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mode equivalence probe failed: max per-bus intensity "
                  "difference %.3e exceeds %.3e",
                  worst, cfg.probe_tolerance);
    throw NumericalError(buf);
  }
  return worst;
}

void check_mean_equivalence(const ResultSet& full, const ResultSet& contracted,
                            double tol) {
  const auto& fs = full.levels.front().stats;
  const auto& vs = contracted.levels.front().stats;
  for (std::size_t c = 0; c < fs.size(); ++c) {
    const double scale = std::max({1.0, std::abs(fs[c].mean()), std::abs(vs[c].mean())});
    if (std::abs(fs[c].mean() - vs[c].mean()) > tol * scale) {
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "mode equivalence failed on component '%s': full mean %.12g "
                    "vs virtual mean %.12g",
                    full.components[c].id.c_str(), fs[c].mean(), vs[c].mean());
      throw NumericalError(buf);
    }
  }
}

}  // namespace

BenchReport run_bench(const Network& net, const BenchConfig& cfg) {
  BenchReport report;
  report.equivalence_max_abs_diff = probe_equivalence(net, cfg);

  RunConfig base;
  base.seed = cfg.seed;
  base.solver = cfg.solver;
  base.workers = cfg.workers;

  // warm-up, discarded
  {
    RunConfig warm = base;
    warm.samples = std::max<std::int64_t>(1, cfg.warmup_samples);
    warm.mode = RunMode::virtual_bus;
    run_mcs(warm, net);
  }

  for (std::int64_t n : cfg.sample_counts) {
    RunConfig fc = base;
    fc.samples = n;
    fc.mode = RunMode::full;
    const ResultSet full = run_mcs(fc, net);

    RunConfig vc = base;
    vc.samples = n;
    vc.mode = RunMode::virtual_bus;
    const ResultSet contracted = run_mcs(vc, net);

    check_mean_equivalence(full, contracted, cfg.mean_tolerance);

    BenchRow row;
    row.samples = n;
    row.full_seconds = full.levels.front().wall_seconds;
    row.virtual_seconds = contracted.levels.front().wall_seconds;
    row.speedup = row.virtual_seconds > 0.0 ? row.full_seconds / row.virtual_seconds : 0.0;
    row.nodes_full = full.levels.front().nodes_solved;
    row.nodes_virtual = contracted.levels.front().nodes_solved;
    report.rows.push_back(row);
  }
  return report;
}

double linear_r2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace carbontrace
