#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "carbontrace/bench.hpp"
#include "carbontrace/mcs.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/virtual_bus.hpp"

namespace carbontrace {

/// Deterministic shortest-faithful formatting ("%.17g").
std::string format_double(double v);

/// summary.csv: one row per (penetration level, component) with moments
/// and histogram quantiles.
void write_summary_csv(const std::filesystem::path& path, const ResultSet& rs);

/// hist_<level>.csv: long-format empirical PDF/CDF per component.
void write_histogram_csv(const std::filesystem::path& path, const ResultSet& rs,
                         int level);

/// Run metadata sidecar (seed, sample count, mode, timings). Timing lives
/// here so the data CSVs stay byte-identical across reruns.
void write_metadata_json(const std::filesystem::path& path, const RunConfig& cfg,
                         const ResultSet& rs, const std::string& network_file);

void write_bench_csv(const std::filesystem::path& path, const BenchReport& report);

std::string bench_table(const BenchReport& report);

/// bus_id, virtual_bus_id, is_start. Blocks are labelled by their start
/// bus id.
void write_partition_csv(std::ostream& os, const Network& net, const Decomposition& d);

struct ResponsibilityResult {
  std::string generator;
  std::int64_t samples = 0;
  std::vector<ComponentInfo> components;  // loads, EV stations, losses
  std::vector<double> mean_fraction;      // share of the component's power from the target
  std::vector<double> mean_rate;          // responsibility, tCO2/h
  double generator_mean_rate = 0.0;       // mean P_G x e_G of the target
  double responsibility_total = 0.0;      // sum of mean rates
};

/// Monte Carlo responsibility tracing for one generator: per scenario the
/// mixing system is re-solved with the target's intensity pinned to one,
/// giving each component's share of the target's emissions. Verifies that
/// allocated responsibility matches the generator's emission rate within
/// 1e-9 relative and throws NumericalError otherwise.
ResponsibilityResult run_responsibility(const Network& net, const std::string& gen_id,
                                        std::int64_t samples, std::uint64_t seed);

void write_responsibility_csv(const std::filesystem::path& path,
                              const ResponsibilityResult& r);

}  // namespace carbontrace
