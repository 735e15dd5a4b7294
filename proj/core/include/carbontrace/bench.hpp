#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "carbontrace/mcs.hpp"

namespace carbontrace {

struct BenchRow {
  std::int64_t samples = 0;
  double full_seconds = 0.0;
  double virtual_seconds = 0.0;
  double speedup = 0.0;  // full / virtual
  int nodes_full = 0;
  int nodes_virtual = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double equivalence_max_abs_diff = 0.0;  // per-bus intensity probe
};

struct BenchConfig {
  std::vector<std::int64_t> sample_counts{1000, 5000, 10000, 20000};
  std::uint64_t seed = 42;
  // Node-matrix methodology: both modes solve the intensity system as a
  // dense matrix of their node count, which is what the contraction
  // shrinks. Pass sweep/sparse to compare other backends.
  IntensityMethod solver = IntensityMethod::dense;
  int workers = 0;
  std::int64_t warmup_samples = 200;
  int probe_scenarios = 10;          // pre-timing per-bus equivalence check
  double probe_tolerance = 1e-10;    // absolute, tCO2/MWh
  double mean_tolerance = 1e-9;      // relative, per-component means
};

/// Times the scenario loop of both modes on identical seeds for each
/// sample count. Mode equivalence is verified before any timing is
/// accepted (per-bus intensities on probe scenarios, then per-component
/// means of the timed runs); a failed check raises NumericalError instead
/// of producing a report. The warm-up run is discarded.
BenchReport run_bench(const Network& net, const BenchConfig& cfg);

/// Coefficient of determination of the least-squares line y ~ a + b x.
double linear_r2(std::span<const double> x, std::span<const double> y);

}  // namespace carbontrace
