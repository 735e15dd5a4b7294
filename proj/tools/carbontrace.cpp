// carbontrace: stochastic carbon-footprint tracing over power networks.
//
// Subcommands:
//   run             Monte Carlo carbon-footprint distributions to CSV
//   bench           full vs virtual-bus topology timing comparison
//   decompose       print the virtual-bus partition of a network
//   responsibility  per-component responsibility for one generator
//   synth           generate a synthetic test network file

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carbontrace/bench.hpp"
#include "carbontrace/errors.hpp"
#include "carbontrace/mcs.hpp"
#include "carbontrace/network.hpp"
#include "carbontrace/report.hpp"
#include "carbontrace/synthetic.hpp"
#include "carbontrace/version.hpp"

namespace ct = carbontrace;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

ct::IntensityMethod parse_solver(const std::string& s) {
  if (s == "auto") return ct::IntensityMethod::automatic;
  if (s == "sweep") return ct::IntensityMethod::sweep;
  if (s == "dense") return ct::IntensityMethod::dense;
  if (s == "sparse") return ct::IntensityMethod::sparse;
  throw ct::ParseError("unknown solver: " + s);
}

struct RunArgs {
  std::string network;
  std::string out_dir;
  std::string mode = "full";
  std::string solver = "auto";
  ct::RunConfig cfg;
};

int cmd_run(const RunArgs& args) {
  ct::Network net = ct::load_network(args.network);
  ct::RunConfig cfg = args.cfg;
  cfg.mode = args.mode == "virtual" ? ct::RunMode::virtual_bus : ct::RunMode::full;
  cfg.solver = parse_solver(args.solver);

  const ct::ResultSet rs = ct::run_mcs(cfg, net);

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  ct::write_summary_csv(dir / "summary.csv", rs);
  for (std::size_t level = 0; level < rs.levels.size(); ++level)
    ct::write_histogram_csv(dir / ("hist_" + std::to_string(level) + ".csv"), rs,
                            static_cast<int>(level));
  ct::write_metadata_json(dir / "metadata.json", cfg, rs, args.network);

  for (const auto& level : rs.levels) {
    std::cout << "penetration=" << (level.penetration < 0 ? std::string("as_built")
                                                          : ct::format_double(level.penetration))
              << " mean_total=" << ct::format_double(level.mean_total(rs.components))
              << " tCO2/h  wall=" << level.wall_seconds << "s";
    if (level.failures > 0) std::cout << "  skipped=" << level.failures;
    if (level.fallbacks > 0) std::cout << "  fallbacks=" << level.fallbacks;
    std::cout << "\n";
  }
  std::cout << "wrote " << (dir / "summary.csv").string() << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::string network;
  std::string out;
  std::string solver = "dense";
  ct::BenchConfig cfg;
};

int cmd_bench(const BenchArgs& args) {
  ct::Network net = ct::load_network(args.network);
  ct::BenchConfig cfg = args.cfg;
  cfg.solver = parse_solver(args.solver);

  const ct::BenchReport report = ct::run_bench(net, cfg);
  std::cout << ct::bench_table(report);
  if (!args.out.empty()) {
    ct::write_bench_csv(args.out, report);
    std::cout << "wrote " << args.out << "\n";
  }
  return kExitOk;
}

int cmd_decompose(const std::string& network, const std::string& out) {
  ct::Network net = ct::load_network(network);
  const ct::ScenarioEngine engine(net, ct::RunMode::full);
  const ct::ScenarioSample ref = ct::expected_scenario(net);
  const ct::ScenarioSolution sol = engine.solve_scenario(ref);
  const ct::Decomposition d = ct::decompose(sol.graph);
  if (out.empty()) {
    ct::write_partition_csv(std::cout, net, d);
  } else {
    std::ofstream os(out);
    if (!os) throw ct::ParseError("cannot write " + out);
    ct::write_partition_csv(os, net, d);
    std::cout << "wrote " << out << " (" << d.partition.n_blocks << " virtual buses)\n";
  }
  return kExitOk;
}

struct RespArgs {
  std::string network;
  std::string generator;
  std::string out;
  std::int64_t samples = 1000;
  std::uint64_t seed = 42;
};

int cmd_responsibility(const RespArgs& args) {
  ct::Network net = ct::load_network(args.network);
  const ct::ResponsibilityResult r =
      ct::run_responsibility(net, args.generator, args.samples, args.seed);
  const fs::path out = args.out.empty()
                           ? fs::path("responsibility_" + args.generator + ".csv")
                           : fs::path(args.out);
  ct::write_responsibility_csv(out, r);
  std::cout << "generator " << args.generator
            << " mean emission rate: " << ct::format_double(r.generator_mean_rate)
            << " tCO2/h over " << r.samples << " scenarios\n"
            << "wrote " << out.string() << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::string preset = "standard";
  ct::SyntheticConfig cfg;
};

int cmd_synth(const SynthArgs& args) {
  ct::Network net;
  if (args.preset == "standard")
    net = ct::build_synthetic(args.cfg);
  else if (args.preset == "fig3")
    net = ct::make_fig3_network();
  else if (args.preset == "two-bus")
    net = ct::make_two_bus_network();
  else
    throw ct::ParseError("unknown preset: " + args.preset);
  ct::require_valid(net);
  ct::save_network(net, args.out);
  std::cout << "wrote " << args.out << " (" << net.buses.size() << " buses, "
            << net.generators.size() << " generators)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic carbon-footprint tracing for power networks"};
  app.set_version_flag("--version", std::string(ct::kVersion) + " (" + ct::kGitDescribe + ")");
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Monte Carlo footprint distributions");
  run->add_option("--network", run_args.network, "network JSON file")->required();
  run->add_option("--samples", run_args.cfg.samples, "scenario count")->capture_default_str();
  run->add_option("--seed", run_args.cfg.seed, "master seed")->capture_default_str();
  run->add_option("--mode", run_args.mode, "full|virtual")->capture_default_str();
  run->add_option("--solver", run_args.solver, "auto|sweep|dense|sparse")->capture_default_str();
  run->add_option("--penetration", run_args.cfg.penetrations,
                  "RES penetration level, repeatable");
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  run->add_option("--workers", run_args.cfg.workers, "worker threads (0 = hardware)")
      ->envname("CARBONTRACE_WORKERS");
  run->add_flag("--skip-failures", run_args.cfg.skip_failures,
                "count failing scenarios instead of aborting");
  run->add_option("--bins", run_args.cfg.bins, "histogram bin count")->capture_default_str();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "full vs virtual timing comparison");
  bench->add_option("--network", bench_args.network, "network JSON file")->required();
  bench->add_option("--samples", bench_args.cfg.sample_counts,
                    "sample-count grid (default 1000 5000 10000 20000)");
  bench->add_option("--seed", bench_args.cfg.seed, "master seed")->capture_default_str();
  bench->add_option("--solver", bench_args.solver, "auto|sweep|dense|sparse")
      ->capture_default_str();
  bench->add_option("--workers", bench_args.cfg.workers, "worker threads")
      ->envname("CARBONTRACE_WORKERS");
  bench->add_option("--out", bench_args.out, "bench CSV path");

  std::string dec_network, dec_out;
  auto* dec = app.add_subcommand("decompose", "print the virtual-bus partition");
  dec->add_option("--network", dec_network, "network JSON file")->required();
  dec->add_option("--out", dec_out, "partition CSV path (default: stdout)");

  RespArgs resp_args;
  auto* resp = app.add_subcommand("responsibility",
                                  "load-side responsibility for one generator");
  resp->add_option("--network", resp_args.network, "network JSON file")->required();
  resp->add_option("--generator", resp_args.generator, "generator id")->required();
  resp->add_option("--samples", resp_args.samples, "scenario count")->capture_default_str();
  resp->add_option("--seed", resp_args.seed, "master seed")->capture_default_str();
  resp->add_option("--out", resp_args.out, "output CSV path");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic network file");
  synth->add_option("--out", synth_args.out, "output network JSON path")->required();
  synth->add_option("--preset", synth_args.preset, "standard|fig3|two-bus")
      ->capture_default_str();
  synth->add_option("--feeders", synth_args.cfg.n_feeders, "feeder count")
      ->capture_default_str();
  synth->add_option("--der-per-feeder", synth_args.cfg.der_per_feeder,
                    "PV units per feeder")->capture_default_str();
  synth->add_option("--der-fraction", synth_args.cfg.der_capacity_fraction,
                    "PV capacity as fraction of local load")->capture_default_str();
  synth->add_option("--penetration", synth_args.cfg.penetration,
                    "expected RES energy share")->capture_default_str();
  synth->add_option("--seed", synth_args.cfg.seed, "placement seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (dec->parsed()) return cmd_decompose(dec_network, dec_out);
    if (resp->parsed()) return cmd_responsibility(resp_args);
    if (synth->parsed()) return cmd_synth(synth_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  } catch (const ct::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ct::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ct::ModelingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ct::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
