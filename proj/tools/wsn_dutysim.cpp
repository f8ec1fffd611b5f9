// wsn-dutysim: run and compare duty-cycled TDMA convergecast experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include "wsn/error.hpp"
#include "wsn/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw wsn::Error("cannot write " + path.string());
  return out;
}

void print_summary(const wsn::ComparisonReport& report) {
  std::cout << std::left << std::setw(6) << "tree" << std::right << std::setw(16) << "mean_energy_J"
            << std::setw(14) << "sd_energy_J" << std::setw(16) << "mean_latency_s" << std::setw(14)
            << "sd_latency_s" << '\n';
  for (const auto& s : report.summary) {
    std::cout << std::left << std::setw(6) << wsn::to_string(s.tree) << std::right << std::setw(16)
              << s.mean_energy << std::setw(14) << s.sd_energy << std::setw(16) << s.mean_latency
              << std::setw(14) << s.sd_latency << '\n';
  }
  std::cout << "winner: " << wsn::to_string(report.winner) << '\n';
}

void write_report(const wsn::ExperimentConfig& config, const wsn::ComparisonReport& report) {
  fs::create_directories(config.output_dir);
  auto results = open_out(config.output_dir / "results.csv");
  wsn::write_results_csv(results, report);
  auto summary = open_out(config.output_dir / "summary.csv");
  wsn::write_summary_csv(summary, report);
  auto resolved = open_out(config.output_dir / "config_resolved.txt");
  resolved << wsn::serialize_config(config);
}

int run_command(wsn::ExperimentConfig config, bool dump_cells) {
  fs::create_directories(config.output_dir);
  if (dump_cells) {
    for (auto seed : config.seeds) {
      const auto topo = wsn::generate_topology(config.topology_params(seed));
      auto out = open_out(config.output_dir / ("topology_seed" + std::to_string(seed) + ".csv"));
      wsn::write_topology_csv(out, topo);
    }
  }

  std::function<void(const wsn::CellResult&)> dump = [&](const wsn::CellResult& cell) {
    const std::string tag =
        std::string(wsn::to_string(cell.kind)) + "_seed" + std::to_string(cell.seed);
    const auto& dir = config.output_dir;
    auto tree = open_out(dir / ("tree_" + tag + ".csv"));
    wsn::write_tree_csv(tree, cell.tree);
    auto clusters = open_out(dir / ("clusters_" + tag + ".csv"));
    wsn::write_clusters_csv(clusters, cell.clusters);
    auto schedule = open_out(dir / ("schedule_" + tag + ".csv"));
    wsn::write_schedule_csv(schedule, cell.schedule);
    auto timeline = open_out(dir / ("timeline_" + tag + ".csv"));
    timeline << "node,start_s,end_s,state\n";
    for (wsn::NodeId v = 0; v < cell.tree.size(); ++v) {
      wsn::write_timeline_csv(timeline, v,
                              wsn::node_timeline(cell.schedule, cell.clusters, cell.tree, v, config.radio,
                                                 config.duty_cycle));
    }
    if (config.trace) {
      auto trace = open_out(dir / ("trace_" + tag + ".csv"));
      wsn::write_trace_csv(trace, cell.run.trace);
    }
  };

  const auto report =
      wsn::run_comparison(config, {}, 0, dump_cells ? dump : std::function<void(const wsn::CellResult&)>{});
  write_report(config, report);
  print_summary(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duty-cycled TDMA convergecast simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool trace = false;
  bool no_duty_cycle = false;

  auto* run = app.add_subcommand("run", "Run every (tree, seed) cell and dump per-cell artifacts");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_flag("--trace", trace, "Write per-cell event traces");
  run->add_flag("--no-duty-cycle", no_duty_cycle, "Keep radios listening through idle gaps");

  std::string compare_config;
  auto* compare = app.add_subcommand("compare", "Compare tree kinds and print the summary");
  compare->add_option("--config", compare_config, "Experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      auto config = wsn::load_config(config_path);
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (trace) config.trace = true;
      if (no_duty_cycle) config.duty_cycle = false;
      return run_command(std::move(config), true);
    }
    auto config = wsn::load_config(compare_config);
    return run_command(std::move(config), false);
  } catch (const wsn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
