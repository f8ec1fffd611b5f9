#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsn/radio.hpp"
#include "wsn/scheduler.hpp"
#include "wsn/simkernel.hpp"
#include "wsn/topology.hpp"
#include "wsn/tree.hpp"

namespace wsn {

/// Everything one experiment needs. Text form is flat `key = value` lines,
/// see README for keys and units.
struct ExperimentConfig {
  std::size_t nodes = 0;
  double width = 0.0;
  double height = 0.0;
  double comm_range = 0.0;
  double interference_factor = 2.0;
  std::optional<Point> base_station;
  int max_attempts = 1000;

  RadioProfile radio;

  std::vector<TreeKind> trees = {TreeKind::Bfs, TreeKind::Spt, TreeKind::Mst};
  std::size_t frames = 100;
  std::vector<std::uint64_t> seeds;
  std::optional<double> slot_duration;  // unset: sized per tree
  double aggregation_ratio = 1.0;
  SensingKind sensing = SensingKind::EveryFrame;
  double sensing_probability = 1.0;
  double initial_energy = 2.0;
  std::filesystem::path output_dir = "results";
  bool duty_cycle = true;
  bool trace = false;

  TopologyParams topology_params(std::uint64_t seed) const;
  SimOptions sim_options(std::uint64_t seed) const;

  /// Range and consistency checks that do not need a topology.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every key, defaults included. parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Knobs the acceptance checks flip relative to the configured scenario.
struct CellVariant {
  bool duty_cycle = true;
  bool spatial_reuse = true;
};

struct CellResult {
  TreeKind kind;
  std::uint64_t seed;
  Tree tree;
  std::vector<Cluster> clusters;
  Schedule schedule;
  RunResult run;
};

/// tree -> clusters -> weights + slots -> simulation for one topology.
/// Throws ConfigError when a fixed slot_duration cannot hold the largest
/// cluster.
CellResult run_cell(const ExperimentConfig& config, const Topology& topo, TreeKind kind,
                    std::uint64_t seed, const CellVariant& variant = {});

struct ResultRow {
  TreeKind tree;
  std::uint64_t seed;
  Metrics metrics;
};

struct SummaryRow {
  TreeKind tree;
  double mean_energy;
  double sd_energy;
  double mean_latency;
  double sd_latency;
};

struct ComparisonReport {
  std::vector<ResultRow> rows;  // kinds in config order, seeds in config order
  std::vector<SummaryRow> summary;
  TreeKind winner;
};

/// Worker count: WSN_SIM_THREADS if set and positive, else hardware threads.
std::size_t worker_threads();

/// Every (kind, seed) cell on a shared per-seed topology. `on_cell` sees each
/// finished cell, one call at a time, in completion order.
ComparisonReport run_comparison(const ExperimentConfig& config, const CellVariant& variant = {},
                                std::size_t threads = 0,
                                const std::function<void(const CellResult&)>& on_cell = {});

/// Mean and sample standard deviation per kind; winner has the lowest mean energy.
ComparisonReport summarize(std::vector<ResultRow> rows, const std::vector<TreeKind>& kinds);

void write_results_csv(std::ostream& out, const ComparisonReport& report);
void write_summary_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace wsn
