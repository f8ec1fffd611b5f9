#include "wsn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"

namespace wsn {

TopologyParams ExperimentConfig::topology_params(std::uint64_t seed) const {
  TopologyParams p;
  p.nodes = nodes;
  p.width = width;
  p.height = height;
  p.comm_range = comm_range;
  p.interference_factor = interference_factor;
  p.seed = seed;
  p.base_station = base_station;
  p.max_attempts = max_attempts;
  return p;
}

SimOptions ExperimentConfig::sim_options(std::uint64_t seed) const {
  SimOptions o;
  o.frames = frames;
  o.sensing.kind = sensing;
  o.sensing.probability = sensing_probability;
  o.sensing.seed = seed;
  o.initial_energy = initial_energy;
  o.aggregation_ratio = aggregation_ratio;
  o.duty_cycle = duty_cycle;
  return o;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be > 0");
  };
  if (nodes < 2) throw ConfigError("nodes must be >= 2");
  positive(width, "width");
  positive(height, "height");
  positive(comm_range, "comm_range");
  if (!(interference_factor >= 1.0)) throw ConfigError("interference_factor must be >= 1");
  if (base_station && !(base_station->x >= 0.0 && base_station->x <= width &&
                        base_station->y >= 0.0 && base_station->y <= height)) {
    throw ConfigError("base_x/base_y must lie inside the field");
  }
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  radio.validate();
  if (trees.empty()) throw ConfigError("trees must name at least one tree kind");
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (slot_duration) {
    positive(*slot_duration, "slot_duration");
    if (!(radio.t_sleep_to_active < *slot_duration && radio.t_active_to_sleep < *slot_duration)) {
      throw ConfigError("slot_duration must exceed t_sleep_to_active and t_active_to_sleep");
    }
  }
  if (!(aggregation_ratio > 0.0 && aggregation_ratio <= 1.0)) {
    throw ConfigError("aggregation_ratio must be in (0, 1]");
  }
  if (!(sensing_probability >= 0.0 && sensing_probability <= 1.0)) {
    throw ConfigError("sensing_probability must be in [0, 1]");
  }
  positive(initial_energy, "initial_energy");
}

namespace {

std::uint64_t parse_uint(std::string_view text) {
  text = csv::trim(text);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error("not a non-negative integer: '" + std::string(text) + "'");
  }
  return std::stoull(std::string(text));
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw Error("not a boolean: '" + std::string(text) + "'");
}

// "1..20" ranges and comma lists, mixed freely.
std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : csv::split(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_uint(item));
      continue;
    }
    const auto lo = parse_uint(std::string_view(item).substr(0, dots));
    const auto hi = parse_uint(std::string_view(item).substr(dots + 2));
    if (hi < lo) throw Error("empty seed range '" + item + "'");
    if (hi - lo > 1000000) throw Error("seed range too large");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

std::string_view sensing_name(SensingKind kind) {
  return kind == SensingKind::EveryFrame ? "every-frame" : "bernoulli";
}

using Setter = void (*)(ExperimentConfig&, std::string_view);

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"nodes", [](ExperimentConfig& c, std::string_view v) { c.nodes = parse_uint(v); }},
      {"width", [](ExperimentConfig& c, std::string_view v) { c.width = csv::parse_double(v); }},
      {"height", [](ExperimentConfig& c, std::string_view v) { c.height = csv::parse_double(v); }},
      {"comm_range", [](ExperimentConfig& c, std::string_view v) { c.comm_range = csv::parse_double(v); }},
      {"interference_factor",
       [](ExperimentConfig& c, std::string_view v) { c.interference_factor = csv::parse_double(v); }},
      {"base_x",
       [](ExperimentConfig& c, std::string_view v) {
         if (!c.base_station) c.base_station = Point{};
         c.base_station->x = csv::parse_double(v);
       }},
      {"base_y",
       [](ExperimentConfig& c, std::string_view v) {
         if (!c.base_station) c.base_station = Point{};
         c.base_station->y = csv::parse_double(v);
       }},
      {"max_attempts",
       [](ExperimentConfig& c, std::string_view v) {
         const auto n = parse_uint(v);
         if (n > 1000000000) throw Error("too large");
         c.max_attempts = static_cast<int>(n);
       }},
      {"p_listen", [](ExperimentConfig& c, std::string_view v) { c.radio.p_listen = csv::parse_double(v); }},
      {"p_receive", [](ExperimentConfig& c, std::string_view v) { c.radio.p_receive = csv::parse_double(v); }},
      {"p_sleep", [](ExperimentConfig& c, std::string_view v) { c.radio.p_sleep = csv::parse_double(v); }},
      {"e_elec", [](ExperimentConfig& c, std::string_view v) { c.radio.e_elec = csv::parse_double(v); }},
      {"e_amp", [](ExperimentConfig& c, std::string_view v) { c.radio.e_amp = csv::parse_double(v); }},
      {"t_sleep_to_active",
       [](ExperimentConfig& c, std::string_view v) { c.radio.t_sleep_to_active = csv::parse_double(v); }},
      {"t_active_to_sleep",
       [](ExperimentConfig& c, std::string_view v) { c.radio.t_active_to_sleep = csv::parse_double(v); }},
      {"bitrate", [](ExperimentConfig& c, std::string_view v) { c.radio.bitrate = csv::parse_double(v); }},
      {"packet_bits", [](ExperimentConfig& c, std::string_view v) { c.radio.packet_bits = csv::parse_double(v); }},
      {"trees",
       [](ExperimentConfig& c, std::string_view v) {
         c.trees.clear();
         for (const auto& item : csv::split(v)) {
           const auto kind = parse_tree_kind(item);
           if (std::find(c.trees.begin(), c.trees.end(), kind) != c.trees.end()) {
             throw Error("tree kind listed twice");
           }
           c.trees.push_back(kind);
         }
       }},
      {"frames", [](ExperimentConfig& c, std::string_view v) { c.frames = parse_uint(v); }},
      {"seeds", [](ExperimentConfig& c, std::string_view v) { c.seeds = parse_seeds(v); }},
      {"slot_duration",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "auto") {
           c.slot_duration.reset();
         } else {
           c.slot_duration = csv::parse_double(v);
         }
       }},
      {"aggregation_ratio",
       [](ExperimentConfig& c, std::string_view v) { c.aggregation_ratio = csv::parse_double(v); }},
      {"sensing",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "every-frame") {
           c.sensing = SensingKind::EveryFrame;
         } else if (v == "bernoulli") {
           c.sensing = SensingKind::Bernoulli;
         } else {
           throw Error("expected every-frame or bernoulli");
         }
       }},
      {"sensing_probability",
       [](ExperimentConfig& c, std::string_view v) { c.sensing_probability = csv::parse_double(v); }},
      {"initial_energy",
       [](ExperimentConfig& c, std::string_view v) { c.initial_energy = csv::parse_double(v); }},
      {"output_dir", [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); }},
      {"duty_cycle", [](ExperimentConfig& c, std::string_view v) { c.duty_cycle = parse_bool(v); }},
      {"trace", [](ExperimentConfig& c, std::string_view v) { c.trace = parse_bool(v); }},
  };
  return table;
}

// Which keys each validation message is about, for line attribution.
const std::vector<std::pair<std::string, std::vector<std::string>>>& message_keys() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"p_sleep must be below p_listen", {"p_sleep", "p_listen"}},
      {"base_x/base_y", {"base_x", "base_y"}},
      {"slot_duration must exceed", {"slot_duration", "t_sleep_to_active", "t_active_to_sleep"}},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  std::map<std::string, std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = csv::trim(text);
    if (text.empty()) continue;

    const auto where = origin + ":" + std::to_string(line_no);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(csv::trim(text.substr(0, eq)));
    const auto value = csv::trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");

    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (line_of.count(key)) {
      throw ConfigError(where + ": key '" + key + "' repeated (first on line " +
                        std::to_string(line_of[key]) + ")");
    }
    line_of[key] = line_no;
    try {
      it->second(config, value);
    } catch (const Error& e) {
      throw ConfigError(where + ": key '" + key + "': " + e.what());
    }
  }
  if (in.bad()) throw ConfigError(origin + ": read error");

  for (const char* required : {"nodes", "width", "height", "comm_range", "seeds"}) {
    if (!line_of.count(required)) {
      throw ConfigError(origin + ": missing required key '" + std::string(required) + "'");
    }
  }
  if (line_of.count("base_x") != line_of.count("base_y")) {
    throw ConfigError(origin + ": base_x and base_y must be given together");
  }

  try {
    config.validate();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    std::vector<std::string> keys;
    for (const auto& [prefix, ks] : message_keys()) {
      if (msg.rfind(prefix, 0) == 0) keys = ks;
    }
    if (keys.empty()) keys.push_back(msg.substr(0, msg.find(' ')));
    std::string where = origin;
    std::string names;
    for (const auto& k : keys) {
      names += (names.empty() ? "" : ", ") + ("'" + k + "'");
      if (line_of.count(k)) where += ":" + std::to_string(line_of[k]);
    }
    throw ConfigError(where + ": key " + names + ": " + msg);
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse_config(in, path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return csv::format_number(v); };
  out << "# topology\n";
  out << "nodes = " << c.nodes << "\n";
  out << "width = " << num(c.width) << "  # m\n";
  out << "height = " << num(c.height) << "  # m\n";
  out << "comm_range = " << num(c.comm_range) << "  # m\n";
  out << "interference_factor = " << num(c.interference_factor) << "\n";
  if (c.base_station) {
    out << "base_x = " << num(c.base_station->x) << "  # m\n";
    out << "base_y = " << num(c.base_station->y) << "  # m\n";
  }
  out << "max_attempts = " << c.max_attempts << "\n";
  out << "# radio\n";
  out << "p_listen = " << num(c.radio.p_listen) << "  # W\n";
  out << "p_receive = " << num(c.radio.p_receive) << "  # W\n";
  out << "p_sleep = " << num(c.radio.p_sleep) << "  # W\n";
  out << "e_elec = " << num(c.radio.e_elec) << "  # J/bit\n";
  out << "e_amp = " << num(c.radio.e_amp) << "  # J/bit/m^2\n";
  out << "t_sleep_to_active = " << num(c.radio.t_sleep_to_active) << "  # s\n";
  out << "t_active_to_sleep = " << num(c.radio.t_active_to_sleep) << "  # s\n";
  out << "bitrate = " << num(c.radio.bitrate) << "  # bit/s\n";
  out << "packet_bits = " << num(c.radio.packet_bits) << "  # bit\n";
  out << "# experiment\n";
  out << "trees = ";
  for (std::size_t i = 0; i < c.trees.size(); ++i) out << (i ? "," : "") << to_string(c.trees[i]);
  out << "\nframes = " << c.frames << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
  out << "\nslot_duration = " << (c.slot_duration ? num(*c.slot_duration) : std::string("auto"))
      << "  # s\n";
  out << "aggregation_ratio = " << num(c.aggregation_ratio) << "\n";
  out << "sensing = " << sensing_name(c.sensing) << "\n";
  out << "sensing_probability = " << num(c.sensing_probability) << "\n";
  out << "initial_energy = " << num(c.initial_energy) << "  # J\n";
  out << "output_dir = " << c.output_dir.string() << "\n";
  out << "duty_cycle = " << (c.duty_cycle ? "true" : "false") << "\n";
  out << "trace = " << (c.trace ? "true" : "false") << "\n";
  return out.str();
}

CellResult run_cell(const ExperimentConfig& config, const Topology& topo, TreeKind kind,
                    std::uint64_t seed, const CellVariant& variant) {
  Tree tree = build_tree(topo, kind);
  std::vector<Cluster> clusters = form_clusters(tree);
  const auto interferes = variant.spatial_reuse ? InterferenceMatrix(topo, clusters)
                                                : InterferenceMatrix::serial(clusters.size());

  const double needed = required_slot_duration(
      clusters, worst_case_packets(tree, config.aggregation_ratio), config.radio);
  const double slot = config.slot_duration.value_or(needed);
  if (slot < needed) {
    throw ConfigError("slot_duration " + csv::format_number(slot) + " s is too short for the " +
                      std::string(to_string(kind)) + " tree (largest cluster needs " +
                      csv::format_number(needed) + " s)");
  }

  Schedule schedule = schedule_clusters(tree, clusters, interferes, slot);
  SimOptions options = config.sim_options(seed);
  options.duty_cycle = config.duty_cycle && variant.duty_cycle;
  RunResult run = run_simulation(topo, tree, clusters, schedule, config.radio, options);
  return {kind, seed, std::move(tree), std::move(clusters), std::move(schedule), std::move(run)};
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("WSN_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ComparisonReport run_comparison(const ExperimentConfig& config, const CellVariant& variant,
                                std::size_t threads,
                                const std::function<void(const CellResult&)>& on_cell) {
  config.validate();
  if (threads == 0) threads = worker_threads();

  std::vector<Topology> topologies;
  topologies.reserve(config.seeds.size());
  for (auto seed : config.seeds) {
    try {
      topologies.push_back(generate_topology(config.topology_params(seed)));
    } catch (const Error& e) {
      throw Error("seed " + std::to_string(seed) + ": " + e.what());
    }
  }

  struct Cell {
    std::size_t kind_index;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < config.trees.size(); ++k) {
    for (std::size_t s = 0; s < config.seeds.size(); ++s) cells.push_back({k, s});
  }

  std::vector<std::optional<Metrics>> metrics(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto kind = config.trees[cells[i].kind_index];
      const auto seed = config.seeds[cells[i].seed_index];
      const std::string context =
          "seed " + std::to_string(seed) + ", tree " + std::string(to_string(kind)) + ": ";
      try {
        CellResult cell = run_cell(config, topologies[cells[i].seed_index], kind, seed, variant);
        if (on_cell) {
          std::lock_guard lock(callback_mutex);
          on_cell(cell);
        }
        metrics[i] = std::move(cell.run.metrics);
      } catch (const ConfigError& e) {
        failures[i] = std::make_exception_ptr(ConfigError(context + e.what()));
      } catch (const std::exception& e) {
        failures[i] = std::make_exception_ptr(Error(context + e.what()));
      }
    }
  };

  const std::size_t count = std::min(threads, cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<ResultRow> rows;
  rows.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rows.push_back({config.trees[cells[i].kind_index], config.seeds[cells[i].seed_index],
                    std::move(*metrics[i])});
  }
  return summarize(std::move(rows), config.trees);
}

ComparisonReport summarize(std::vector<ResultRow> rows, const std::vector<TreeKind>& kinds) {
  if (kinds.empty()) throw Error("no tree kinds to summarise");
  ComparisonReport report;
  report.rows = std::move(rows);

  auto mean_sd = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
  };

  for (auto kind : kinds) {
    std::vector<double> energy;
    std::vector<double> latency;
    for (const auto& r : report.rows) {
      if (r.tree != kind) continue;
      energy.push_back(r.metrics.total_energy);
      latency.push_back(r.metrics.mean_delivery_latency);
    }
    if (energy.empty()) throw Error("no rows for tree " + std::string(to_string(kind)));
    const auto [me, se] = mean_sd(energy);
    const auto [ml, sl] = mean_sd(latency);
    report.summary.push_back({kind, me, se, ml, sl});
  }
  const auto best = std::min_element(
      report.summary.begin(), report.summary.end(),
      [](const SummaryRow& a, const SummaryRow& b) { return a.mean_energy < b.mean_energy; });
  report.winner = best->tree;
  return report;
}

void write_results_csv(std::ostream& out, const ComparisonReport& report) {
  out << "tree,seed,total_energy_J,mean_latency_s,packets_delivered,first_death_s,frames_run\n";
  for (const auto& r : report.rows) {
    const auto& m = r.metrics;
    out << to_string(r.tree) << ',' << r.seed << ',' << csv::format_number(m.total_energy) << ','
        << csv::format_number(m.mean_delivery_latency) << ',' << m.packets_delivered << ','
        << (m.first_death_time ? csv::format_number(*m.first_death_time) : std::string()) << ','
        << m.frames_run << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
  out << "tree,mean_energy_J,sd_energy_J,mean_latency_s,sd_latency_s\n";
  for (const auto& s : report.summary) {
    out << to_string(s.tree) << ',' << csv::format_number(s.mean_energy) << ','
        << csv::format_number(s.sd_energy) << ',' << csv::format_number(s.mean_latency) << ','
        << csv::format_number(s.sd_latency) << '\n';
  }
}

}  // namespace wsn
