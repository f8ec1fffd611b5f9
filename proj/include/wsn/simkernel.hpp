#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsn/clustering.hpp"
#include "wsn/radio.hpp"
#include "wsn/scheduler.hpp"
#include "wsn/topology.hpp"
#include "wsn/tree.hpp"

namespace wsn {

enum class SensingKind { EveryFrame, Bernoulli };

/// Which leaves produce a reading at the start of each frame. The Bernoulli
/// draw is a pure function of (seed, frame, node), so different trees over
/// the same topology see the same sensing stream.
struct SensingModel {
  SensingKind kind = SensingKind::EveryFrame;
  double probability = 1.0;
  std::uint64_t seed = 0;

  bool senses(std::size_t frame, NodeId node) const;
};

struct SimOptions {
  std::size_t frames = 100;
  SensingModel sensing;
  double initial_energy = 2.0;     // J per node
  double aggregation_ratio = 1.0;  // 1 = everything merges into one packet
  bool duty_cycle = true;
  bool record_trace = true;
};

/// Packets a head forwards after merging `incoming` packets.
std::size_t aggregate_packets(std::size_t incoming, double ratio);

/// Worst-case packets each node sends per frame (every leaf sensing).
std::vector<std::size_t> worst_case_packets(const Tree& tree, double ratio);

/// Ordering key of the event queue: time, then kind rank, then node.
enum class EventKind { PacketDelivered = 0, Sense = 1, SlotStart = 2 };

struct SimEvent {
  double time;
  EventKind kind;
  std::uint32_t node;  // node for Sense/PacketDelivered, slot for SlotStart
  std::size_t frame;
  std::size_t payload = 0;  // in-flight delivery index for PacketDelivered

  friend bool operator>(const SimEvent& a, const SimEvent& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.node > b.node;
  }
};

struct Metrics {
  double total_energy = 0.0;
  std::vector<double> per_node_energy;
  double mean_delivery_latency = 0.0;  // NaN when nothing was delivered
  std::size_t packets_delivered = 0;
  std::size_t readings_sensed = 0;
  std::size_t readings_delivered = 0;
  std::optional<double> first_death_time;
  std::size_t frames_run = 0;
};

struct StateRecord {
  NodeId node;
  double start;
  double end;
  RadioState state;
};

struct TxRecord {
  NodeId from;
  NodeId to;
  double start;
  double end;
  std::size_t packets;
};

struct DeliveryRecord {
  NodeId origin;
  double sensed_at;
  double delivered_at;
  std::vector<NodeId> path;  // origin ... base station
};

struct Trace {
  double horizon = 0.0;  // end of the last simulated slot
  std::vector<StateRecord> states;
  std::vector<TxRecord> transmissions;
  std::vector<DeliveryRecord> deliveries;
  std::vector<std::pair<double, NodeId>> senses;
};

struct RunResult {
  Metrics metrics;
  std::vector<EnergyLedger> ledgers;
  Trace trace;
};

/// Runs `options.frames` frames of the schedule. Stops after the slot in
/// which a battery-powered node (anything but the base station) runs out.
RunResult run_simulation(const Topology& topo, const Tree& tree,
                         const std::vector<Cluster>& clusters, const Schedule& schedule,
                         const RadioProfile& profile, const SimOptions& options);

enum class ViolationKind { Exclusivity, Collision, Conservation, Path };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

/// Empty when state coverage is exclusive and gap-free, no two transmitters
/// in interference range overlap in time, every ledger balances, and every
/// delivery followed tree parents.
std::vector<Violation> audit_trace(const Topology& topo, const Tree& tree, const RunResult& run);

/// `time_s,node,event,detail` rows, time-ordered.
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace wsn
