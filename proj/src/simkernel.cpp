#include "wsn/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"

namespace wsn {

namespace {

constexpr auto kNone = static_cast<std::size_t>(-1);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Reading {
  NodeId origin;
  double sensed_at;
  std::vector<NodeId> path;
};

struct InFlight {
  std::vector<Reading> readings;
  std::size_t packets;
};

void check_consistency(const Topology& topo, const Tree& tree, const std::vector<Cluster>& clusters,
                       const Schedule& schedule) {
  if (tree.size() != topo.size()) throw Error("schedule/tree mismatch: tree size differs from topology");
  validate_tree(topo, tree);
  const auto expected = form_clusters(tree);
  if (expected.size() != clusters.size()) throw Error("schedule/tree mismatch: cluster count");
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].id != i || clusters[i].head != expected[i].head ||
        clusters[i].members != expected[i].members) {
      throw Error("schedule/tree mismatch: cluster " + std::to_string(i));
    }
  }
  if (schedule.assignment.size() != clusters.size()) {
    throw Error("schedule/tree mismatch: assignment size");
  }
  if (!(schedule.slot_duration > 0.0)) throw Error("slot_duration must be positive");
  std::vector<std::size_t> seen(clusters.size(), 0);
  for (std::size_t s = 0; s < schedule.frame.size(); ++s) {
    for (ClusterId c : schedule.frame[s]) {
      if (c >= clusters.size() || schedule.assignment[c] != s) {
        throw Error("schedule/tree mismatch: frame and assignment disagree");
      }
      ++seen[c];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](std::size_t k) { return k != 1; })) {
    throw Error("schedule/tree mismatch: every cluster needs exactly one slot");
  }
  const auto heads = head_index(clusters, tree.size());
  for (const auto& c : clusters) {
    for (NodeId m : c.members) {
      if (heads[m] != kNone && schedule.assignment[heads[m]] >= schedule.assignment[c.id]) {
        throw Error("schedule/tree mismatch: cluster " + std::to_string(c.id) +
                    " is not scheduled after its members' clusters");
      }
    }
  }
}

}  // namespace

bool SensingModel::senses(std::size_t frame, NodeId node) const {
  if (kind == SensingKind::EveryFrame) return true;
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(frame) << 32) ^ node));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < probability;
}

std::size_t aggregate_packets(std::size_t incoming, double ratio) {
  if (incoming == 0) return 0;
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("aggregation_ratio must be in (0, 1]");
  return 1 + static_cast<std::size_t>(std::ceil((1.0 - ratio) * static_cast<double>(incoming - 1)));
}

std::vector<std::size_t> worst_case_packets(const Tree& tree, double ratio) {
  std::vector<NodeId> order(tree.size());
  for (NodeId v = 0; v < tree.size(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return tree.depth(a) > tree.depth(b); });
  std::vector<std::size_t> incoming(tree.size(), 0);
  std::vector<std::size_t> out(tree.size(), 0);
  for (NodeId v : order) {
    if (v == kBaseStation) continue;
    const std::size_t in = tree.is_leaf(v) ? 1 : incoming[v];
    out[v] = aggregate_packets(in, ratio);
    incoming[tree.parent(v)] += out[v];
  }
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Exclusivity: return "exclusivity";
    case ViolationKind::Collision: return "collision";
    case ViolationKind::Conservation: return "conservation";
    case ViolationKind::Path: return "path";
  }
  return "?";
}

RunResult run_simulation(const Topology& topo, const Tree& tree,
                         const std::vector<Cluster>& clusters, const Schedule& schedule,
                         const RadioProfile& profile, const SimOptions& options) {
  if (options.frames == 0) throw Error("frames must be at least 1");
  check_consistency(topo, tree, clusters, schedule);

  const std::size_t n = topo.size();
  const std::size_t frame_len = schedule.frame_length();
  const double sd = schedule.slot_duration;
  const double airtime = profile.packet_airtime();
  const double bits = profile.packet_bits;

  {
    const double needed = required_slot_duration(
        clusters, worst_case_packets(tree, options.aggregation_ratio), profile);
    if (sd < needed) {
      throw Error("slot_duration " + csv::format_number(sd) + " s cannot hold the largest cluster (" +
                  csv::format_number(needed) + " s needed)");
    }
  }

  // Timeline intervals keyed by the slot they begin in.
  std::vector<NodeTimeline> timelines(n);
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> starting(frame_len);
  for (NodeId v = 0; v < n; ++v) {
    timelines[v] = node_timeline(schedule, clusters, tree, v, profile, options.duty_cycle);
    for (std::size_t i = 0; i < timelines[v].size(); ++i) {
      starting[timelines[v][i].first_slot].emplace_back(v, i);
    }
  }

  RunResult result;
  result.ledgers.reserve(n);
  for (std::size_t v = 0; v < n; ++v) result.ledgers.emplace_back(options.initial_energy);
  auto& ledgers = result.ledgers;
  auto& trace = result.trace;
  auto& metrics = result.metrics;

  std::vector<std::vector<Reading>> buffer(n);
  std::vector<std::size_t> pending_packets(n, 0);
  std::vector<std::optional<RadioState>> last_state(n);
  std::vector<InFlight> in_flight;
  double latency_sum = 0.0;

  auto slot_time = [&](std::size_t frame, std::size_t slot) {
    return static_cast<double>(frame * frame_len + slot) * sd;
  };

  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> queue;
  auto push_frame = [&](std::size_t f) {
    const double t = slot_time(f, 0);
    for (NodeId v = 1; v < n; ++v) {
      if (tree.is_leaf(v)) queue.push({t, EventKind::Sense, v, f});
    }
    for (std::size_t s = 0; s < frame_len; ++s) {
      queue.push({slot_time(f, s), EventKind::SlotStart, static_cast<std::uint32_t>(s), f});
    }
  };
  push_frame(0);

  bool halted = false;
  double horizon = 0.0;

  while (!queue.empty()) {
    const SimEvent ev = queue.top();
    queue.pop();
    if (halted && (ev.kind != EventKind::PacketDelivered || ev.time > horizon)) continue;

    switch (ev.kind) {
      case EventKind::Sense: {
        if (!options.sensing.senses(ev.frame, ev.node)) break;
        buffer[ev.node].push_back({ev.node, ev.time, {ev.node}});
        ++pending_packets[ev.node];
        ++metrics.readings_sensed;
        if (options.record_trace) trace.senses.emplace_back(ev.time, ev.node);
        break;
      }

      case EventKind::PacketDelivered: {
        auto& flight = in_flight[ev.payload];
        metrics.packets_delivered += flight.packets;
        for (auto& r : flight.readings) {
          latency_sum += ev.time - r.sensed_at;
          ++metrics.readings_delivered;
          if (options.record_trace) {
            trace.deliveries.push_back({r.origin, r.sensed_at, ev.time, std::move(r.path)});
          }
        }
        flight.readings.clear();
        break;
      }

      case EventKind::SlotStart: {
        const std::size_t f = ev.frame;
        const std::size_t s = ev.node;
        const double t0 = slot_time(f, s);
        const double t1 = slot_time(f, s + 1);

        for (const auto& [v, idx] : starting[s]) {
          const auto& iv = timelines[v][idx];
          const double start = slot_time(f, iv.first_slot);
          const double end = slot_time(f, iv.first_slot + iv.slot_count);
          if (last_state[v]) {
            ledgers[v].charge(start, ChargeCategory::Transition,
                              transition_energy(profile, *last_state[v], iv.state));
          }
          last_state[v] = iv.state;
          if (options.record_trace) trace.states.push_back({v, start, end, iv.state});
          if (iv.state == RadioState::Sleep) {
            ledgers[v].charge(start, ChargeCategory::Sleep,
                              interval_energy(profile, RadioState::Sleep, end - start));
          } else if (iv.state == RadioState::Listen) {
            ledgers[v].charge(start, ChargeCategory::Listen,
                              interval_energy(profile, RadioState::Listen, end - start));
          }
        }

        for (ClusterId c : schedule.frame[s]) {
          const Cluster& cluster = clusters[c];
          const NodeId head = cluster.head;
          std::size_t offset = 0;
          for (NodeId m : cluster.members) {
            const std::size_t out = aggregate_packets(pending_packets[m], options.aggregation_ratio);
            if (out > 0) {
              const double tx_start = t0 + static_cast<double>(offset) * airtime;
              const double tx_end = t0 + static_cast<double>(offset + out) * airtime;
              const double per_packet_tx = tx_packet_energy(profile, bits, topo.distance(m, head));
              ledgers[m].charge(tx_start, ChargeCategory::Tx, static_cast<double>(out) * per_packet_tx);
              ledgers[head].charge(tx_start, ChargeCategory::Rx,
                                   static_cast<double>(out) * rx_packet_energy(profile, bits));
              if (options.record_trace) trace.transmissions.push_back({m, head, tx_start, tx_end, out});

              auto readings = std::move(buffer[m]);
              buffer[m].clear();
              pending_packets[m] = 0;
              for (auto& r : readings) r.path.push_back(head);
              if (head == kBaseStation) {
                in_flight.push_back({std::move(readings), out});
                queue.push({t1, EventKind::PacketDelivered, m, f, in_flight.size() - 1});
              } else {
                for (auto& r : readings) buffer[head].push_back(std::move(r));
                pending_packets[head] += out;
              }
            }
            ledgers[m].charge(t0, ChargeCategory::Listen,
                              interval_energy(profile, RadioState::Transmit,
                                              sd - static_cast<double>(out) * airtime));
            offset += out;
          }
          ledgers[head].charge(t0, ChargeCategory::Listen,
                               interval_energy(profile, RadioState::Receive,
                                               sd - static_cast<double>(offset) * airtime));
        }

        // First death among battery-powered nodes ends the run after this slot.
        for (NodeId v = 1; v < n; ++v) {
          if (ledgers[v].remaining() > 0.0) continue;
          double crossed = t0;
          double spent = 0.0;
          for (const auto& ch : ledgers[v].charges()) {
            spent += ch.amount;
            if (ledgers[v].initial() - spent <= 0.0) {
              crossed = ch.time;
              break;
            }
          }
          if (!metrics.first_death_time || crossed < *metrics.first_death_time) {
            metrics.first_death_time = crossed;
          }
          halted = true;
        }

        horizon = t1;
        if (s + 1 == frame_len) {
          metrics.frames_run = f + 1;
          if (!halted && f + 1 < options.frames) push_frame(f + 1);
        }
        break;
      }
    }
  }

  trace.horizon = horizon;
  metrics.per_node_energy.reserve(n);
  for (const auto& l : ledgers) {
    metrics.per_node_energy.push_back(l.consumed());
    metrics.total_energy += l.consumed();
  }
  metrics.mean_delivery_latency = metrics.readings_delivered > 0
                                      ? latency_sum / static_cast<double>(metrics.readings_delivered)
                                      : std::numeric_limits<double>::quiet_NaN();
  return result;
}

std::vector<Violation> audit_trace(const Topology& topo, const Tree& tree, const RunResult& run) {
  std::vector<Violation> violations;
  const auto& trace = run.trace;
  const std::size_t n = topo.size();
  auto near = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  };

  // Exclusive, gap-free state coverage of [0, horizon] per node.
  std::vector<std::vector<StateRecord>> per_node(n);
  for (const auto& st : trace.states) {
    if (st.node >= n) {
      violations.push_back({ViolationKind::Exclusivity, "state record for unknown node"});
      continue;
    }
    per_node[st.node].push_back(st);
  }
  for (NodeId v = 0; v < n; ++v) {
    auto& states = per_node[v];
    std::sort(states.begin(), states.end(),
              [](const StateRecord& a, const StateRecord& b) { return a.start < b.start; });
    double covered = 0.0;
    bool ok = true;
    std::string why;
    for (const auto& st : states) {
      if (st.start >= trace.horizon && !near(st.start, covered)) break;
      if (!near(st.start, covered)) {
        ok = false;
        why = st.start > covered ? "gap" : "overlap";
        why += " at t=" + csv::format_number(std::min(st.start, covered));
        break;
      }
      if (!(st.end > st.start)) {
        ok = false;
        why = "empty interval at t=" + csv::format_number(st.start);
        break;
      }
      covered = st.end;
    }
    if (ok && covered < trace.horizon && !near(covered, trace.horizon)) {
      ok = false;
      why = "uncovered from t=" + csv::format_number(covered);
    }
    if (!ok) {
      violations.push_back({ViolationKind::Exclusivity, "node " + std::to_string(v) + ": " + why});
    }
  }

  // No two overlapping transmissions from nodes in interference range.
  auto tx = trace.transmissions;
  std::sort(tx.begin(), tx.end(), [](const TxRecord& a, const TxRecord& b) {
    return std::tie(a.start, a.from) < std::tie(b.start, b.from);
  });
  for (std::size_t i = 0; i < tx.size(); ++i) {
    for (std::size_t j = i + 1; j < tx.size() && tx[j].start < tx[i].end; ++j) {
      if (tx[i].from == tx[j].from || interferes_nodes(topo, tx[i].from, tx[j].from)) {
        violations.push_back({ViolationKind::Collision,
                              "nodes " + std::to_string(tx[i].from) + " and " +
                                  std::to_string(tx[j].from) + " transmit together at t=" +
                                  csv::format_number(tx[j].start)});
      }
    }
  }

  for (std::size_t v = 0; v < run.ledgers.size(); ++v) {
    const auto& ledger = run.ledgers[v];
    double sum = 0.0;
    bool negative = false;
    for (const auto& c : ledger.charges()) {
      negative = negative || c.amount < 0.0;
      sum += c.amount;
    }
    if (negative || std::abs(ledger.initial() - sum - ledger.remaining()) > 1e-9 * ledger.initial()) {
      violations.push_back({ViolationKind::Conservation, "ledger of node " + std::to_string(v)});
    }
  }
  const auto& m = run.metrics;
  if (m.per_node_energy.size() != run.ledgers.size()) {
    violations.push_back({ViolationKind::Conservation, "per-node energy does not cover every ledger"});
  } else {
    double total = 0.0;
    for (std::size_t v = 0; v < run.ledgers.size(); ++v) {
      const double consumed = run.ledgers[v].consumed();
      total += consumed;
      if (std::abs(m.per_node_energy[v] - consumed) > 1e-9 * std::max(consumed, 1e-12)) {
        violations.push_back({ViolationKind::Conservation,
                              "reported energy of node " + std::to_string(v) + " disagrees with its ledger"});
      }
    }
    if (std::abs(m.total_energy - total) > 1e-9 * std::max(total, 1e-12)) {
      violations.push_back({ViolationKind::Conservation, "total energy disagrees with the ledgers"});
    }
  }

  for (const auto& d : trace.deliveries) {
    bool ok = !d.path.empty() && d.path.front() == d.origin && d.path.back() == kBaseStation;
    for (std::size_t i = 0; ok && i + 1 < d.path.size(); ++i) {
      ok = d.path[i] != kBaseStation && d.path[i] < tree.size() && tree.parent(d.path[i]) == d.path[i + 1];
    }
    if (!ok) {
      violations.push_back({ViolationKind::Path, "reading from node " + std::to_string(d.origin) +
                                                     " sensed at t=" + csv::format_number(d.sensed_at)});
    }
  }
  return violations;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  struct Row {
    double time;
    int rank;
    NodeId node;
    std::string event;
    std::string detail;
  };
  std::vector<Row> rows;
  for (const auto& [t, v] : trace.senses) rows.push_back({t, 0, v, "sense", ""});
  for (const auto& st : trace.states) {
    rows.push_back({st.start, 1, st.node, "state",
                    std::string(to_string(st.state)) + " until " + csv::format_number(st.end)});
  }
  for (const auto& tx : trace.transmissions) {
    const std::string packets = std::to_string(tx.packets);
    rows.push_back({tx.start, 2, tx.from, "tx", "to " + std::to_string(tx.to) + " packets " + packets});
    rows.push_back({tx.start, 3, tx.to, "rx", "from " + std::to_string(tx.from) + " packets " + packets});
  }
  for (const auto& d : trace.deliveries) {
    rows.push_back({d.delivered_at, 4, kBaseStation, "deliver",
                    "origin " + std::to_string(d.origin) + " latency " +
                        csv::format_number(d.delivered_at - d.sensed_at)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.time, a.rank, a.node) < std::tie(b.time, b.rank, b.node);
  });
  out << "time_s,node,event,detail\n";
  for (const auto& r : rows) {
    out << csv::format_number(r.time) << ',' << r.node << ',' << r.event << ',' << r.detail << '\n';
  }
}

}  // namespace wsn
