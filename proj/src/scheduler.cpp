#include "wsn/scheduler.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"

namespace wsn {

namespace {

constexpr auto kNone = static_cast<std::size_t>(-1);

void check_ids(const std::vector<Cluster>& clusters) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].id != i) throw Error("cluster ids must be 0..k-1 in order");
  }
}

std::size_t node_bound(const std::vector<Cluster>& clusters) {
  std::size_t bound = 0;
  for (const auto& c : clusters) {
    bound = std::max<std::size_t>(bound, c.head + 1);
    for (NodeId m : c.members) bound = std::max<std::size_t>(bound, m + 1);
  }
  return bound;
}

// prerequisites[i]: clusters headed by members of i; they must finish first.
std::vector<std::vector<std::size_t>> prerequisites(const std::vector<Cluster>& clusters) {
  const auto heads = head_index(clusters, node_bound(clusters));
  std::vector<std::vector<std::size_t>> pre(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (NodeId m : clusters[i].members) {
      if (heads[m] != kNone) pre[i].push_back(heads[m]);
    }
  }
  return pre;
}

template <class WeightOf>
Schedule greedy_allocate(const std::vector<Cluster>& clusters, const InterferenceMatrix& interferes,
                         double slot_duration, WeightOf&& weight_of) {
  if (!(slot_duration > 0.0)) throw Error("slot_duration must be positive");
  check_ids(clusters);
  if (interferes.size() != clusters.size()) throw Error("interference matrix size mismatch");

  const auto pre = prerequisites(clusters);
  std::vector<std::vector<std::size_t>> dependents(clusters.size());
  std::vector<std::size_t> waiting(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    waiting[i] = pre[i].size();
    for (std::size_t p : pre[i]) dependents[p].push_back(i);
  }

  Schedule schedule;
  schedule.slot_duration = slot_duration;
  schedule.assignment.assign(clusters.size(), kNone);

  std::set<std::pair<double, std::size_t>> ready;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (waiting[i] == 0) ready.emplace(weight_of(i, schedule), i);
  }

  while (!ready.empty()) {
    const std::size_t c = ready.begin()->second;
    ready.erase(ready.begin());

    std::size_t slot = 0;
    for (std::size_t p : pre[c]) slot = std::max(slot, schedule.assignment[p] + 1);
    for (;; ++slot) {
      if (slot >= schedule.frame.size()) break;
      const auto& occupants = schedule.frame[slot];
      const bool blocked = std::any_of(occupants.begin(), occupants.end(),
                                       [&](std::size_t o) { return interferes(c, o); });
      if (!blocked) break;
    }
    if (slot >= schedule.frame.size()) schedule.frame.resize(slot + 1);
    schedule.frame[slot].push_back(c);
    schedule.assignment[c] = slot;
    schedule.placement_order.push_back(c);

    for (std::size_t d : dependents[c]) {
      if (--waiting[d] == 0) ready.emplace(weight_of(d, schedule), d);
    }
  }

  if (schedule.placement_order.size() != clusters.size()) {
    throw Error("cluster precedence contains a cycle");
  }
  for (auto& slot : schedule.frame) std::sort(slot.begin(), slot.end());
  return schedule;
}

}  // namespace

InterferenceMatrix::InterferenceMatrix(const Topology& topo, const std::vector<Cluster>& clusters)
    : n_(clusters.size()), bits_(n_ * n_, 0) {
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      const char hit = cluster_interferes(topo, clusters[a], clusters[b]) ? 1 : 0;
      bits_[a * n_ + b] = hit;
      bits_[b * n_ + a] = hit;
    }
  }
}

InterferenceMatrix InterferenceMatrix::serial(std::size_t clusters) {
  InterferenceMatrix m;
  m.n_ = clusters;
  m.bits_.assign(clusters * clusters, 1);
  return m;
}

Schedule allocate_slots(const std::vector<Cluster>& clusters, const InterferenceMatrix& interferes,
                        double slot_duration) {
  for (const auto& c : clusters) {
    if (!c.weighted()) throw Error("cluster " + std::to_string(c.id) + " has no weight");
  }
  return greedy_allocate(clusters, interferes, slot_duration,
                         [&](std::size_t i, const Schedule&) { return clusters[i].weight_key; });
}

Schedule schedule_clusters(const Tree& tree, std::vector<Cluster>& clusters,
                           const InterferenceMatrix& interferes, double slot_duration,
                           double sense_time) {
  const auto expected = form_clusters(tree);
  if (expected.size() != clusters.size()) throw Error("clusters do not match the tree");
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].head != expected[i].head || clusters[i].members != expected[i].members) {
      throw Error("clusters do not match the tree");
    }
  }
  const auto heads = head_index(clusters, tree.size());

  auto weight_of = [&](std::size_t i, const Schedule& partial) {
    EventTimes events;
    for (NodeId m : clusters[i].members) {
      const auto headed = heads[m];
      events[m] = headed == kNone
                      ? sense_time
                      : sense_time + static_cast<double>(partial.assignment[headed] + 1) * slot_duration;
    }
    assign_weight(clusters[i], events);
    return clusters[i].weight_key;
  };
  return greedy_allocate(clusters, interferes, slot_duration, weight_of);
}

double required_slot_duration(const std::vector<Cluster>& clusters,
                              const std::vector<std::size_t>& packets_per_node,
                              const RadioProfile& profile) {
  std::size_t worst = 0;
  for (const auto& c : clusters) {
    std::size_t packets = 0;
    for (NodeId m : c.members) {
      if (m >= packets_per_node.size()) throw Error("packet count missing for a member");
      packets += packets_per_node[m];
    }
    worst = std::max(worst, packets);
  }
  return static_cast<double>(worst) * profile.packet_airtime() + profile.round_trip();
}

NodeTimeline node_timeline(const Schedule& schedule, const std::vector<Cluster>& clusters,
                           const Tree& tree, NodeId node, const RadioProfile& profile,
                           bool duty_cycle) {
  if (node >= tree.size()) throw Error("unknown node " + std::to_string(node));
  if (schedule.assignment.size() != clusters.size()) throw Error("schedule does not match clusters");

  const auto heads = head_index(clusters, tree.size());
  const std::size_t frame = schedule.frame_length();
  std::vector<RadioState> busy(frame, RadioState::Sleep);
  std::vector<char> is_busy(frame, 0);

  if (node != kBaseStation) {
    const auto member_of = heads[tree.parent(node)];
    if (member_of == kNone) throw Error("tree parent heads no cluster");
    busy[schedule.assignment[member_of]] = RadioState::Transmit;
    is_busy[schedule.assignment[member_of]] = 1;
  }
  if (heads[node] != kNone) {
    busy[schedule.assignment[heads[node]]] = RadioState::Receive;
    is_busy[schedule.assignment[heads[node]]] = 1;
  }

  const double sd = schedule.slot_duration;
  NodeTimeline timeline;
  std::size_t s = 0;
  while (s < frame) {
    if (is_busy[s]) {
      timeline.push_back({static_cast<double>(s) * sd, static_cast<double>(s + 1) * sd, busy[s], s, 1});
      ++s;
      continue;
    }
    std::size_t end = s;
    while (end < frame && !is_busy[end]) ++end;
    const double gap = static_cast<double>(end - s) * sd;
    const auto state = duty_cycle && should_sleep(profile, gap) ? RadioState::Sleep : RadioState::Listen;
    timeline.push_back({static_cast<double>(s) * sd, static_cast<double>(end) * sd, state, s, end - s});
    s = end;
  }
  return timeline;
}

void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
  out << "slot,cluster_id\n";
  for (std::size_t s = 0; s < schedule.frame.size(); ++s) {
    for (ClusterId c : schedule.frame[s]) out << s << ',' << c << '\n';
  }
}

void write_timeline_csv(std::ostream& out, NodeId node, const NodeTimeline& timeline) {
  for (const auto& iv : timeline) {
    out << node << ',' << csv::format_number(iv.start) << ',' << csv::format_number(iv.end) << ','
        << to_string(iv.state) << '\n';
  }
}

}  // namespace wsn
