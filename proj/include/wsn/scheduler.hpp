#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "wsn/clustering.hpp"
#include "wsn/radio.hpp"
#include "wsn/topology.hpp"
#include "wsn/tree.hpp"

namespace wsn {

/// One TDMA frame: each cluster owns exactly one slot, non-interfering
/// clusters may share one.
struct Schedule {
  double slot_duration = 0.0;
  std::vector<std::vector<ClusterId>> frame;  // slot -> clusters, ascending id
  std::vector<std::size_t> assignment;        // cluster id -> slot
  std::vector<ClusterId> placement_order;     // order the greedy placed clusters

  std::size_t frame_length() const { return frame.size(); }
  double frame_duration() const { return static_cast<double>(frame.size()) * slot_duration; }
};

/// Symmetric interference relation between clusters, precomputed.
class InterferenceMatrix {
 public:
  InterferenceMatrix() = default;
  InterferenceMatrix(const Topology& topo, const std::vector<Cluster>& clusters);
  /// Every distinct pair interferes: one cluster per slot.
  static InterferenceMatrix serial(std::size_t clusters);

  bool operator()(ClusterId a, ClusterId b) const { return a != b && bits_[a * n_ + b]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<char> bits_;
};

/// Greedy list scheduling. Among clusters whose member-headed clusters are
/// already placed, take the one with the smallest weight_key (then id) and
/// put it in the earliest slot that follows all of those prerequisites and
/// holds no interfering cluster.
Schedule allocate_slots(const std::vector<Cluster>& clusters, const InterferenceMatrix& interferes,
                        double slot_duration);

/// Same greedy, but weights are derived while scheduling: a leaf member's
/// event time is `sense_time`, a forwarding member's is the end of the slot
/// its own cluster got. Writes the weights back into `clusters`.
Schedule schedule_clusters(const Tree& tree, std::vector<Cluster>& clusters,
                           const InterferenceMatrix& interferes, double slot_duration,
                           double sense_time = 0.0);

/// Shortest slot that fits every member of the largest cluster back to back
/// plus one sleep/wake round trip. `packets_per_node[v]` is the worst-case
/// number of packets v sends per frame.
double required_slot_duration(const std::vector<Cluster>& clusters,
                              const std::vector<std::size_t>& packets_per_node,
                              const RadioProfile& profile);

struct TimelineInterval {
  double start;
  double end;
  RadioState state;
  std::size_t first_slot;
  std::size_t slot_count;
};

/// Gap-free cover of one frame for one node.
using NodeTimeline = std::vector<TimelineInterval>;

/// Transmit in the slot of the cluster the node belongs to, Receive in the
/// slot of the cluster it heads, and for each idle run Sleep if it pays off
/// else Listen. With duty_cycle off every idle run is Listen.
NodeTimeline node_timeline(const Schedule& schedule, const std::vector<Cluster>& clusters,
                           const Tree& tree, NodeId node, const RadioProfile& profile,
                           bool duty_cycle = true);

/// `slot,cluster_id` rows.
void write_schedule_csv(std::ostream& out, const Schedule& schedule);
/// `node,start_s,end_s,state` rows.
void write_timeline_csv(std::ostream& out, NodeId node, const NodeTimeline& timeline);

}  // namespace wsn
