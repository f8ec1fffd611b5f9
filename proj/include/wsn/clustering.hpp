#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <vector>

#include "wsn/topology.hpp"
#include "wsn/tree.hpp"

namespace wsn {

using ClusterId = std::size_t;

/// A tree parent together with its children. Smaller weight_key means
/// greater weight (earlier data).
struct Cluster {
  ClusterId id = 0;
  NodeId head = 0;
  std::vector<NodeId> members;  // ascending
  double weight_key = std::numeric_limits<double>::infinity();

  bool weighted() const { return weight_key != std::numeric_limits<double>::infinity(); }

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// One cluster per non-leaf node, ids ascending with the head id.
std::vector<Cluster> form_clusters(const Tree& tree);

/// Event time per node: sensing time for leaves, aggregate-ready time for
/// forwarding nodes.
using EventTimes = std::map<NodeId, double>;

/// weight_key := min of the members' event times. Throws if one is missing.
void assign_weight(Cluster& cluster, const EventTimes& event_times);
std::vector<Cluster> assign_weights(std::vector<Cluster> clusters, const EventTimes& event_times);

/// True when any node of one cluster (head included) lies within
/// interference range of any node of the other.
bool cluster_interferes(const Topology& topo, const Cluster& a, const Cluster& b);

/// Index of the cluster headed by each node, or npos.
std::vector<std::size_t> head_index(const std::vector<Cluster>& clusters, std::size_t nodes);

/// `cluster_id,head,member,weight_key` rows.
void write_clusters_csv(std::ostream& out, const std::vector<Cluster>& clusters);

}  // namespace wsn
