#include "wsn/clustering.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"

namespace wsn {

std::vector<Cluster> form_clusters(const Tree& tree) {
  std::vector<Cluster> clusters;
  for (NodeId v = 0; v < tree.size(); ++v) {
    const auto kids = tree.children(v);
    if (kids.empty()) continue;
    Cluster c;
    c.id = clusters.size();
    c.head = v;
    c.members.assign(kids.begin(), kids.end());
    clusters.push_back(std::move(c));
  }
  return clusters;
}

void assign_weight(Cluster& cluster, const EventTimes& event_times) {
  double key = std::numeric_limits<double>::infinity();
  for (NodeId m : cluster.members) {
    const auto it = event_times.find(m);
    if (it == event_times.end()) {
      throw Error("no event time for node " + std::to_string(m) + " (cluster " +
                  std::to_string(cluster.id) + ")");
    }
    key = std::min(key, it->second);
  }
  cluster.weight_key = key;
}

std::vector<Cluster> assign_weights(std::vector<Cluster> clusters, const EventTimes& event_times) {
  for (auto& c : clusters) assign_weight(c, event_times);
  return clusters;
}

bool cluster_interferes(const Topology& topo, const Cluster& a, const Cluster& b) {
  if (a.id == b.id) throw Error("cluster interference needs two distinct clusters");
  auto nodes_of = [](const Cluster& c) {
    std::vector<NodeId> nodes = c.members;
    nodes.push_back(c.head);
    return nodes;
  };
  const auto na = nodes_of(a);
  const auto nb = nodes_of(b);
  const double range = topo.interference_range();
  for (NodeId u : na) {
    for (NodeId v : nb) {
      if (u == v || topo.distance(u, v) <= range) return true;
    }
  }
  return false;
}

std::vector<std::size_t> head_index(const std::vector<Cluster>& clusters, std::size_t nodes) {
  std::vector<std::size_t> index(nodes, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (clusters[i].head >= nodes) throw Error("cluster head outside the network");
    index[clusters[i].head] = i;
  }
  return index;
}

void write_clusters_csv(std::ostream& out, const std::vector<Cluster>& clusters) {
  out << "cluster_id,head,member,weight_key\n";
  for (const auto& c : clusters) {
    for (NodeId m : c.members) {
      out << c.id << ',' << c.head << ',' << m << ',' << csv::format_number(c.weight_key) << '\n';
    }
  }
}

}  // namespace wsn
