#include "wsn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <string>

#include "wsn/csv.hpp"
#include "wsn/error.hpp"

namespace wsn {

namespace {

// 53 random mantissa bits; mt19937_64 output is fixed by the standard, the
// library's distributions are not.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double euclidean(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

Topology::Topology(std::vector<Point> positions, double width, double height,
                   double comm_range, double interference_range, std::uint64_t seed)
    : positions_(std::move(positions)),
      width_(width),
      height_(height),
      comm_range_(comm_range),
      interference_range_(interference_range),
      seed_(seed) {
  if (positions_.empty()) throw Error("topology needs at least one node");
  if (!(width_ > 0.0) || !(height_ > 0.0)) throw Error("field dimensions must be positive");
  if (!(comm_range_ > 0.0)) throw Error("comm_range must be positive");
  if (!(interference_range_ >= comm_range_)) {
    throw Error("interference_range must be at least comm_range");
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const Point p = positions_[i];
    if (!(p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= height_)) {
      throw Error("node " + std::to_string(i) + " lies outside the field");
    }
  }

  const auto n = positions_.size();
  adjacency_.resize(n);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (euclidean(positions_[a], positions_[b]) <= comm_range_) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
      }
    }
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

void Topology::check_node(NodeId v) const {
  if (v >= positions_.size()) {
    throw Error("node " + std::to_string(v) + " out of range (n=" +
                std::to_string(positions_.size()) + ")");
  }
}

Point Topology::position(NodeId v) const {
  check_node(v);
  return positions_[v];
}

double Topology::distance(NodeId a, NodeId b) const {
  check_node(a);
  check_node(b);
  return euclidean(positions_[a], positions_[b]);
}

const std::vector<NodeId>& Topology::neighbors(NodeId v) const {
  check_node(v);
  return adjacency_[v];
}

bool Topology::linked(NodeId a, NodeId b) const {
  const auto& adj = neighbors(a);
  check_node(b);
  return std::binary_search(adj.begin(), adj.end(), b);
}

bool Topology::is_connected() const {
  std::vector<char> seen(size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(kBaseStation);
  seen[kBaseStation] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : adjacency_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == size();
}

bool interferes_nodes(const Topology& topo, NodeId a, NodeId b) {
  if (a == b) throw Error("interference of a node with itself is undefined");
  return topo.distance(a, b) <= topo.interference_range();
}

Topology generate_topology(const TopologyParams& params) {
  if (params.nodes < 2) throw Error("need at least 2 nodes");
  if (!(params.comm_range > 0.0)) throw Error("comm_range must be positive");
  if (!(params.interference_factor >= 1.0)) throw Error("interference_factor must be >= 1");
  if (params.max_attempts < 1) throw Error("max_attempts must be >= 1");

  const Point base = params.base_station.value_or(Point{params.width / 2.0, params.height / 2.0});
  const double interference_range = params.interference_factor * params.comm_range;

  std::mt19937_64 rng(params.seed);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    std::vector<Point> positions;
    positions.reserve(params.nodes);
    positions.push_back(base);
    for (std::size_t i = 1; i < params.nodes; ++i) {
      const double x = unit_uniform(rng) * params.width;
      const double y = unit_uniform(rng) * params.height;
      positions.push_back({x, y});
    }
    Topology topo(std::move(positions), params.width, params.height, params.comm_range,
                  interference_range, params.seed);
    if (topo.is_connected()) return topo;
  }
  throw Error("unconnectable: no connected layout after " + std::to_string(params.max_attempts) +
              " draws (seed " + std::to_string(params.seed) + ")");
}

void write_topology_csv(std::ostream& out, const Topology& topo) {
  out << "id,x,y\n";
  for (NodeId v = 0; v < topo.size(); ++v) {
    const Point p = topo.position(v);
    out << v << ',' << csv::format_number(p.x) << ',' << csv::format_number(p.y) << '\n';
  }
}

std::vector<Point> read_topology_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != "id,x,y") {
    throw Error("topology csv: expected header 'id,x,y'");
  }
  std::vector<Point> positions;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 3) {
      throw Error("topology csv line " + std::to_string(line_no) + ": expected 3 fields");
    }
    if (fields[0] != std::to_string(positions.size())) {
      throw Error("topology csv line " + std::to_string(line_no) + ": ids must be 0..n-1 in order");
    }
    positions.push_back({csv::parse_double(fields[1]), csv::parse_double(fields[2])});
  }
  return positions;
}

}  // namespace wsn
