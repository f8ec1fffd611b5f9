#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace wsn {

using NodeId = std::uint32_t;

/// The sink. Always node 0.
inline constexpr NodeId kBaseStation = 0;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double euclidean(Point a, Point b);

/// Static node layout with unit-disk communication links and a larger
/// interference disk. Immutable once constructed.
class Topology {
 public:
  Topology(std::vector<Point> positions, double width, double height,
           double comm_range, double interference_range,
           std::uint64_t seed = 0);

  std::size_t size() const { return positions_.size(); }
  std::span<const Point> positions() const { return positions_; }
  Point position(NodeId v) const;

  double width() const { return width_; }
  double height() const { return height_; }
  double comm_range() const { return comm_range_; }
  double interference_range() const { return interference_range_; }
  std::uint64_t seed() const { return seed_; }

  double distance(NodeId a, NodeId b) const;

  /// Comm-graph neighbours of v in ascending id order.
  const std::vector<NodeId>& neighbors(NodeId v) const;
  bool linked(NodeId a, NodeId b) const;

  /// True when every node is reachable from the base station.
  bool is_connected() const;

  void check_node(NodeId v) const;

 private:
  std::vector<Point> positions_;
  double width_;
  double height_;
  double comm_range_;
  double interference_range_;
  std::uint64_t seed_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// a and b must differ.
bool interferes_nodes(const Topology& topo, NodeId a, NodeId b);

struct TopologyParams {
  std::size_t nodes = 0;
  double width = 0.0;
  double height = 0.0;
  double comm_range = 0.0;
  double interference_factor = 2.0;
  std::uint64_t seed = 0;
  std::optional<Point> base_station;  // field centre when unset
  int max_attempts = 1000;
};

/// Uniform random placement with rejection until the comm graph is
/// connected. Throws Error("unconnectable ...") after max_attempts draws.
Topology generate_topology(const TopologyParams& params);

/// `id,x,y` rows.
void write_topology_csv(std::ostream& out, const Topology& topo);
std::vector<Point> read_topology_csv(std::istream& in);

}  // namespace wsn
