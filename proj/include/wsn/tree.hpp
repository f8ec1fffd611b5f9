#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "wsn/topology.hpp"

namespace wsn {

enum class TreeKind { Bfs, Spt, Mst };

std::string_view to_string(TreeKind kind);
TreeKind parse_tree_kind(std::string_view text);

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

/// Spanning tree rooted at the base station, stored as a parent map.
class Tree {
 public:
  /// parents[0] must be kNoParent; every other entry must lead to the root
  /// without cycles.
  Tree(TreeKind kind, std::vector<NodeId> parents);

  TreeKind kind() const { return kind_; }
  std::size_t size() const { return parents_.size(); }
  NodeId root() const { return kBaseStation; }

  NodeId parent(NodeId v) const;
  std::span<const NodeId> parents() const { return parents_; }

  /// Ascending id order.
  std::span<const NodeId> children(NodeId v) const;
  bool is_leaf(NodeId v) const { return children(v).empty(); }
  std::size_t depth(NodeId v) const;
  std::size_t max_children() const;

  /// Sum of euclidean parent-edge lengths.
  double total_length(const Topology& topo) const;

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.kind_ == b.kind_ && a.parents_ == b.parents_;
  }

 private:
  TreeKind kind_;
  std::vector<NodeId> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::size_t> depth_;
};

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Hop counts from `source` over the comm graph; kUnreachable where no path.
std::vector<std::size_t> hop_distances(const Topology& topo, NodeId source);

/// BFS: first discoverer in ascending-id breadth-first order.
/// SPT: shortest edge among the hop-minimal parents, ties by id.
/// MST: Prim from the root on euclidean edge length, ties by id.
Tree build_tree(const Topology& topo, TreeKind kind);

/// Throws when a parent edge is not a comm link or sizes disagree.
void validate_tree(const Topology& topo, const Tree& tree);

/// `child,parent` rows.
void write_tree_csv(std::ostream& out, const Tree& tree);

}  // namespace wsn
