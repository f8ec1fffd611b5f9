#include "wsn/tree.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <string>

#include "wsn/error.hpp"

namespace wsn {

std::string_view to_string(TreeKind kind) {
  switch (kind) {
    case TreeKind::Bfs: return "BFS";
    case TreeKind::Spt: return "SPT";
    case TreeKind::Mst: return "MST";
  }
  return "?";
}

TreeKind parse_tree_kind(std::string_view text) {
  if (text == "BFS" || text == "bfs") return TreeKind::Bfs;
  if (text == "SPT" || text == "spt") return TreeKind::Spt;
  if (text == "MST" || text == "mst") return TreeKind::Mst;
  throw Error("unknown tree kind '" + std::string(text) + "' (expected BFS, SPT or MST)");
}

Tree::Tree(TreeKind kind, std::vector<NodeId> parents) : kind_(kind), parents_(std::move(parents)) {
  const auto n = parents_.size();
  if (n == 0) throw Error("tree needs at least the root");
  if (parents_[kBaseStation] != kNoParent) throw Error("root must not have a parent");

  children_.resize(n);
  for (NodeId v = 1; v < n; ++v) {
    const NodeId p = parents_[v];
    if (p >= n) throw Error("node " + std::to_string(v) + " has no valid parent");
    if (p == v) throw Error("node " + std::to_string(v) + " is its own parent");
    children_[p].push_back(v);
  }

  // Depth by walking up with memoisation; a walk longer than n is a cycle.
  constexpr auto kUnknown = std::numeric_limits<std::size_t>::max();
  depth_.assign(n, kUnknown);
  depth_[kBaseStation] = 0;
  std::vector<NodeId> path;
  for (NodeId v = 1; v < n; ++v) {
    path.clear();
    NodeId u = v;
    while (depth_[u] == kUnknown) {
      path.push_back(u);
      if (path.size() > n) throw Error("parent map contains a cycle");
      u = parents_[u];
    }
    std::size_t d = depth_[u];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth_[*it] = ++d;
  }
}

NodeId Tree::parent(NodeId v) const {
  if (v >= size()) throw Error("node " + std::to_string(v) + " not in tree");
  if (v == kBaseStation) throw Error("the root has no parent");
  return parents_[v];
}

std::span<const NodeId> Tree::children(NodeId v) const {
  if (v >= size()) throw Error("node " + std::to_string(v) + " not in tree");
  return children_[v];
}

std::size_t Tree::depth(NodeId v) const {
  if (v >= size()) throw Error("node " + std::to_string(v) + " not in tree");
  return depth_[v];
}

std::size_t Tree::max_children() const {
  std::size_t best = 0;
  for (const auto& c : children_) best = std::max(best, c.size());
  return best;
}

double Tree::total_length(const Topology& topo) const {
  double sum = 0.0;
  for (NodeId v = 1; v < size(); ++v) sum += topo.distance(v, parents_[v]);
  return sum;
}

std::vector<std::size_t> hop_distances(const Topology& topo, NodeId source) {
  topo.check_node(source);
  std::vector<std::size_t> hops(topo.size(), kUnreachable);
  std::queue<NodeId> frontier;
  hops[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : topo.neighbors(u)) {
      if (hops[v] == kUnreachable) {
        hops[v] = hops[u] + 1;
        frontier.push(v);
      }
    }
  }
  return hops;
}

namespace {

std::vector<NodeId> bfs_parents(const Topology& topo) {
  std::vector<NodeId> parent(topo.size(), kNoParent);
  std::vector<char> seen(topo.size(), 0);
  std::queue<NodeId> frontier;
  seen[kBaseStation] = 1;
  frontier.push(kBaseStation);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : topo.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        parent[v] = u;
        frontier.push(v);
      }
    }
  }
  return parent;
}

std::vector<NodeId> spt_parents(const Topology& topo) {
  const auto hops = hop_distances(topo, kBaseStation);
  std::vector<NodeId> parent(topo.size(), kNoParent);
  for (NodeId v = 1; v < topo.size(); ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (NodeId u : topo.neighbors(v)) {  // ascending, so strict < keeps the lower id
      if (hops[u] + 1 != hops[v]) continue;
      const double d = topo.distance(u, v);
      if (d < best) {
        best = d;
        parent[v] = u;
      }
    }
  }
  return parent;
}

// Dense Prim; n is at most a few hundred here.
std::vector<NodeId> mst_parents(const Topology& topo) {
  const auto n = topo.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<NodeId> parent(n, kNoParent);
  std::vector<double> best(n, kInf);
  std::vector<char> in_tree(n, 0);

  auto relax = [&](NodeId u) {
    for (NodeId v : topo.neighbors(u)) {
      if (in_tree[v]) continue;
      const double d = topo.distance(u, v);
      if (d < best[v] || (d == best[v] && u < parent[v])) {
        best[v] = d;
        parent[v] = u;
      }
    }
  };

  in_tree[kBaseStation] = 1;
  relax(kBaseStation);
  for (std::size_t added = 1; added < n; ++added) {
    NodeId next = kNoParent;
    for (NodeId v = 0; v < n; ++v) {
      if (!in_tree[v] && best[v] < kInf && (next == kNoParent || best[v] < best[next])) next = v;
    }
    if (next == kNoParent) break;
    in_tree[next] = 1;
    relax(next);
  }
  return parent;
}

}  // namespace

Tree build_tree(const Topology& topo, TreeKind kind) {
  if (!topo.is_connected()) throw Error("cannot span a disconnected topology");
  std::vector<NodeId> parents;
  switch (kind) {
    case TreeKind::Bfs: parents = bfs_parents(topo); break;
    case TreeKind::Spt: parents = spt_parents(topo); break;
    case TreeKind::Mst: parents = mst_parents(topo); break;
  }
  return Tree(kind, std::move(parents));
}

void validate_tree(const Topology& topo, const Tree& tree) {
  if (tree.size() != topo.size()) throw Error("tree and topology sizes differ");
  for (NodeId v = 1; v < tree.size(); ++v) {
    if (!topo.linked(v, tree.parent(v))) {
      throw Error("tree edge " + std::to_string(v) + "-" + std::to_string(tree.parent(v)) +
                  " is not a comm link");
    }
  }
}

void write_tree_csv(std::ostream& out, const Tree& tree) {
  out << "child,parent\n";
  for (NodeId v = 1; v < tree.size(); ++v) out << v << ',' << tree.parent(v) << '\n';
}

}  // namespace wsn
