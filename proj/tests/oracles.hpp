#pragma once

// Independent reference computations for the tests. Nothing here calls the
// tree builders or the scheduler.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "wsn/topology.hpp"

namespace oracle {

inline double dist(const wsn::Topology& t, wsn::NodeId a, wsn::NodeId b) {
  const auto p = t.positions()[a];
  const auto q = t.positions()[b];
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
}

inline bool link(const wsn::Topology& t, wsn::NodeId a, wsn::NodeId b) {
  return a != b && dist(t, a, b) <= t.comm_range();
}

/// Hop counts from node 0 by a plain queue search over the raw positions.
inline std::vector<long> hops_from_root(const wsn::Topology& t) {
  const auto n = t.size();
  std::vector<long> hops(n, -1);
  std::queue<wsn::NodeId> q;
  hops[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (wsn::NodeId v = 0; v < n; ++v) {
      if (hops[v] < 0 && link(t, u, v)) {
        hops[v] = hops[u] + 1;
        q.push(v);
      }
    }
  }
  return hops;
}

struct UnionFind {
  std::vector<std::size_t> up;
  explicit UnionFind(std::size_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  std::size_t find(std::size_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[a] = b;
    return true;
  }
};

/// Minimum total edge length over every spanning tree of the comm graph,
/// enumerated through Pruefer sequences (n^(n-2) labelled trees). n <= 8.
inline double brute_force_mst_length(const wsn::Topology& t) {
  const std::size_t n = t.size();
  if (n == 1) return 0.0;
  if (n == 2) return link(t, 0, 1) ? dist(t, 0, 1) : std::numeric_limits<double>::infinity();
  const std::size_t len = n - 2;
  std::vector<std::size_t> seq(len, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> degree(n);
  while (true) {
    std::fill(degree.begin(), degree.end(), 1);
    for (auto s : seq) ++degree[s];
    double total = 0.0;
    bool valid = true;
    for (std::size_t i = 0; i < len && valid; ++i) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      if (!link(t, leaf, seq[i])) valid = false;
      total += dist(t, leaf, seq[i]);
      --degree[leaf];
      --degree[seq[i]];
    }
    if (valid) {
      std::size_t u = n, v = n;
      for (std::size_t k = 0; k < n; ++k) {
        if (degree[k] == 1) (u == n ? u : v) = k;
      }
      if (link(t, u, v)) best = std::min(best, total + dist(t, u, v));
    }
    std::size_t pos = 0;
    while (pos < len && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == len) break;
  }
  return best;
}

/// Small connected layout: n in [2, 8] on a field sized so links are common
/// but not universal.
inline wsn::Topology small_connected(std::mt19937_64& rng) {
  wsn::TopologyParams p;
  p.nodes = 2 + rng() % 7;
  p.width = 40.0;
  p.height = 40.0;
  p.comm_range = 14.0 + static_cast<double>(rng() % 12);
  p.seed = rng();
  p.max_attempts = 100000;
  return wsn::generate_topology(p);
}

inline wsn::Topology medium_connected(std::uint64_t seed, std::size_t nodes = 40) {
  wsn::TopologyParams p;
  p.nodes = nodes;
  p.width = 100.0;
  p.height = 100.0;
  p.comm_range = 25.0;
  p.seed = seed;
  return wsn::generate_topology(p);
}

}  // namespace oracle
