#pragma once

// Independent reference implementations used by the tests. They work on dense
// matrices and recompute everything from scratch at each step.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qperc/engine.hpp"
#include "qperc/topology.hpp"

namespace qperc::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Matrix = std::vector<std::vector<double>>;

inline Matrix node_distances(const SpatialNetwork& net) {
  const std::size_t n = net.size();
  Matrix d(n, std::vector<double>(n, kInf));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v) d[u][v] = net.distance(u, v);
  return d;
}

/// Union-find over pairs with d < r0: classical disk percolation.
inline Partition classical_closure(const SpatialNetwork& net, double r0) {
  const std::size_t n = net.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (net.distance(u, v) < r0) parent[find(u)] = find(v);
  std::vector<Block> blocks(n);
  for (NodeId u = 0; u < n; ++u) blocks[find(u)].push_back(u);
  Partition out;
  for (auto& b : blocks)
    if (!b.empty()) out.push_back(std::move(b));
  return canonical_partition(out);
}

/// Brute-force fixed point. Effective block distances are recomputed every
/// step as shortest paths whose intermediate blocks are all removed (a removed
/// block costs nothing to cross). The first connectable pair is merged; when
/// there is none the first isolated block is removed. With `reduction` off,
/// removed blocks never relay.
inline Partition brute_force(const SpatialNetwork& net, const RangeModel& model, bool reduction = true) {
  const Matrix nd = node_distances(net);
  std::vector<Block> blocks;
  for (NodeId u = 0; u < net.size(); ++u) blocks.push_back({u});
  std::vector<double> range(blocks.size(), model.range(1));
  std::vector<bool> active(blocks.size(), true);

  for (;;) {
    const std::size_t k = blocks.size();
    Matrix d(k, std::vector<double>(k, kInf));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        if (a == b || blocks[a].empty() || blocks[b].empty()) continue;
        for (NodeId u : blocks[a])
          for (NodeId v : blocks[b]) d[a][b] = std::min(d[a][b], nd[u][v]);
      }
    if (reduction)
      for (std::size_t x = 0; x < k; ++x) {
        if (active[x] || blocks[x].empty()) continue;
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b)
            if (a != b) d[a][b] = std::min(d[a][b], d[a][x] + d[x][b]);
      }
    std::vector<std::size_t> live;
    for (std::size_t a = 0; a < k; ++a)
      if (active[a]) live.push_back(a);
    if (live.empty()) break;

    bool merged = false;
    for (std::size_t i = 0; i < live.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < live.size() && !merged; ++j) {
        const auto a = live[i], b = live[j];
        if (d[a][b] < std::min(range[a], range[b])) {
          Block m = blocks[a];
          m.insert(m.end(), blocks[b].begin(), blocks[b].end());
          blocks[a].clear();
          blocks[b].clear();
          active[a] = active[b] = false;
          range.push_back(model.range(m.size()));
          blocks.push_back(std::move(m));
          active.push_back(true);
          merged = true;
        }
      }
    if (merged) continue;
    bool removed = false;
    for (std::size_t a : live) {
      bool isolated = true;
      for (std::size_t b : live)
        if (b != a && d[a][b] < range[a]) isolated = false;
      if (isolated) {
        active[a] = false;
        removed = true;
        break;
      }
    }
    if (!removed) throw std::logic_error("oracle stuck: no rule applies");
  }
  Partition out;
  for (auto& b : blocks)
    if (!b.empty()) out.push_back(b);
  return canonical_partition(out);
}

}  // namespace qperc::testing
