#pragma once

// Small random instances shared by the engine tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <string>

#include "qperc/quantum_math.hpp"
#include "qperc/random.hpp"
#include "qperc/topology.hpp"

namespace qperc::testing {

struct Instance {
  SpatialNetwork net;
  RangeModel model;
  std::string kind;
};

/// Random point cloud in the unit square or random connected cable network,
/// with a base range near the typical nearest-neighbour spacing.
inline Instance random_instance(std::uint64_t seed, std::size_t max_n, double alpha) {
  Rng rng(derive_seed(seed, "instance", 0));
  const std::size_t n = 2 + rng.index(max_n - 1);
  const double spacing = 1.0 / std::sqrt(static_cast<double>(n));
  const double r0 = rng.uniform(0.3, 1.6) * spacing;
  const double m = rng.coin() ? 1.0 : static_cast<double>(1 + rng.index(8));
  RangeModel model;
  model.distill = DistillationParams(m, alpha);
  const double eps = 0.75 * r0 / std::pow(m, alpha);
  model.channel = ChannelModel(1.0, std::min(eps, 0.9));

  if (rng.coin()) {
    auto cloud = generate_uniform_points(n, 1.0, derive_seed(seed, "points", 0));
    return {SpatialNetwork::from_points(cloud), model, "points"};
  }
  EdgeListNetwork net;
  for (std::size_t i = 0; i < n; ++i) net.add_node("n" + std::to_string(i));
  for (NodeId i = 1; i < n; ++i)
    net.add_edge(static_cast<NodeId>(rng.index(i)), i, rng.uniform(0.05, 1.2) * spacing * 2.0);
  const std::size_t extra = rng.index(n + 1);
  for (std::size_t k = 0; k < extra; ++k) {
    const auto u = static_cast<NodeId>(rng.index(n));
    const auto v = static_cast<NodeId>(rng.index(n));
    if (u != v) net.add_edge(u, v, rng.uniform(0.05, 1.2) * spacing * 2.0);
  }
  return {SpatialNetwork::from_edges(net), model, "edges"};
}

}  // namespace qperc::testing
