// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace prunegnn::graph {

using stochgeo::ThresholdKind;
using stochgeo::ThresholdSpec;

InterferenceGraph build_graph(const netsim::NetworkInstance& net, const ThresholdSpec& spec) {
  const int t_count = net.pair_count;
  if (t_count <= 0) throw std::invalid_argument("build_graph: empty network");
  if (spec.kind == ThresholdKind::kDistance && !(spec.distance > 0.0)) {
    throw std::invalid_argument("build_graph: distance threshold must be > 0");
  }
  if (spec.kind == ThresholdKind::kNeighbour && spec.neighbour_count < 1) {
    throw std::invalid_argument("build_graph: neighbour count must be >= 1");
  }

  InterferenceGraph g;
  g.vertex_count = t_count;
  g.max_power = net.max_power;
  g.noise_power = net.noise_power;
  g.reference_distance = net.reference_distance;
  g.direct_channel.resize(static_cast<std::size_t>(t_count));
  g.direct_distance.resize(static_cast<std::size_t>(t_count));
  g.weight = net.weight;
  for (int v = 0; v < t_count; ++v) {
    g.direct_channel[static_cast<std::size_t>(v)] = net.h(v, v);
    g.direct_distance[static_cast<std::size_t>(v)] = net.d(v, v);
  }

  g.in_edges.resize(static_cast<std::size_t>(t_count));
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(t_count));
  for (int v = 0; v < t_count; ++v) {
    keep.clear();
    switch (spec.kind) {
      case ThresholdKind::kComplete:
        for (int u = 0; u < t_count; ++u) {
          if (u != v) keep.push_back(u);
        }
        break;
      case ThresholdKind::kDistance:
        for (int u = 0; u < t_count; ++u) {
          if (u != v && net.d(u, v) <= spec.distance) keep.push_back(u);
        }
        break;
      case ThresholdKind::kNeighbour: {
        for (int u = 0; u < t_count; ++u) {
          if (u != v) keep.push_back(u);
        }
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(spec.neighbour_count),
                                                    keep.size());
        auto closer = [&](int a, int b) {
          const double da = net.d(a, v);
          const double db = net.d(b, v);
          return da < db || (da == db && a < b);
        };
        std::partial_sort(keep.begin(), keep.begin() + static_cast<long>(n), keep.end(), closer);
        keep.resize(n);
        std::sort(keep.begin(), keep.end());
        break;
      }
    }
    for (const int u : keep) {
      g.in_edges[static_cast<std::size_t>(v)].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(Edge{u, v, net.h(u, v), net.d(u, v)});
    }
  }
  return g;
}

}  // namespace prunegnn::graph
