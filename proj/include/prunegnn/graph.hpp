// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The interference graph: one vertex per transceiver pair, one directed
// edge u -> v per interferer u kept at v's receiver by the pruning rule.

#ifndef PRUNEGNN_GRAPH_HPP
#define PRUNEGNN_GRAPH_HPP

#include <complex>
#include <vector>

#include "prunegnn/netsim.hpp"
#include "prunegnn/stochgeo.hpp"

namespace prunegnn::graph {

struct Edge {
  int source = 0;  // interfering transmitter u
  int target = 0;  // pair v whose receiver hears it
  std::complex<double> channel;  // h_{u, D(v)}
  double distance = 0.0;         // dist(tx_u, rx_v)
};

struct InterferenceGraph {
  int vertex_count = 0;
  // Vertex features: the pair's own link.
  std::vector<std::complex<double>> direct_channel;
  std::vector<double> weight;
  std::vector<double> direct_distance;

  // Edges sorted by (target, source); in_edges[v] indexes into edges.
  std::vector<Edge> edges;
  std::vector<std::vector<int>> in_edges;

  double max_power = 0.0;
  double noise_power = 0.0;
  double reference_distance = 1.0;
};

// Edge (u -> v) exists iff the rule admits interferer u at receiver D(v):
//   Distance:  dist(tx_u, rx_v) <= t           (inclusive at the boundary)
//   Neighbour: u is among the n smallest dist(tx_u, rx_v), ties to lower u
//   Complete:  always (u != v)
// A neighbour count of T-1 or more degenerates to the complete graph.
InterferenceGraph build_graph(const netsim::NetworkInstance& net,
                              const stochgeo::ThresholdSpec& spec);

}  // namespace prunegnn::graph

#endif  // PRUNEGNN_GRAPH_HPP
