// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// The threshold-based message-passing model. Each layer aggregates
// f_A(neighbour embedding, edge features) over in-edges with a SUM and
// combines through f_C into a fresh power in [0, P_max]; both MLPs are
// shared across layers. Training minimizes the negative weighted sum rate
// directly (no labels).

#ifndef PRUNEGNN_GNN_HPP
#define PRUNEGNN_GNN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prunegnn/graph.hpp"
#include "prunegnn/metrics.hpp"
#include "prunegnn/netsim.hpp"
#include "prunegnn/neuralnet.hpp"
#include "prunegnn/stochgeo.hpp"

namespace prunegnn::gnn {

// How complex channel coefficients enter the feature vectors.
//   kReIm: two reals (Re, Im); keeps phase, f_C input ends up 37-wide.
//   kGain: |h|^2 only; reproduces the published layer sizes {36,16,8,1}.
enum class ChannelEncoding { kReIm, kGain };

// Per-channel standardization statistics, frozen at training time and
// stored with the model. Distances are pre-scaled by d0 before these apply.
struct FeatureStats {
  nn::Vec vertex_mean, vertex_std;
  nn::Vec edge_mean, edge_std;

  bool empty() const { return vertex_mean.empty(); }
};

struct GnnConfig {
  int layers = 3;
  ChannelEncoding encoding = ChannelEncoding::kReIm;
  std::vector<int> fa_hidden = {6, 16, 32};
  std::vector<int> fc_hidden = {16, 8};
  std::uint64_t init_seed = 1;
};

int vertex_feature_dim(ChannelEncoding encoding);  // without the power slot
int edge_feature_dim(ChannelEncoding encoding);

struct GnnModel {
  nn::Mlp f_a;  // aggregation net, input [m_u, E_vu]
  nn::Mlp f_c;  // combination net, input [alpha_v, m_v], sigmoid head
  int layers = 3;
  ChannelEncoding encoding = ChannelEncoding::kReIm;
  double max_power = 1.0;  // also the power initialization p^(0)
  FeatureStats stats;
  std::uint64_t init_seed = 0;
  std::string trained_spec;  // provenance only

  static GnnModel create(const GnnConfig& cfg, double max_power, FeatureStats stats);

  void save(const std::string& path) const;
  static GnnModel load(const std::string& path);
};

// Raw (unstandardized) feature builders; stats computation and encoding
// share them so the two can never drift apart.
nn::Vec raw_vertex_features(const graph::InterferenceGraph& g, int v, ChannelEncoding enc);
nn::Vec raw_edge_features(const graph::InterferenceGraph& g, const graph::Edge& e,
                          ChannelEncoding enc);

FeatureStats compute_feature_stats(std::span<const netsim::NetworkInstance> instances,
                                   const stochgeo::ThresholdSpec& spec, ChannelEncoding enc);

// Inference pass: powers in [0, P_max], empty neighbourhoods aggregate to
// the zero vector.
std::vector<double> gnn_forward(const GnnModel& model, const graph::InterferenceGraph& g);

struct Gradients {
  nn::Vec f_a, f_c;
  explicit Gradients(const GnnModel& m)
      : f_a(static_cast<std::size_t>(m.f_a.param_count()), 0.0),
        f_c(static_cast<std::size_t>(m.f_c.param_count()), 0.0) {}
  void reset();
};

// Tape pass used by training: returns the scalar loss node (negative
// weighted sum rate, scaled by loss_scale) after registering parameter
// gradients into grads. power_nodes, when given, receives the final
// per-vertex power nodes.
nn::Tape::NodeId gnn_forward_tape(const GnnModel& model, const graph::InterferenceGraph& g,
                                  const netsim::NetworkInstance& net, double loss_scale,
                                  nn::Tape& tape, Gradients& grads,
                                  std::vector<nn::Tape::NodeId>* power_nodes = nullptr);

// Negative weighted sum rate of one instance and its exact gradient.
double sum_rate_loss(std::span<const double> powers, const netsim::NetworkInstance& net);
nn::Vec sum_rate_loss_gradient(std::span<const double> powers, const netsim::NetworkInstance& net);

struct TrainConfig {
  int epochs = 80;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 1;
};

struct TrainLogEntry {
  int epoch = 0;
  double mean_loss = 0.0;
};

struct TrainResult {
  std::vector<TrainLogEntry> log;
};

// Mini-batch Adam on the shared parameters. Deterministic given cfg.seed;
// throws on divergence (non-finite loss).
TrainResult train(GnnModel& model, std::span<const netsim::NetworkInstance> dataset,
                  const stochgeo::ThresholdSpec& spec, const TrainConfig& cfg);

// Builds the pruned graph, runs the forward pass, and reports the median
// wall time of `repeats` timed runs after `warmups` untimed ones.
metrics::AllocationResult infer_timed(const GnnModel& model, const netsim::NetworkInstance& net,
                                      const stochgeo::ThresholdSpec& spec, int repeats = 5,
                                      int warmups = 2);

}  // namespace prunegnn::gnn

#endif  // PRUNEGNN_GNN_HPP
