// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// A deliberately small dense-network core: MLPs over flat parameter
// buffers, a reverse-mode tape over vector-valued nodes, and Adam.
// Everything is deterministic given seeds and single-threaded use.

#ifndef PRUNEGNN_NEURALNET_HPP
#define PRUNEGNN_NEURALNET_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace prunegnn::rng {
class SplitMix64;
}

namespace prunegnn::nn {

using Vec = std::vector<double>;

enum class OutputActivation { kLinear, kSigmoid };

// Fully connected net with ReLU hidden layers. Parameters live in one flat
// buffer laid out [W0 | b0 | W1 | b1 | ...], W row-major (out x in), which
// makes optimizer state and weight files trivial.
struct Mlp {
  std::vector<int> dims;  // [input, hidden..., output]
  Vec params;
  OutputActivation output_activation = OutputActivation::kLinear;

  // Kaiming-style uniform fan-in init for weights, zero biases.
  static Mlp create(std::vector<int> dims, OutputActivation act, rng::SplitMix64& gen);

  int layer_count() const { return static_cast<int>(dims.size()) - 1; }
  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int param_count() const;

  struct Cache {
    std::vector<Vec> activations;  // [0] = input, then post-activation per layer
    std::vector<Vec> preact;       // pre-activation per layer
  };

  Vec apply(std::span<const double> x) const;
  Vec forward(std::span<const double> x, Cache& cache) const;

  // Returns dL/dx; accumulates dL/dparams into grad_params (same layout).
  Vec backward(std::span<const double> grad_out, const Cache& cache,
               std::span<double> grad_params) const;
};

struct AdamState {
  Vec m, v;
  long step = 0;
};

// Standard Adam update; resizes state on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Reverse-mode tape over vector-valued nodes. Build a forward graph with
// the factory methods, then call backward() on a scalar node; gradients of
// MLP parameters accumulate into the spans bound at node creation.
class Tape {
 public:
  using NodeId = std::int32_t;

  // Custom-op backward: (upstream grad, parent values, parent grads).
  using CustomBackward = std::function<void(const Vec&, const std::vector<const Vec*>&,
                                            const std::vector<Vec*>&)>;

  NodeId input(Vec value);
  NodeId zeros(int dim);
  NodeId mlp(const Mlp& net, NodeId x, std::span<double> grad_params);
  NodeId concat(NodeId a, NodeId b);
  NodeId sum_of(const std::vector<NodeId>& xs);  // elementwise; non-empty
  NodeId scale(NodeId x, double c);
  NodeId sum_entries(NodeId x);
  NodeId custom(std::vector<NodeId> parents, Vec value, CustomBackward backward);

  const Vec& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Vec& grad(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds the scalar root with gradient 1 and sweeps the tape in reverse.
  void backward(NodeId root);

 private:
  struct Node {
    Vec value;
    Vec grad;
    std::vector<NodeId> parents;
    std::function<void(Tape&, Node&)> backprop;  // empty for leaves
  };

  NodeId push(Node node);
  std::vector<Node> nodes_;
};

}  // namespace prunegnn::nn

#endif  // PRUNEGNN_NEURALNET_HPP
