// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/neuralnet.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "prunegnn/rng.hpp"

namespace prunegnn::nn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (const int d : dims) {
    if (d < 1) throw std::invalid_argument("Mlp: every layer dim must be >= 1");
  }
}

}  // namespace

Mlp Mlp::create(std::vector<int> dims, OutputActivation act, rng::SplitMix64& gen) {
  check_dims(dims);
  Mlp net;
  net.dims = std::move(dims);
  net.output_activation = act;
  net.params.resize(static_cast<std::size_t>(net.param_count()));
  std::size_t offset = 0;
  for (int l = 0; l < net.layer_count(); ++l) {
    const int in = net.dims[static_cast<std::size_t>(l)];
    const int out = net.dims[static_cast<std::size_t>(l) + 1];
    const double limit = std::sqrt(6.0 / in);
    for (int k = 0; k < out * in; ++k) net.params[offset++] = gen.next_uniform(-limit, limit);
    for (int k = 0; k < out; ++k) net.params[offset++] = 0.0;
  }
  return net;
}

int Mlp::param_count() const {
  int total = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) total += dims[l] * dims[l + 1] + dims[l + 1];
  return total;
}

Vec Mlp::apply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(input_dim())) {
    throw std::invalid_argument("Mlp::apply: input dimension mismatch");
  }
  Vec cur(x.begin(), x.end());
  Vec next;
  std::size_t offset = 0;
  const int layers = layer_count();
  for (int l = 0; l < layers; ++l) {
    const int in = dims[static_cast<std::size_t>(l)];
    const int out = dims[static_cast<std::size_t>(l) + 1];
    next.assign(static_cast<std::size_t>(out), 0.0);
    const double* w = params.data() + offset;
    const double* b = params.data() + offset + static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) z += row[i] * cur[static_cast<std::size_t>(i)];
      const bool last = l + 1 == layers;
      if (!last) {
        next[static_cast<std::size_t>(o)] = z > 0.0 ? z : 0.0;
      } else {
        next[static_cast<std::size_t>(o)] =
            output_activation == OutputActivation::kSigmoid ? sigmoid(z) : z;
      }
    }
    offset += static_cast<std::size_t>(out) * in + static_cast<std::size_t>(out);
    cur.swap(next);
  }
  return cur;
}

Vec Mlp::forward(std::span<const double> x, Cache& cache) const {
  if (x.size() != static_cast<std::size_t>(input_dim())) {
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  }
  const int layers = layer_count();
  cache.activations.assign(static_cast<std::size_t>(layers) + 1, Vec{});
  cache.preact.assign(static_cast<std::size_t>(layers), Vec{});
  cache.activations[0].assign(x.begin(), x.end());

  std::size_t offset = 0;
  for (int l = 0; l < layers; ++l) {
    const int in = dims[static_cast<std::size_t>(l)];
    const int out = dims[static_cast<std::size_t>(l) + 1];
    const Vec& cur = cache.activations[static_cast<std::size_t>(l)];
    Vec& z = cache.preact[static_cast<std::size_t>(l)];
    Vec& a = cache.activations[static_cast<std::size_t>(l) + 1];
    z.assign(static_cast<std::size_t>(out), 0.0);
    a.assign(static_cast<std::size_t>(out), 0.0);
    const double* w = params.data() + offset;
    const double* b = params.data() + offset + static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = acc;
      const bool last = l + 1 == layers;
      if (!last) {
        a[static_cast<std::size_t>(o)] = acc > 0.0 ? acc : 0.0;
      } else {
        a[static_cast<std::size_t>(o)] =
            output_activation == OutputActivation::kSigmoid ? sigmoid(acc) : acc;
      }
    }
    offset += static_cast<std::size_t>(out) * in + static_cast<std::size_t>(out);
  }
  return cache.activations.back();
}

Vec Mlp::backward(std::span<const double> grad_out, const Cache& cache,
                  std::span<double> grad_params) const {
  const int layers = layer_count();
  if (grad_out.size() != static_cast<std::size_t>(output_dim())) {
    throw std::invalid_argument("Mlp::backward: output-gradient dimension mismatch");
  }
  if (grad_params.size() != static_cast<std::size_t>(param_count())) {
    throw std::invalid_argument("Mlp::backward: parameter-gradient buffer mismatch");
  }

  // Offsets of each layer's block in the flat buffer.
  std::vector<std::size_t> offsets(static_cast<std::size_t>(layers));
  std::size_t offset = 0;
  for (int l = 0; l < layers; ++l) {
    offsets[static_cast<std::size_t>(l)] = offset;
    offset += static_cast<std::size_t>(dims[static_cast<std::size_t>(l)]) *
                  dims[static_cast<std::size_t>(l) + 1] +
              static_cast<std::size_t>(dims[static_cast<std::size_t>(l) + 1]);
  }

  Vec delta(grad_out.begin(), grad_out.end());
  for (int l = layers - 1; l >= 0; --l) {
    const int in = dims[static_cast<std::size_t>(l)];
    const int out = dims[static_cast<std::size_t>(l) + 1];
    const Vec& z = cache.preact[static_cast<std::size_t>(l)];
    const Vec& a_in = cache.activations[static_cast<std::size_t>(l)];
    const bool last = l + 1 == layers;

    // Through the activation.
    for (int o = 0; o < out; ++o) {
      if (last) {
        if (output_activation == OutputActivation::kSigmoid) {
          const double s = sigmoid(z[static_cast<std::size_t>(o)]);
          delta[static_cast<std::size_t>(o)] *= s * (1.0 - s);
        }
      } else if (z[static_cast<std::size_t>(o)] <= 0.0) {
        delta[static_cast<std::size_t>(o)] = 0.0;
      }
    }

    const double* w = params.data() + offsets[static_cast<std::size_t>(l)];
    double* gw = grad_params.data() + offsets[static_cast<std::size_t>(l)];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    Vec prev(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = w + static_cast<std::size_t>(o) * in;
      double* grow = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) {
        grow[i] += d * a_in[static_cast<std::size_t>(i)];
        prev[static_cast<std::size_t>(i)] += d * row[i];
      }
      gb[o] += d;
    }
    delta.swap(prev);
  }
  return delta;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient size mismatch");
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state does not match parameters");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

Tape::NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::input(Vec value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::zeros(int dim) {
  if (dim < 1) throw std::invalid_argument("Tape::zeros: dim must be >= 1");
  return input(Vec(static_cast<std::size_t>(dim), 0.0));
}

Tape::NodeId Tape::mlp(const Mlp& net, NodeId x, std::span<double> grad_params) {
  auto cache = std::make_shared<Mlp::Cache>();
  Node n;
  n.value = net.forward(value(x), *cache);
  n.parents = {x};
  n.backprop = [&net, cache, grad_params](Tape& tape, Node& self) {
    const Vec dx = net.backward(self.grad, *cache, grad_params);
    Vec& gx = tape.nodes_[static_cast<std::size_t>(self.parents[0])].grad;
    for (std::size_t i = 0; i < dx.size(); ++i) gx[i] += dx[i];
  };
  return push(std::move(n));
}

Tape::NodeId Tape::concat(NodeId a, NodeId b) {
  Node n;
  const Vec& va = value(a);
  const Vec& vb = value(b);
  n.value.reserve(va.size() + vb.size());
  n.value.insert(n.value.end(), va.begin(), va.end());
  n.value.insert(n.value.end(), vb.begin(), vb.end());
  n.parents = {a, b};
  const std::size_t split = va.size();
  n.backprop = [split](Tape& tape, Node& self) {
    Vec& ga = tape.nodes_[static_cast<std::size_t>(self.parents[0])].grad;
    Vec& gb = tape.nodes_[static_cast<std::size_t>(self.parents[1])].grad;
    for (std::size_t i = 0; i < split; ++i) ga[i] += self.grad[i];
    for (std::size_t i = split; i < self.grad.size(); ++i) gb[i - split] += self.grad[i];
  };
  return push(std::move(n));
}

Tape::NodeId Tape::sum_of(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw std::invalid_argument("Tape::sum_of: need at least one node");
  Node n;
  n.value = value(xs[0]);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const Vec& v = value(xs[k]);
    if (v.size() != n.value.size()) throw std::invalid_argument("Tape::sum_of: dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) n.value[i] += v[i];
  }
  n.parents = xs;
  n.backprop = [](Tape& tape, Node& self) {
    for (const NodeId p : self.parents) {
      Vec& gp = tape.nodes_[static_cast<std::size_t>(p)].grad;
      for (std::size_t i = 0; i < self.grad.size(); ++i) gp[i] += self.grad[i];
    }
  };
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId x, double c) {
  Node n;
  n.value = value(x);
  for (double& v : n.value) v *= c;
  n.parents = {x};
  n.backprop = [c](Tape& tape, Node& self) {
    Vec& gx = tape.nodes_[static_cast<std::size_t>(self.parents[0])].grad;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gx[i] += c * self.grad[i];
  };
  return push(std::move(n));
}

Tape::NodeId Tape::sum_entries(NodeId x) {
  Node n;
  double total = 0.0;
  for (const double v : value(x)) total += v;
  n.value = {total};
  n.parents = {x};
  n.backprop = [](Tape& tape, Node& self) {
    Vec& gx = tape.nodes_[static_cast<std::size_t>(self.parents[0])].grad;
    for (double& g : gx) g += self.grad[0];
  };
  return push(std::move(n));
}

Tape::NodeId Tape::custom(std::vector<NodeId> parents, Vec value, CustomBackward backward) {
  Node n;
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.backprop = [fn = std::move(backward)](Tape& tape, Node& self) {
    std::vector<const Vec*> vals;
    std::vector<Vec*> grads;
    vals.reserve(self.parents.size());
    grads.reserve(self.parents.size());
    for (const NodeId p : self.parents) {
      vals.push_back(&tape.nodes_[static_cast<std::size_t>(p)].value);
      grads.push_back(&tape.nodes_[static_cast<std::size_t>(p)].grad);
    }
    fn(self.grad, vals, grads);
  };
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  Node& r = nodes_.at(static_cast<std::size_t>(root));
  if (r.value.size() != 1) {
    throw std::invalid_argument("Tape::backward: root must be a scalar node");
  }
  for (Node& n : nodes_) n.grad.assign(n.value.size(), 0.0);
  r.grad[0] = 1.0;
  for (std::size_t k = nodes_.size(); k-- > 0;) {
    Node& n = nodes_[k];
    if (n.backprop && k <= static_cast<std::size_t>(root)) n.backprop(*this, n);
  }
}

}  // namespace prunegnn::nn
