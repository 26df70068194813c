// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/neuralnet.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "prunegnn/rng.hpp"

using namespace prunegnn;
using namespace prunegnn::nn;

namespace {

// Straight-line recomputation of a forward pass, written independently of
// Mlp::apply for use as an oracle.
Vec oracle_forward(const Mlp& net, const Vec& x) {
  Vec cur = x;
  std::size_t off = 0;
  for (int l = 0; l + 1 < static_cast<int>(net.dims.size()); ++l) {
    const int in = net.dims[l];
    const int out = net.dims[l + 1];
    Vec next(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double z = net.params[off + static_cast<std::size_t>(out) * in + o];
      for (int i = 0; i < in; ++i) z += net.params[off + static_cast<std::size_t>(o) * in + i] * cur[i];
      const bool last = l + 2 == static_cast<int>(net.dims.size());
      if (!last) {
        next[o] = std::max(0.0, z);
      } else if (net.output_activation == OutputActivation::kSigmoid) {
        next[o] = 1.0 / (1.0 + std::exp(-z));
      } else {
        next[o] = z;
      }
    }
    off += static_cast<std::size_t>(out) * in + out;
    cur = next;
  }
  return cur;
}

double rel_err(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-7});
}

}  // namespace

TEST_CASE("parameter count and layout") {
  rng::SplitMix64 gen(1);
  const auto net = Mlp::create({8, 6, 16, 32}, OutputActivation::kLinear, gen);
  CHECK(net.param_count() == 8 * 6 + 6 + 6 * 16 + 16 + 16 * 32 + 32);
  CHECK(net.params.size() == static_cast<std::size_t>(net.param_count()));
  CHECK_THROWS_AS(Mlp::create({4}, OutputActivation::kLinear, gen), std::invalid_argument);
  CHECK_THROWS_AS(Mlp::create({4, 0}, OutputActivation::kLinear, gen), std::invalid_argument);
}

TEST_CASE("zero parameters give zero pre-activation output") {
  rng::SplitMix64 gen(1);
  auto net = Mlp::create({3, 4, 2}, OutputActivation::kLinear, gen);
  net.params.assign(net.params.size(), 0.0);
  const auto y = net.apply(Vec{1.0, -2.0, 3.0});
  CHECK(y == Vec{0.0, 0.0});
}

TEST_CASE("identity single layer reproduces its input") {
  rng::SplitMix64 gen(1);
  auto net = Mlp::create({3, 3}, OutputActivation::kLinear, gen);
  net.params.assign(net.params.size(), 0.0);
  for (int i = 0; i < 3; ++i) net.params[static_cast<std::size_t>(i) * 3 + i] = 1.0;
  const Vec x{0.5, -1.5, 2.0};
  CHECK(net.apply(x) == x);
}

TEST_CASE("forward agrees with the straight-line oracle") {
  rng::SplitMix64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto act = trial % 2 == 0 ? OutputActivation::kLinear : OutputActivation::kSigmoid;
    auto net = Mlp::create({5, 7, 3}, act, gen);
    Vec x(5);
    for (auto& v : x) v = gen.next_uniform(-2.0, 2.0);
    const auto got = net.apply(x);
    const auto want = oracle_forward(net, x);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
    // The caching forward is the same computation.
    Mlp::Cache cache;
    CHECK(net.forward(x, cache) == got);
  }
  rng::SplitMix64 gen2(6);
  const auto net = Mlp::create({4, 2}, OutputActivation::kLinear, gen2);
  CHECK_THROWS_AS(net.apply(Vec{1.0}), std::invalid_argument);
}

TEST_CASE("tape: d/dx of sum(x) is ones") {
  Tape tape;
  const auto x = tape.input(Vec{1.0, 2.0, 3.0});
  const auto s = tape.sum_entries(x);
  tape.backward(s);
  CHECK(tape.grad(x) == Vec{1.0, 1.0, 1.0});
}

TEST_CASE("tape: gradient of a constant w.r.t. parameters is zero") {
  rng::SplitMix64 gen(3);
  const auto net = Mlp::create({3, 4, 1}, OutputActivation::kLinear, gen);
  Vec grad(static_cast<std::size_t>(net.param_count()), 0.0);

  Tape tape;
  const auto x = tape.input(Vec{1.0, 2.0, 3.0});
  (void)tape.mlp(net, x, grad);          // dead branch: not part of the loss
  const auto c = tape.input(Vec{5.0});   // the "loss" is a constant leaf
  tape.backward(c);
  for (const double g : grad) CHECK(g == 0.0);
}

TEST_CASE("mlp gradients match central finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rng::SplitMix64 gen(seed);
    auto net = Mlp::create({4, 6, 5, 1}, seed % 2 == 0 ? OutputActivation::kLinear
                                                       : OutputActivation::kSigmoid,
                           gen);
    Vec x(4);
    for (auto& v : x) v = gen.next_uniform(-1.5, 1.5);

    Vec grad(static_cast<std::size_t>(net.param_count()), 0.0);
    Tape tape;
    const auto xin = tape.input(x);
    const auto y = tape.mlp(net, xin, grad);
    const auto loss = tape.sum_entries(y);
    tape.backward(loss);

    const double h = 1e-6;
    for (int k = 0; k < net.param_count(); ++k) {
      const double saved = net.params[static_cast<std::size_t>(k)];
      net.params[static_cast<std::size_t>(k)] = saved + h;
      double up = 0.0;
      for (const double v : net.apply(x)) up += v;
      net.params[static_cast<std::size_t>(k)] = saved - h;
      double down = 0.0;
      for (const double v : net.apply(x)) down += v;
      net.params[static_cast<std::size_t>(k)] = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(rel_err(grad[static_cast<std::size_t>(k)], fd) < 1e-4);
    }

    // Input gradients too.
    for (int k = 0; k < 4; ++k) {
      Vec xp = x, xm = x;
      xp[static_cast<std::size_t>(k)] += h;
      xm[static_cast<std::size_t>(k)] -= h;
      double up = 0.0, down = 0.0;
      for (const double v : net.apply(xp)) up += v;
      for (const double v : net.apply(xm)) down += v;
      const double fd = (up - down) / (2.0 * h);
      CHECK(rel_err(tape.grad(xin)[static_cast<std::size_t>(k)], fd) < 1e-4);
    }
  }
}

TEST_CASE("tape composite ops backpropagate correctly") {
  // f(a, b) = sum(2 * concat(a, b)) => grad a = grad b = 2.
  Tape tape;
  const auto a = tape.input(Vec{1.0, 2.0});
  const auto b = tape.input(Vec{3.0});
  const auto cat = tape.concat(a, b);
  const auto scaled = tape.scale(cat, 2.0);
  const auto loss = tape.sum_entries(scaled);
  tape.backward(loss);
  CHECK(tape.value(loss)[0] == doctest::Approx(12.0));
  CHECK(tape.grad(a) == Vec{2.0, 2.0});
  CHECK(tape.grad(b) == Vec{2.0});

  // sum_of fans the gradient out to every parent.
  Tape tape2;
  const auto u = tape2.input(Vec{1.0, 1.0});
  const auto v = tape2.input(Vec{2.0, 2.0});
  const auto w = tape2.sum_of({u, v, u});
  const auto loss2 = tape2.sum_entries(w);
  tape2.backward(loss2);
  CHECK(tape2.value(w) == Vec{4.0, 4.0});
  CHECK(tape2.grad(u) == Vec{2.0, 2.0});  // appears twice
  CHECK(tape2.grad(v) == Vec{1.0, 1.0});

  // custom op with a hand gradient: y = x0 * x1 (scalars).
  Tape tape3;
  const auto x0 = tape3.input(Vec{3.0});
  const auto x1 = tape3.input(Vec{4.0});
  const auto prod = tape3.custom(
      {x0, x1}, Vec{12.0},
      [](const Vec& up, const std::vector<const Vec*>& vals, const std::vector<Vec*>& grads) {
        (*grads[0])[0] += up[0] * (*vals[1])[0];
        (*grads[1])[0] += up[0] * (*vals[0])[0];
      });
  tape3.backward(prod);
  CHECK(tape3.grad(x0) == Vec{4.0});
  CHECK(tape3.grad(x1) == Vec{3.0});

  CHECK_THROWS_AS(tape3.backward(tape3.input(Vec{1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves fresh parameters unchanged") {
    Vec params{1.0, -2.0};
    Vec grads{0.0, 0.0};
    AdamState state;
    adam_step(params, grads, state, 0.1);
    CHECK(params == Vec{1.0, -2.0});
  }

  SUBCASE("constant gradient walks parameters against its sign") {
    Vec params{0.0};
    AdamState state;
    for (int i = 0; i < 50; ++i) {
      Vec grads{0.5};
      adam_step(params, grads, state, 0.01);
    }
    CHECK(params[0] < -0.1);

    Vec params2{0.0};
    AdamState state2;
    for (int i = 0; i < 50; ++i) {
      Vec grads{-0.5};
      adam_step(params2, grads, state2, 0.01);
    }
    CHECK(params2[0] > 0.1);
  }

  SUBCASE("one step from a fresh state matches the hand formula") {
    Vec params{1.0};
    Vec grads{0.5};
    AdamState state;
    adam_step(params, grads, state, 0.1);
    // mhat = g, vhat = g^2 => step = lr * g / (|g| + eps) ~= lr.
    CHECK(params[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
    CHECK(state.step == 1);
  }

  SUBCASE("deterministic across reruns") {
    rng::SplitMix64 gen(12);
    auto net = Mlp::create({3, 5, 1}, OutputActivation::kLinear, gen);
    auto run = [&](Vec params) {
      AdamState state;
      rng::SplitMix64 g2(99);
      for (int step = 0; step < 25; ++step) {
        Vec grads(params.size());
        for (auto& v : grads) v = g2.next_uniform(-1.0, 1.0);
        adam_step(params, grads, state, 1e-3);
      }
      return params;
    };
    const auto a = run(net.params);
    const auto b = run(net.params);
    CHECK(a == b);
  }

  SUBCASE("shape mismatches are rejected") {
    Vec params{1.0, 2.0};
    Vec grads{1.0};
    AdamState state;
    CHECK_THROWS_AS(adam_step(params, grads, state, 0.1), std::invalid_argument);
  }
}
