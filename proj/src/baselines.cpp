// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "prunegnn/rng.hpp"

namespace prunegnn::baselines {

using metrics::AllocationResult;
using netsim::NetworkInstance;

namespace {

using clock = std::chrono::steady_clock;

AllocationResult finish(const NetworkInstance& net, std::vector<double> powers,
                        clock::time_point start) {
  AllocationResult result;
  result.inference_seconds = std::chrono::duration<double>(clock::now() - start).count();
  result.weighted_sum_rate = metrics::evaluate(net, powers).weighted_sum_rate;
  result.powers = std::move(powers);
  return result;
}

}  // namespace

AllocationResult wmmse_allocate(const NetworkInstance& net, const WmmseConfig& cfg,
                                WmmseDiagnostics* diag) {
  if (!(net.noise_power > 0.0)) throw std::invalid_argument("wmmse: noise power must be > 0");
  if (cfg.max_iters < 1 || !(cfg.tolerance > 0.0)) {
    throw std::invalid_argument("wmmse: bad iteration cap or tolerance");
  }
  const auto start = clock::now();
  const int t_count = net.pair_count;
  const double v_max = std::sqrt(net.max_power);
  const double init = cfg.p_init < 0.0 ? net.max_power : cfg.p_init;
  if (init > net.max_power) throw std::invalid_argument("wmmse: p_init exceeds P_max");

  // Direct-channel amplitudes; phases cancel in scalar power control.
  std::vector<double> amp(static_cast<std::size_t>(t_count));
  for (int i = 0; i < t_count; ++i) amp[static_cast<std::size_t>(i)] = std::sqrt(net.g(i, i));

  std::vector<double> v(static_cast<std::size_t>(t_count), std::sqrt(init));
  if (!cfg.initial_powers.empty()) {
    if (cfg.initial_powers.size() != static_cast<std::size_t>(t_count)) {
      throw std::invalid_argument("wmmse: warm-start power vector length mismatch");
    }
    for (int i = 0; i < t_count; ++i) {
      v[static_cast<std::size_t>(i)] = std::sqrt(cfg.initial_powers[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<double> u(static_cast<std::size_t>(t_count), 0.0);
  std::vector<double> mse_w(static_cast<std::size_t>(t_count), 0.0);
  std::vector<double> powers(static_cast<std::size_t>(t_count));

  auto objective = [&]() {
    for (int i = 0; i < t_count; ++i) {
      powers[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    return metrics::evaluate(net, powers).weighted_sum_rate;
  };

  double prev = objective();
  if (diag != nullptr) {
    diag->objective_trace.clear();
    diag->objective_trace.push_back(prev);
    diag->converged = false;
  }

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    // Receiver gains: u_i = a_i v_i / (sigma^2 + sum_j G_ji v_j^2).
    for (int i = 0; i < t_count; ++i) {
      double den = net.noise_power;
      for (int j = 0; j < t_count; ++j) {
        den += net.g(j, i) * v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
      }
      u[static_cast<std::size_t>(i)] = amp[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)] / den;
    }
    // MSE weights: w_i / e_i with e_i = 1 - u_i a_i v_i.
    for (int i = 0; i < t_count; ++i) {
      const double e = 1.0 - u[static_cast<std::size_t>(i)] * amp[static_cast<std::size_t>(i)] *
                                 v[static_cast<std::size_t>(i)];
      mse_w[static_cast<std::size_t>(i)] = net.weight[static_cast<std::size_t>(i)] / e;
    }
    // Transmit amplitudes, clipped to the box.
    for (int i = 0; i < t_count; ++i) {
      double den = 0.0;
      for (int j = 0; j < t_count; ++j) {
        den += mse_w[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)] *
               u[static_cast<std::size_t>(j)] * net.g(i, j);
      }
      double vi = den > 0.0 ? mse_w[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)] *
                                  amp[static_cast<std::size_t>(i)] / den
                            : 0.0;
      v[static_cast<std::size_t>(i)] = std::clamp(vi, 0.0, v_max);
    }

    const double cur = objective();
    if (diag != nullptr) diag->objective_trace.push_back(cur);
    const double scale = std::max({std::fabs(prev), std::fabs(cur), 1e-12});
    if (std::fabs(cur - prev) < cfg.tolerance * scale) {
      prev = cur;
      ++iter;
      if (diag != nullptr) diag->converged = true;
      break;
    }
    prev = cur;
  }
  if (diag != nullptr) diag->iterations = iter;

  for (int i = 0; i < t_count; ++i) {
    powers[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
  }
  return finish(net, std::move(powers), start);
}

AllocationResult heuristic_allocate(const NetworkInstance& net) {
  if (net.pair_count < 1) throw std::invalid_argument("heuristic: empty network");
  const auto start = clock::now();
  const int t_count = net.pair_count;
  std::vector<int> order(static_cast<std::size_t>(t_count));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return net.g(a, a) > net.g(b, b); });
  const int active = (t_count + 1) / 2;  // ceil(T/2)
  std::vector<double> powers(static_cast<std::size_t>(t_count), 0.0);
  for (int k = 0; k < active; ++k) {
    powers[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = net.max_power;
  }
  return finish(net, std::move(powers), start);
}

AllocationResult max_power_allocate(const NetworkInstance& net) {
  const auto start = clock::now();
  return finish(net, std::vector<double>(static_cast<std::size_t>(net.pair_count), net.max_power),
                start);
}

AllocationResult random_allocate(const NetworkInstance& net, std::uint64_t seed) {
  const auto start = clock::now();
  rng::SplitMix64 gen(rng::derive_stream(seed, 0x72616e64ULL));
  std::vector<double> powers(static_cast<std::size_t>(net.pair_count));
  for (auto& p : powers) p = gen.next_uniform(0.0, net.max_power);
  return finish(net, std::move(powers), start);
}

}  // namespace prunegnn::baselines
