// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference allocators the learned models are judged against: WMMSE
// block-coordinate ascent on the weighted sum rate, the top-half
// channel-gain heuristic, full power, and random power.

#ifndef PRUNEGNN_BASELINES_HPP
#define PRUNEGNN_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "prunegnn/metrics.hpp"
#include "prunegnn/netsim.hpp"

namespace prunegnn::baselines {

struct WmmseConfig {
  int max_iters = 100;
  double tolerance = 1e-6;  // relative objective change
  double p_init = -1.0;     // initial power; < 0 means P_max
  std::vector<double> initial_powers;  // per-pair warm start; overrides p_init
};

struct WmmseDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // weighted sum rate per iteration
};

metrics::AllocationResult wmmse_allocate(const netsim::NetworkInstance& net,
                                         const WmmseConfig& cfg = {},
                                         WmmseDiagnostics* diag = nullptr);

// Top ceil(T/2) direct gains get P_max, the rest 0; ties to lower index.
metrics::AllocationResult heuristic_allocate(const netsim::NetworkInstance& net);

metrics::AllocationResult max_power_allocate(const netsim::NetworkInstance& net);

// i.i.d. uniform on [0, P_max]; reproducible per seed.
metrics::AllocationResult random_allocate(const netsim::NetworkInstance& net, std::uint64_t seed);

}  // namespace prunegnn::baselines

#endif  // PRUNEGNN_BASELINES_HPP
