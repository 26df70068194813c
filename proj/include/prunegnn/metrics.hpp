// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// SINR, per-link rates, weighted sum rate, and normalized-performance
// reporting. Log base 2 throughout.

#ifndef PRUNEGNN_METRICS_HPP
#define PRUNEGNN_METRICS_HPP

#include <span>
#include <string>
#include <vector>

#include "prunegnn/netsim.hpp"

namespace prunegnn::metrics {

struct RateReport {
  std::vector<double> per_link_sinr;
  std::vector<double> per_link_rate;    // bits/s/Hz
  double weighted_sum_rate = 0.0;       // sum_t w_t * rate_t
};

// A power vector plus what it achieved and how long it took to produce.
struct AllocationResult {
  std::vector<double> powers;
  double weighted_sum_rate = 0.0;
  double inference_seconds = 0.0;
};

// Exact Eq.-of-motion evaluation; throws if a power leaves [0, P_max].
RateReport evaluate(const netsim::NetworkInstance& net, std::span<const double> powers);

// mean(alg sum rates) / mean(baseline sum rates).
double normalized_performance(std::span<const double> alg_sum_rates,
                              std::span<const double> baseline_sum_rates);

}  // namespace prunegnn::metrics

#endif  // PRUNEGNN_METRICS_HPP
