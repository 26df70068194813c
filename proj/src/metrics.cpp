// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace prunegnn::metrics {

RateReport evaluate(const netsim::NetworkInstance& net, std::span<const double> powers) {
  const int t_count = net.pair_count;
  if (powers.size() != static_cast<std::size_t>(t_count)) {
    throw std::invalid_argument("metrics::evaluate: power vector length mismatch");
  }
  const double box_slack = net.max_power * 1e-12;
  for (const double p : powers) {
    if (!(p >= -box_slack) || !(p <= net.max_power + box_slack)) {
      throw std::invalid_argument("metrics::evaluate: power outside [0, P_max] (caller bug)");
    }
  }

  RateReport report;
  report.per_link_sinr.resize(static_cast<std::size_t>(t_count));
  report.per_link_rate.resize(static_cast<std::size_t>(t_count));
  for (int t = 0; t < t_count; ++t) {
    double interference = 0.0;
    for (int j = 0; j < t_count; ++j) {
      if (j != t) interference += net.g(j, t) * powers[static_cast<std::size_t>(j)];
    }
    const double sinr = net.g(t, t) * powers[static_cast<std::size_t>(t)] /
                        (interference + net.noise_power);
    report.per_link_sinr[static_cast<std::size_t>(t)] = sinr;
    report.per_link_rate[static_cast<std::size_t>(t)] = std::log2(1.0 + sinr);
    report.weighted_sum_rate +=
        net.weight[static_cast<std::size_t>(t)] * report.per_link_rate[static_cast<std::size_t>(t)];
  }
  return report;
}

double normalized_performance(std::span<const double> alg_sum_rates,
                              std::span<const double> baseline_sum_rates) {
  if (alg_sum_rates.size() != baseline_sum_rates.size() || alg_sum_rates.empty()) {
    throw std::invalid_argument("normalized_performance: result sets must be equal-sized and non-empty");
  }
  double alg = 0.0, base = 0.0;
  for (const double v : alg_sum_rates) alg += v;
  for (const double v : baseline_sum_rates) base += v;
  if (base == 0.0) throw std::invalid_argument("normalized_performance: baseline mean is zero");
  return alg / base;
}

}  // namespace prunegnn::metrics
