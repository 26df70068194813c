// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/baselines.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "prunegnn/rng.hpp"

using namespace prunegnn;
using namespace prunegnn::baselines;
using netsim::NetworkInstance;

namespace {

NetworkInstance from_gains(const std::vector<double>& gains, double sigma2, double p_max = 1.0) {
  NetworkInstance net;
  const int t = static_cast<int>(std::llround(std::sqrt(static_cast<double>(gains.size()))));
  net.pair_count = t;
  net.noise_power = sigma2;
  net.max_power = p_max;
  net.weight.assign(t, 1.0);
  net.tx.assign(t, {0.0, 0.0});
  net.rx.assign(t, {0.0, 0.0});
  net.channel.resize(gains.size());
  for (std::size_t k = 0; k < gains.size(); ++k) net.channel[k] = std::sqrt(gains[k]);
  net.rebuild_derived();
  return net;
}

netsim::ScenarioConfig desk_config(int pairs, std::uint64_t seed) {
  netsim::ScenarioConfig cfg;
  cfg.fixed_pairs = pairs;
  cfg.seed = seed;
  return cfg;
}

// Exhaustive search over the 2-pair power box on an N x N grid.
double grid_search_two_pair(const NetworkInstance& net, int n = 200) {
  double best = 0.0;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      const std::vector<double> p{net.max_power * a / n, net.max_power * b / n};
      best = std::max(best, metrics::evaluate(net, p).weighted_sum_rate);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("wmmse: single pair goes to full power") {
  const auto net = from_gains({0.8}, 1e-4);
  const auto result = wmmse_allocate(net);
  CHECK(result.powers[0] == doctest::Approx(1.0).epsilon(1e-9));

  // Identical to max power on one pair.
  const auto mp = max_power_allocate(net);
  CHECK(result.weighted_sum_rate == doctest::Approx(mp.weighted_sum_rate).epsilon(1e-12));
}

TEST_CASE("wmmse: overwhelming cross gains shut one pair down") {
  // Near-symmetric, cross gains far above direct gains. The optimum parks
  // the weaker pair at ~0; grid search confirms.
  const auto net = from_gains({1.0, 50.0, 50.0, 0.9}, 1e-2);
  const auto result = wmmse_allocate(net);
  CHECK(std::max(result.powers[0], result.powers[1]) > 0.95);
  CHECK(std::min(result.powers[0], result.powers[1]) < 0.05);

  const double best = grid_search_two_pair(net);
  CHECK(result.weighted_sum_rate >= best * 0.98);
}

TEST_CASE("wmmse beats the blunt baselines on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = sample_network(desk_config(3, seed));
    const auto w = wmmse_allocate(net);
    CHECK(w.weighted_sum_rate >= max_power_allocate(net).weighted_sum_rate - 1e-9);
    CHECK(w.weighted_sum_rate >= random_allocate(net, seed).weighted_sum_rate - 1e-9);
  }
}

TEST_CASE("wmmse objective is monotone and reaches a fixed point") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto net = sample_network(desk_config(6, 100 + seed));
    WmmseDiagnostics diag;
    const auto result = wmmse_allocate(net, {}, &diag);
    REQUIRE(diag.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < diag.objective_trace.size(); ++i) {
      CHECK(diag.objective_trace[i] >= diag.objective_trace[i - 1] - 1e-9);
    }

    // Determinism: the same solve twice is identical.
    const auto again = wmmse_allocate(net);
    CHECK(again.weighted_sum_rate == result.weighted_sum_rate);

    // Fixed point: one extra block sweep from the converged powers must not
    // move the objective beyond the convergence tolerance.
    WmmseConfig warm;
    warm.initial_powers = result.powers;
    warm.max_iters = 1;
    const auto rerun = wmmse_allocate(net, warm, nullptr);
    CHECK(std::fabs(rerun.weighted_sum_rate - result.weighted_sum_rate) <
          1e-6 * std::max(1.0, std::fabs(result.weighted_sum_rate)));
  }
}

TEST_CASE("wmmse stays within 2% of the 2-pair grid optimum") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto net = sample_network(desk_config(2, 500 + seed));
    const auto result = wmmse_allocate(net);
    const double best = grid_search_two_pair(net, 100);
    CHECK(result.weighted_sum_rate >= best * 0.98);
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("heuristic allocation") {
  SUBCASE("sorted direct gains pick the top half") {
    const auto net = from_gains({0.9, 0, 0, 0,
                                 0, 0.1, 0, 0,
                                 0, 0, 0.5, 0,
                                 0, 0, 0, 0.2},
                                1e-4);
    const auto result = heuristic_allocate(net);
    CHECK(result.powers == std::vector<double>{1.0, 0.0, 1.0, 0.0});
  }
  SUBCASE("single pair gets full power") {
    const auto net = from_gains({0.3}, 1e-4);
    CHECK(heuristic_allocate(net).powers == std::vector<double>{1.0});
  }
  SUBCASE("odd count activates ceil(T/2)") {
    const auto net = from_gains({0.5, 0, 0, 0, 0.6, 0, 0, 0, 0.4}, 1e-4);
    const auto powers = heuristic_allocate(net).powers;
    int active = 0;
    for (const double p : powers) active += p > 0.0 ? 1 : 0;
    CHECK(active == 2);
  }
  SUBCASE("ties choose lower indices") {
    const auto net = from_gains({0.5, 0, 0, 0,
                                 0, 0.5, 0, 0,
                                 0, 0, 0.5, 0,
                                 0, 0, 0, 0.5},
                                1e-4);
    CHECK(heuristic_allocate(net).powers == std::vector<double>{1.0, 1.0, 0.0, 0.0});
  }
}

TEST_CASE("max power and random baselines") {
  const auto net = sample_network(desk_config(5, 9));
  const auto mp = max_power_allocate(net);
  for (const double p : mp.powers) CHECK(p == net.max_power);

  const auto r1 = random_allocate(net, 7);
  const auto r2 = random_allocate(net, 7);
  const auto r3 = random_allocate(net, 8);
  CHECK(r1.powers == r2.powers);
  CHECK(r1.powers != r3.powers);
  for (const double p : r1.powers) {
    CHECK(p >= 0.0);
    CHECK(p < net.max_power);
  }

  // Rates are finite for every baseline (sigma^2 > 0).
  for (const auto& res : {mp, r1}) {
    CHECK(std::isfinite(res.weighted_sum_rate));
    CHECK(res.weighted_sum_rate >= 0.0);
  }
}

TEST_CASE("wmmse input validation") {
  auto net = from_gains({1.0}, 1e-4);
  WmmseConfig cfg;
  cfg.max_iters = 0;
  CHECK_THROWS_AS(wmmse_allocate(net, cfg), std::invalid_argument);
  net.noise_power = 0.0;
  CHECK_THROWS_AS(wmmse_allocate(net), std::invalid_argument);
}
