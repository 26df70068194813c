// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/metrics.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "prunegnn/rng.hpp"

using namespace prunegnn;
using namespace prunegnn::metrics;
using netsim::NetworkInstance;

namespace {

// Hand-assembled instance with prescribed gains (phases zero).
NetworkInstance make_instance(int t, const std::vector<double>& gains, double sigma2,
                              double p_max = 1.0) {
  NetworkInstance net;
  net.pair_count = t;
  net.noise_power = sigma2;
  net.max_power = p_max;
  net.weight.assign(t, 1.0);
  net.tx.assign(t, {0.0, 0.0});
  net.rx.assign(t, {0.0, 0.0});
  net.channel.resize(static_cast<std::size_t>(t) * t);
  for (std::size_t k = 0; k < net.channel.size(); ++k) net.channel[k] = std::sqrt(gains[k]);
  net.rebuild_derived();
  return net;
}

NetworkInstance random_instance(int t, std::uint64_t seed) {
  rng::SplitMix64 gen(seed);
  std::vector<double> gains(static_cast<std::size_t>(t) * t);
  for (auto& g : gains) g = gen.next_uniform(0.0, 1.0);
  auto net = make_instance(t, gains, 1e-4);
  for (auto& w : net.weight) w = gen.next_double();
  return net;
}

// Independent scalar-loop oracle, written from the SINR definition.
double oracle_weighted_sum_rate(const NetworkInstance& net, const std::vector<double>& p) {
  double total = 0.0;
  for (int t = 0; t < net.pair_count; ++t) {
    double den = net.noise_power;
    for (int j = 0; j < net.pair_count; ++j) {
      if (j == t) continue;
      den += std::norm(net.channel[static_cast<std::size_t>(j) * net.pair_count + t]) * p[j];
    }
    const double num = std::norm(net.channel[static_cast<std::size_t>(t) * net.pair_count + t]) * p[t];
    total += net.weight[t] * std::log2(1.0 + num / den);
  }
  return total;
}

}  // namespace

TEST_CASE("single pair at unit everything") {
  const auto net = make_instance(1, {1.0}, 1.0);
  const auto report = evaluate(net, std::vector<double>{1.0});
  CHECK(report.per_link_sinr[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.per_link_rate[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.weighted_sum_rate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("switched-off interferer leaves a clean link") {
  const auto net = make_instance(2, {1.0, 0.5, 0.5, 1.0}, 1.0);
  const auto report = evaluate(net, std::vector<double>{1.0, 0.0});
  CHECK(report.per_link_sinr[0] == doctest::Approx(1.0).epsilon(1e-12));  // no interference term
  CHECK(report.per_link_sinr[1] == 0.0);
}

TEST_CASE("matches an independent scalar-loop oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = random_instance(5, seed);
    rng::SplitMix64 gen(100 + seed);
    std::vector<double> p(5);
    for (auto& v : p) v = gen.next_double();
    const auto report = evaluate(net, p);
    CHECK(report.weighted_sum_rate == doctest::Approx(oracle_weighted_sum_rate(net, p)).epsilon(1e-12));
    double recomposed = 0.0;
    for (int t = 0; t < 5; ++t) recomposed += net.weight[t] * report.per_link_rate[t];
    CHECK(report.weighted_sum_rate == doctest::Approx(recomposed).epsilon(1e-12));
  }
}

TEST_CASE("scale consistency: joint gain/noise scaling leaves rates unchanged") {
  const auto net = random_instance(4, 11);
  std::vector<double> p{0.3, 0.9, 0.1, 0.6};
  const auto base = evaluate(net, p);

  for (double c : {10.0, 1e-3}) {
    auto scaled = net;
    for (auto& h : scaled.channel) h *= std::sqrt(c);
    scaled.noise_power *= c;
    scaled.rebuild_derived();
    const auto report = evaluate(scaled, p);
    for (int t = 0; t < 4; ++t) {
      CHECK(report.per_link_rate[t] == doctest::Approx(base.per_link_rate[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("own-power monotonicity") {
  const auto net = random_instance(4, 3);
  std::vector<double> p{0.4, 0.4, 0.4, 0.4};
  for (int t = 0; t < 4; ++t) {
    auto lo = p, hi = p;
    lo[t] = 0.2;
    hi[t] = 0.9;
    CHECK(evaluate(net, hi).per_link_rate[t] >= evaluate(net, lo).per_link_rate[t]);
  }
}

TEST_CASE("rejects out-of-box powers") {
  const auto net = make_instance(1, {1.0}, 1.0);
  CHECK_THROWS_AS(evaluate(net, std::vector<double>{1.5}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(net, std::vector<double>{-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(net, std::vector<double>{0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("normalized performance") {
  std::vector<double> a{2.0, 4.0};
  std::vector<double> b{2.0, 4.0};
  CHECK(normalized_performance(a, b) == doctest::Approx(1.0));
  std::vector<double> half{1.0, 2.0};
  CHECK(normalized_performance(half, b) == doctest::Approx(0.5));
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(normalized_performance(a, zero), std::invalid_argument);
  std::vector<double> mismatched{1.0};
  CHECK_THROWS_AS(normalized_performance(a, mismatched), std::invalid_argument);
}
