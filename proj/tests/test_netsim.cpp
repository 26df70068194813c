// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "prunegnn/rng.hpp"

using namespace prunegnn;
using namespace prunegnn::netsim;

namespace {

ScenarioConfig desk_config() {
  ScenarioConfig cfg;
  cfg.fixed_pairs = 4;
  cfg.region_side = 100.0;
  cfg.path_loss_exponent = 3.5;
  cfg.seed = 7;
  return cfg;
}

double path_gain(double d, double alpha, double d0) {
  return d <= d0 ? 1.0 : std::pow(d / d0, -alpha);
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/prunegnn_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("fixed-pair sampling respects the documented geometry") {
  const auto cfg = desk_config();
  const auto net = sample_network(cfg);
  CHECK(net.pair_count == 4);
  CHECK(net.channel.size() == 16);
  for (int t = 0; t < 4; ++t) {
    CHECK(net.d(t, t) >= cfg.d_min);
    CHECK(net.d(t, t) <= cfg.d_max);
    // Derived distances agree with positions.
    for (int j = 0; j < 4; ++j) {
      const double want = std::hypot(net.tx[j][0] - net.rx[t][0], net.tx[j][1] - net.rx[t][1]);
      CHECK(net.d(j, t) == doctest::Approx(want).epsilon(1e-9));
      CHECK(net.g(j, t) == doctest::Approx(std::norm(net.h(j, t))).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling is deterministic per (config, index)") {
  const auto cfg = desk_config();
  const auto a = sample_network(cfg, 3);
  const auto b = sample_network(cfg, 3);
  const auto c = sample_network(cfg, 4);
  CHECK(a.channel == b.channel);
  CHECK(a.tx == b.tx);
  CHECK(a.channel != c.channel);
}

TEST_CASE("huge path-loss exponent kills cross gains") {
  auto cfg = desk_config();
  cfg.path_loss_exponent = 400.0;
  const auto net = sample_network(cfg);
  for (int j = 0; j < net.pair_count; ++j) {
    for (int i = 0; i < net.pair_count; ++i) {
      if (j != i) CHECK(net.g(j, i) < 1e-9);
    }
  }
}

TEST_CASE("poisson pair counts match the intensity") {
  ScenarioConfig cfg;
  cfg.intensity = 0.002;  // mean 20 pairs on 100x100
  cfg.seed = 21;
  double sum = 0.0;
  const int samples = 2000;
  for (int i = 0; i < samples; ++i) sum += sample_network(cfg, i).pair_count;
  const double mean = sum / samples;
  const double want = 0.002 * 100.0 * 100.0;
  const double se = std::sqrt(want / samples);
  CHECK(std::fabs(mean - want) < 3.0 * se);
}

TEST_CASE("fading is unit-variance complex gaussian") {
  auto cfg = desk_config();
  cfg.fixed_pairs = 10;

  // Mean of |h|^2 / g over 1e5 draws must sit within 1 percent of 1.
  double sum = 0.0;
  long draws = 0;
  for (std::uint64_t i = 0; draws < 100000; ++i) {
    const auto net = sample_network(cfg, i);
    for (int j = 0; j < net.pair_count && draws < 100000; ++j) {
      for (int t = 0; t < net.pair_count && draws < 100000; ++t) {
        sum += net.g(j, t) / path_gain(net.d(j, t), cfg.path_loss_exponent, cfg.reference_distance);
        ++draws;
      }
    }
  }
  CHECK(sum / draws == doctest::Approx(1.0).epsilon(0.01));

  // Kolmogorov-Smirnov against Exp(1) at the 1% level over 1e4 draws.
  std::vector<double> ratios;
  for (std::uint64_t i = 0; ratios.size() < 10000; ++i) {
    const auto net = sample_network(cfg, 1000 + i);
    for (int j = 0; j < net.pair_count && ratios.size() < 10000; ++j) {
      for (int t = 0; t < net.pair_count && ratios.size() < 10000; ++t) {
        ratios.push_back(net.g(j, t) /
                         path_gain(net.d(j, t), cfg.path_loss_exponent, cfg.reference_distance));
      }
    }
  }
  std::sort(ratios.begin(), ratios.end());
  double ks = 0.0;
  const double n = static_cast<double>(ratios.size());
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const double cdf = 1.0 - std::exp(-ratios[k]);
    ks = std::max(ks, std::fabs(cdf - static_cast<double>(k + 1) / n));
    ks = std::max(ks, std::fabs(cdf - static_cast<double>(k) / n));
  }
  CHECK(ks < 1.628 / std::sqrt(n));

  // Bounded path loss: the deterministic part of the gain never exceeds 1.
  const auto net = sample_network(cfg, 0);
  for (int j = 0; j < net.pair_count; ++j) {
    for (int t = 0; t < net.pair_count; ++t) {
      CHECK(path_gain(net.d(j, t), cfg.path_loss_exponent, cfg.reference_distance) <= 1.0);
      CHECK(std::isfinite(net.g(j, t)));
    }
  }
}

TEST_CASE("weight modes") {
  auto cfg = desk_config();
  const auto ones = sample_network(cfg, 0);
  for (const double w : ones.weight) CHECK(w == 1.0);

  cfg.weight_mode = WeightMode::kUniformRandom;
  const auto rnd = sample_network(cfg, 0);
  for (const double w : rnd.weight) {
    CHECK(w >= 0.0);
    CHECK(w < 1.0);
  }
}

TEST_CASE("dataset round trip is bit-exact") {
  auto cfg = desk_config();
  cfg.fixed_pairs = 5;
  const auto instances = sample_dataset(cfg, 10);

  TempFile file("roundtrip.jsonl");
  write_dataset(instances, cfg, file.path);
  ScenarioConfig cfg_back;
  const auto loaded = read_dataset(file.path, &cfg_back);

  REQUIRE(loaded.size() == instances.size());
  CHECK(cfg_back.to_json_string() == cfg.to_json_string());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].pair_count == instances[i].pair_count);
    CHECK(loaded[i].channel == instances[i].channel);
    CHECK(loaded[i].tx == instances[i].tx);
    CHECK(loaded[i].rx == instances[i].rx);
    CHECK(loaded[i].weight == instances[i].weight);
    CHECK(loaded[i].gain == instances[i].gain);
    CHECK(loaded[i].distance == instances[i].distance);
    CHECK(loaded[i].noise_power == instances[i].noise_power);
    CHECK(loaded[i].max_power == instances[i].max_power);
  }
}

TEST_CASE("empty dataset round trips") {
  const auto cfg = desk_config();
  TempFile file("empty.jsonl");
  write_dataset({}, cfg, file.path);
  const auto loaded = read_dataset(file.path);
  CHECK(loaded.empty());
}

TEST_CASE("corrupted headers raise schema errors") {
  TempFile file("corrupt.jsonl");
  {
    std::ofstream out(file.path);
    out << "{\"schema\":\"something_else\",\"version\":1,\"count\":0}\n";
  }
  CHECK_THROWS_AS(read_dataset(file.path), std::runtime_error);
  {
    std::ofstream out(file.path);
    out << "not json at all\n";
  }
  CHECK_THROWS_AS(read_dataset(file.path), std::runtime_error);
  CHECK_THROWS_AS(read_dataset("/nonexistent/prunegnn.jsonl"), std::runtime_error);
}

TEST_CASE("config validation") {
  ScenarioConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // neither intensity nor pairs
  cfg.fixed_pairs = 4;
  CHECK_NOTHROW(cfg.validate());
  cfg.d_min = 11.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // d_min > d_max
  cfg.d_min = 2.0;
  cfg.path_loss_exponent = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
