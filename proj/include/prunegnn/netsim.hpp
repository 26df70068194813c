// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Random D2D network realizations: Poisson (or fixed-count) transmitter
// placement, annulus-placed receivers, bounded path loss with Rayleigh
// fading, and a JSON-lines dataset format that round-trips bit-exactly.

#ifndef PRUNEGNN_NETSIM_HPP
#define PRUNEGNN_NETSIM_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace prunegnn::netsim {

struct NetworkInstance {
  int pair_count = 0;  // T
  std::vector<std::array<double, 2>> tx;  // transmitter positions, meters
  std::vector<std::array<double, 2>> rx;  // paired receiver positions

  // Row-major T x T matrices indexed (j, i): transmitter j into the
  // receiver paired with i. Diagonals are the direct links.
  std::vector<std::complex<double>> channel;  // h
  std::vector<double> gain;                   // |h|^2
  std::vector<double> distance;               // dist(tx_j, rx_i)

  std::vector<double> weight;  // w_t in [0, 1]
  double noise_power = 0.0;         // sigma^2
  double max_power = 0.0;           // P_max
  double reference_distance = 1.0;  // d0 of the channel model

  std::size_t idx(int j, int i) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(pair_count) +
           static_cast<std::size_t>(i);
  }
  std::complex<double> h(int j, int i) const { return channel[idx(j, i)]; }
  double g(int j, int i) const { return gain[idx(j, i)]; }
  double d(int j, int i) const { return distance[idx(j, i)]; }

  // Recomputes gain and distance from channel and positions.
  void rebuild_derived();
};

enum class WeightMode { kAllOnes, kUniformRandom };

struct ScenarioConfig {
  double intensity = 0.0;   // pairs per square meter; used when fixed_pairs == 0
  int fixed_pairs = 0;      // exact T when > 0
  double region_side = 100.0;
  double d_min = 2.0;       // receiver offset bounds, meters
  double d_max = 10.0;
  double path_loss_exponent = 3.5;
  double reference_distance = 1.0;
  double noise_power = 1e-4;
  double max_power = 1.0;
  WeightMode weight_mode = WeightMode::kAllOnes;
  std::uint64_t seed = 1;

  void validate() const;
  std::string to_json_string() const;
  static ScenarioConfig from_json_string(const std::string& text);
};

// One realization. `index` selects an independent substream of cfg.seed so
// that dataset generation can fan out and still be reproducible.
NetworkInstance sample_network(const ScenarioConfig& cfg, std::uint64_t index = 0);

std::vector<NetworkInstance> sample_dataset(const ScenarioConfig& cfg, int count);

// JSON-lines: a header object with schema/version/config, then one
// instance per line. Doubles survive the round trip bit for bit.
void write_dataset(const std::vector<NetworkInstance>& instances,
                   const ScenarioConfig& cfg, const std::string& path);
std::vector<NetworkInstance> read_dataset(const std::string& path,
                                          ScenarioConfig* cfg_out = nullptr);

}  // namespace prunegnn::netsim

#endif  // PRUNEGNN_NETSIM_HPP
