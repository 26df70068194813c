// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/netsim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "prunegnn/rng.hpp"

namespace prunegnn::netsim {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kInvSqrt2 = 0.70710678118654752440;

json weight_mode_to_json(WeightMode m) {
  return m == WeightMode::kAllOnes ? "all_ones" : "uniform_random";
}

WeightMode weight_mode_from_json(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "all_ones") return WeightMode::kAllOnes;
  if (s == "uniform_random") return WeightMode::kUniformRandom;
  throw std::runtime_error("dataset: unknown weight mode '" + s + "'");
}

json config_to_json(const ScenarioConfig& cfg) {
  return json{{"intensity", cfg.intensity},
              {"fixed_pairs", cfg.fixed_pairs},
              {"region_side", cfg.region_side},
              {"d_min", cfg.d_min},
              {"d_max", cfg.d_max},
              {"path_loss_exponent", cfg.path_loss_exponent},
              {"reference_distance", cfg.reference_distance},
              {"noise_power", cfg.noise_power},
              {"max_power", cfg.max_power},
              {"weight_mode", weight_mode_to_json(cfg.weight_mode)},
              {"seed", cfg.seed}};
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.intensity = j.at("intensity").get<double>();
  cfg.fixed_pairs = j.at("fixed_pairs").get<int>();
  cfg.region_side = j.at("region_side").get<double>();
  cfg.d_min = j.at("d_min").get<double>();
  cfg.d_max = j.at("d_max").get<double>();
  cfg.path_loss_exponent = j.at("path_loss_exponent").get<double>();
  cfg.reference_distance = j.at("reference_distance").get<double>();
  cfg.noise_power = j.at("noise_power").get<double>();
  cfg.max_power = j.at("max_power").get<double>();
  cfg.weight_mode = weight_mode_from_json(j.at("weight_mode"));
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

void NetworkInstance::rebuild_derived() {
  const std::size_t n = static_cast<std::size_t>(pair_count);
  gain.resize(n * n);
  distance.resize(n * n);
  for (int j = 0; j < pair_count; ++j) {
    for (int i = 0; i < pair_count; ++i) {
      const std::size_t k = idx(j, i);
      gain[k] = std::norm(channel[k]);
      distance[k] = std::hypot(tx[static_cast<std::size_t>(j)][0] - rx[static_cast<std::size_t>(i)][0],
                               tx[static_cast<std::size_t>(j)][1] - rx[static_cast<std::size_t>(i)][1]);
    }
  }
}

void ScenarioConfig::validate() const {
  if (fixed_pairs < 0) throw std::invalid_argument("ScenarioConfig: fixed_pairs must be >= 0");
  if (fixed_pairs == 0 && !(intensity > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: need a positive intensity or a fixed pair count");
  }
  if (!(region_side > 0.0)) throw std::invalid_argument("ScenarioConfig: region side must be > 0");
  if (!(d_min > 0.0) || d_min > d_max) {
    throw std::invalid_argument("ScenarioConfig: need 0 < d_min <= d_max");
  }
  if (!(path_loss_exponent > 2.0)) {
    throw std::invalid_argument("ScenarioConfig: path-loss exponent must be > 2");
  }
  if (!(reference_distance > 0.0)) {
    throw std::invalid_argument("ScenarioConfig: reference distance must be > 0");
  }
  if (!(noise_power > 0.0)) throw std::invalid_argument("ScenarioConfig: noise power must be > 0");
  if (!(max_power > 0.0)) throw std::invalid_argument("ScenarioConfig: max power must be > 0");
}

std::string ScenarioConfig::to_json_string() const { return config_to_json(*this).dump(); }

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

NetworkInstance sample_network(const ScenarioConfig& cfg, std::uint64_t index) {
  cfg.validate();
  rng::SplitMix64 gen(rng::derive_stream(cfg.seed, index));

  int pairs = cfg.fixed_pairs;
  if (pairs == 0) {
    // A zero-pair network is degenerate; redraw until at least one pair.
    do {
      pairs = gen.next_poisson(cfg.intensity * cfg.region_side * cfg.region_side);
    } while (pairs == 0);
  }

  NetworkInstance net;
  net.pair_count = pairs;
  net.noise_power = cfg.noise_power;
  net.max_power = cfg.max_power;
  net.reference_distance = cfg.reference_distance;
  net.tx.resize(static_cast<std::size_t>(pairs));
  net.rx.resize(static_cast<std::size_t>(pairs));
  net.weight.assign(static_cast<std::size_t>(pairs), 1.0);

  for (int t = 0; t < pairs; ++t) {
    net.tx[static_cast<std::size_t>(t)] = {gen.next_uniform(0.0, cfg.region_side),
                                           gen.next_uniform(0.0, cfg.region_side)};
  }
  // Receiver on a uniform-radius, uniform-angle annulus around its
  // transmitter (the radial law is a modelling choice; recorded in config).
  for (int t = 0; t < pairs; ++t) {
    const double angle = gen.next_uniform(0.0, kTwoPi);
    const double radius = gen.next_uniform(cfg.d_min, cfg.d_max);
    net.rx[static_cast<std::size_t>(t)] = {net.tx[static_cast<std::size_t>(t)][0] + radius * std::cos(angle),
                                           net.tx[static_cast<std::size_t>(t)][1] + radius * std::sin(angle)};
  }
  if (cfg.weight_mode == WeightMode::kUniformRandom) {
    for (int t = 0; t < pairs; ++t) net.weight[static_cast<std::size_t>(t)] = gen.next_double();
  }

  // h = sqrt(g) * f with g = min{1, (d/d0)^-alpha} and f ~ CN(0, 1),
  // drawn row-major so the layout pins the draw order.
  net.channel.resize(static_cast<std::size_t>(pairs) * static_cast<std::size_t>(pairs));
  for (int j = 0; j < pairs; ++j) {
    for (int i = 0; i < pairs; ++i) {
      const double d = std::hypot(net.tx[static_cast<std::size_t>(j)][0] - net.rx[static_cast<std::size_t>(i)][0],
                                  net.tx[static_cast<std::size_t>(j)][1] - net.rx[static_cast<std::size_t>(i)][1]);
      const double g = d <= cfg.reference_distance
                           ? 1.0
                           : std::pow(d / cfg.reference_distance, -cfg.path_loss_exponent);
      const double re = gen.next_normal() * kInvSqrt2;
      const double im = gen.next_normal() * kInvSqrt2;
      net.channel[net.idx(j, i)] = std::sqrt(g) * std::complex<double>(re, im);
    }
  }
  net.rebuild_derived();
  return net;
}

std::vector<NetworkInstance> sample_dataset(const ScenarioConfig& cfg, int count) {
  if (count < 0) throw std::invalid_argument("sample_dataset: count must be >= 0");
  std::vector<NetworkInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample_network(cfg, static_cast<std::uint64_t>(i)));
  return out;
}

void write_dataset(const std::vector<NetworkInstance>& instances,
                   const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset: cannot open '" + path + "'");

  json header{{"schema", "prunegnn.dataset"},
              {"version", 1},
              {"count", instances.size()},
              {"config", config_to_json(cfg)}};
  out << header.dump() << '\n';

  for (const auto& net : instances) {
    json flat_h = json::array();
    for (const auto& h : net.channel) {
      flat_h.push_back(h.real());
      flat_h.push_back(h.imag());
    }
    json jtx = json::array(), jrx = json::array();
    for (const auto& p : net.tx) jtx.push_back(json::array({p[0], p[1]}));
    for (const auto& p : net.rx) jrx.push_back(json::array({p[0], p[1]}));
    json line{{"t", net.pair_count},
              {"tx", std::move(jtx)},
              {"rx", std::move(jrx)},
              {"h", std::move(flat_h)},
              {"w", net.weight},
              {"noise_power", net.noise_power},
              {"max_power", net.max_power},
              {"reference_distance", net.reference_distance}};
    out << line.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write_dataset: write failed for '" + path + "'");
}

std::vector<NetworkInstance> read_dataset(const std::string& path, ScenarioConfig* cfg_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_dataset: empty file '" + path + "'");

  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("read_dataset: malformed header: " + std::string(e.what()));
  }
  if (!header.is_object() || header.value("schema", "") != "prunegnn.dataset") {
    throw std::runtime_error("read_dataset: not a prunegnn dataset (bad schema field)");
  }
  if (header.value("version", -1) != 1) {
    throw std::runtime_error("read_dataset: unsupported dataset version");
  }
  if (cfg_out != nullptr) *cfg_out = config_from_json(header.at("config"));

  const std::size_t count = header.at("count").get<std::size_t>();
  std::vector<NetworkInstance> out;
  out.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("read_dataset: malformed instance line: " + std::string(e.what()));
    }
    NetworkInstance net;
    net.pair_count = j.at("t").get<int>();
    const std::size_t n = static_cast<std::size_t>(net.pair_count);
    const auto& jtx = j.at("tx");
    const auto& jrx = j.at("rx");
    const auto& jh = j.at("h");
    if (jtx.size() != n || jrx.size() != n || jh.size() != 2 * n * n) {
      throw std::runtime_error("read_dataset: instance arrays do not match the pair count");
    }
    net.tx.resize(n);
    net.rx.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      net.tx[k] = {jtx[k][0].get<double>(), jtx[k][1].get<double>()};
      net.rx[k] = {jrx[k][0].get<double>(), jrx[k][1].get<double>()};
    }
    net.channel.resize(n * n);
    for (std::size_t k = 0; k < n * n; ++k) {
      net.channel[k] = {jh[2 * k].get<double>(), jh[2 * k + 1].get<double>()};
    }
    net.weight = j.at("w").get<std::vector<double>>();
    if (net.weight.size() != n) throw std::runtime_error("read_dataset: weight length mismatch");
    net.noise_power = j.at("noise_power").get<double>();
    net.max_power = j.at("max_power").get<double>();
    net.reference_distance = j.at("reference_distance").get<double>();
    net.rebuild_derived();
    out.push_back(std::move(net));
  }
  if (out.size() != count) {
    throw std::runtime_error("read_dataset: header count does not match the number of instance lines");
  }
  return out;
}

}  // namespace prunegnn::netsim
