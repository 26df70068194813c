// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/gnn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "prunegnn/rng.hpp"

namespace prunegnn::gnn {

using graph::InterferenceGraph;
using netsim::NetworkInstance;
using nlohmann::json;
using nn::Vec;

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double std_floor(double s) { return s > 1e-12 ? s : 1.0; }

// Standardize in place given (mean, std) vectors.
void standardize(Vec& feat, const Vec& mean, const Vec& stddev) {
  for (std::size_t i = 0; i < feat.size(); ++i) {
    feat[i] = (feat[i] - mean[i]) / std_floor(stddev[i]);
  }
}

struct EncodedFeatures {
  std::vector<Vec> vertex;  // standardized, per vertex
  std::vector<Vec> edge;    // standardized, aligned with g.edges
};

EncodedFeatures encode(const GnnModel& model, const InterferenceGraph& g) {
  if (model.stats.empty()) {
    throw std::runtime_error("gnn: model has no feature statistics (stale or untrained model)");
  }
  EncodedFeatures f;
  f.vertex.resize(static_cast<std::size_t>(g.vertex_count));
  for (int v = 0; v < g.vertex_count; ++v) {
    Vec raw = raw_vertex_features(g, v, model.encoding);
    standardize(raw, model.stats.vertex_mean, model.stats.vertex_std);
    f.vertex[static_cast<std::size_t>(v)] = std::move(raw);
  }
  f.edge.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    Vec raw = raw_edge_features(g, g.edges[e], model.encoding);
    standardize(raw, model.stats.edge_mean, model.stats.edge_std);
    f.edge[e] = std::move(raw);
  }
  return f;
}

json mlp_to_json(const nn::Mlp& m) {
  return json{{"dims", m.dims},
              {"output_activation",
               m.output_activation == nn::OutputActivation::kSigmoid ? "sigmoid" : "linear"},
              {"params", m.params}};
}

nn::Mlp mlp_from_json(const json& j) {
  nn::Mlp m;
  m.dims = j.at("dims").get<std::vector<int>>();
  m.output_activation = j.at("output_activation").get<std::string>() == "sigmoid"
                            ? nn::OutputActivation::kSigmoid
                            : nn::OutputActivation::kLinear;
  m.params = j.at("params").get<Vec>();
  if (m.params.size() != static_cast<std::size_t>(m.param_count())) {
    throw std::runtime_error("model file: parameter array does not match the layer dims");
  }
  return m;
}

}  // namespace

int vertex_feature_dim(ChannelEncoding encoding) {
  return encoding == ChannelEncoding::kReIm ? 4 : 3;  // channel(+), weight, distance
}

int edge_feature_dim(ChannelEncoding encoding) {
  return encoding == ChannelEncoding::kReIm ? 3 : 2;
}

nn::Vec raw_vertex_features(const InterferenceGraph& g, int v, ChannelEncoding enc) {
  const auto h = g.direct_channel[static_cast<std::size_t>(v)];
  const double d = g.direct_distance[static_cast<std::size_t>(v)] / g.reference_distance;
  const double w = g.weight[static_cast<std::size_t>(v)];
  if (enc == ChannelEncoding::kReIm) return {h.real(), h.imag(), w, d};
  return {std::norm(h), w, d};
}

nn::Vec raw_edge_features(const InterferenceGraph& g, const graph::Edge& e, ChannelEncoding enc) {
  const double d = e.distance / g.reference_distance;
  if (enc == ChannelEncoding::kReIm) return {e.channel.real(), e.channel.imag(), d};
  return {std::norm(e.channel), d};
}

GnnModel GnnModel::create(const GnnConfig& cfg, double max_power, FeatureStats stats) {
  if (cfg.layers < 1) throw std::invalid_argument("GnnModel: need at least one layer");
  if (!(max_power > 0.0)) throw std::invalid_argument("GnnModel: max power must be > 0");
  if (cfg.fa_hidden.empty() || cfg.fc_hidden.empty()) {
    throw std::invalid_argument("GnnModel: hidden layer lists must be non-empty");
  }

  const int m_dim = vertex_feature_dim(cfg.encoding) + 1;  // + current power
  const int e_dim = edge_feature_dim(cfg.encoding);

  std::vector<int> fa_dims;
  fa_dims.push_back(m_dim + e_dim);
  fa_dims.insert(fa_dims.end(), cfg.fa_hidden.begin(), cfg.fa_hidden.end());

  std::vector<int> fc_dims;
  fc_dims.push_back(fa_dims.back() + m_dim);
  fc_dims.insert(fc_dims.end(), cfg.fc_hidden.begin(), cfg.fc_hidden.end());
  fc_dims.push_back(1);

  GnnModel model;
  rng::SplitMix64 gen(rng::derive_stream(cfg.init_seed, 0));
  model.f_a = nn::Mlp::create(std::move(fa_dims), nn::OutputActivation::kLinear, gen);
  model.f_c = nn::Mlp::create(std::move(fc_dims), nn::OutputActivation::kSigmoid, gen);
  model.layers = cfg.layers;
  model.encoding = cfg.encoding;
  model.max_power = max_power;
  model.stats = std::move(stats);
  model.init_seed = cfg.init_seed;
  return model;
}

FeatureStats compute_feature_stats(std::span<const NetworkInstance> instances,
                                   const stochgeo::ThresholdSpec& spec, ChannelEncoding enc) {
  if (instances.empty()) throw std::invalid_argument("compute_feature_stats: empty dataset");
  const int vd = vertex_feature_dim(enc);
  const int ed = edge_feature_dim(enc);
  Vec vsum(static_cast<std::size_t>(vd), 0.0), vsq(static_cast<std::size_t>(vd), 0.0);
  Vec esum(static_cast<std::size_t>(ed), 0.0), esq(static_cast<std::size_t>(ed), 0.0);
  long vcount = 0, ecount = 0;
  for (const auto& net : instances) {
    const auto g = graph::build_graph(net, spec);
    for (int v = 0; v < g.vertex_count; ++v) {
      const Vec raw = raw_vertex_features(g, v, enc);
      for (int i = 0; i < vd; ++i) {
        vsum[static_cast<std::size_t>(i)] += raw[static_cast<std::size_t>(i)];
        vsq[static_cast<std::size_t>(i)] += raw[static_cast<std::size_t>(i)] * raw[static_cast<std::size_t>(i)];
      }
      ++vcount;
    }
    for (const auto& e : g.edges) {
      const Vec raw = raw_edge_features(g, e, enc);
      for (int i = 0; i < ed; ++i) {
        esum[static_cast<std::size_t>(i)] += raw[static_cast<std::size_t>(i)];
        esq[static_cast<std::size_t>(i)] += raw[static_cast<std::size_t>(i)] * raw[static_cast<std::size_t>(i)];
      }
      ++ecount;
    }
  }
  FeatureStats stats;
  stats.vertex_mean.resize(static_cast<std::size_t>(vd));
  stats.vertex_std.resize(static_cast<std::size_t>(vd));
  for (int i = 0; i < vd; ++i) {
    const double mean = vsum[static_cast<std::size_t>(i)] / static_cast<double>(vcount);
    stats.vertex_mean[static_cast<std::size_t>(i)] = mean;
    stats.vertex_std[static_cast<std::size_t>(i)] =
        std::sqrt(std::max(0.0, vsq[static_cast<std::size_t>(i)] / static_cast<double>(vcount) - mean * mean));
  }
  stats.edge_mean.assign(static_cast<std::size_t>(ed), 0.0);
  stats.edge_std.assign(static_cast<std::size_t>(ed), 1.0);
  if (ecount > 0) {
    for (int i = 0; i < ed; ++i) {
      const double mean = esum[static_cast<std::size_t>(i)] / static_cast<double>(ecount);
      stats.edge_mean[static_cast<std::size_t>(i)] = mean;
      stats.edge_std[static_cast<std::size_t>(i)] =
          std::sqrt(std::max(0.0, esq[static_cast<std::size_t>(i)] / static_cast<double>(ecount) - mean * mean));
    }
  }
  return stats;
}

std::vector<double> gnn_forward(const GnnModel& model, const InterferenceGraph& g) {
  const int m_dim = vertex_feature_dim(model.encoding) + 1;
  if (model.f_a.input_dim() != m_dim + edge_feature_dim(model.encoding) ||
      model.f_c.input_dim() != model.f_a.output_dim() + m_dim) {
    throw std::invalid_argument("gnn_forward: model and feature dimensions disagree");
  }
  const EncodedFeatures feat = encode(model, g);
  const double inv_pmax = 1.0 / model.max_power;
  const std::size_t n = static_cast<std::size_t>(g.vertex_count);
  const int agg_dim = model.f_a.output_dim();

  std::vector<double> power(n, model.max_power);
  std::vector<Vec> m(n);
  Vec fa_in(static_cast<std::size_t>(model.f_a.input_dim()));
  Vec fc_in(static_cast<std::size_t>(model.f_c.input_dim()));
  std::vector<Vec> agg(n);

  for (int layer = 0; layer < model.layers; ++layer) {
    for (std::size_t v = 0; v < n; ++v) {
      m[v] = feat.vertex[v];
      m[v].push_back(power[v] * inv_pmax);
    }
    for (std::size_t v = 0; v < n; ++v) {
      agg[v].assign(static_cast<std::size_t>(agg_dim), 0.0);
      for (const int e : g.in_edges[v]) {
        const auto& edge = g.edges[static_cast<std::size_t>(e)];
        const Vec& mu = m[static_cast<std::size_t>(edge.source)];
        const Vec& fe = feat.edge[static_cast<std::size_t>(e)];
        std::copy(mu.begin(), mu.end(), fa_in.begin());
        std::copy(fe.begin(), fe.end(), fa_in.begin() + static_cast<long>(mu.size()));
        const Vec out = model.f_a.apply(fa_in);
        for (int i = 0; i < agg_dim; ++i) agg[v][static_cast<std::size_t>(i)] += out[static_cast<std::size_t>(i)];
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::copy(agg[v].begin(), agg[v].end(), fc_in.begin());
      std::copy(m[v].begin(), m[v].end(), fc_in.begin() + agg_dim);
      const Vec out = model.f_c.apply(fc_in);
      power[v] = model.max_power * out[0];
    }
  }
  return power;
}

void Gradients::reset() {
  std::fill(f_a.begin(), f_a.end(), 0.0);
  std::fill(f_c.begin(), f_c.end(), 0.0);
}

double sum_rate_loss(std::span<const double> powers, const NetworkInstance& net) {
  const auto report = metrics::evaluate(net, powers);
  return -report.weighted_sum_rate;
}

nn::Vec sum_rate_loss_gradient(std::span<const double> powers, const NetworkInstance& net) {
  const int t_count = net.pair_count;
  // Per-receiver interference denominators and SINRs.
  Vec den(static_cast<std::size_t>(t_count), net.noise_power);
  Vec sinr(static_cast<std::size_t>(t_count), 0.0);
  for (int t = 0; t < t_count; ++t) {
    for (int j = 0; j < t_count; ++j) {
      if (j != t) den[static_cast<std::size_t>(t)] += net.g(j, t) * powers[static_cast<std::size_t>(j)];
    }
  }
  for (int t = 0; t < t_count; ++t) {
    sinr[static_cast<std::size_t>(t)] =
        net.g(t, t) * powers[static_cast<std::size_t>(t)] / den[static_cast<std::size_t>(t)];
  }
  Vec grad(static_cast<std::size_t>(t_count), 0.0);
  for (int k = 0; k < t_count; ++k) {
    double g = -net.weight[static_cast<std::size_t>(k)] * net.g(k, k) /
               (kLn2 * (1.0 + sinr[static_cast<std::size_t>(k)]) * den[static_cast<std::size_t>(k)]);
    for (int t = 0; t < t_count; ++t) {
      if (t == k) continue;
      g += net.weight[static_cast<std::size_t>(t)] * sinr[static_cast<std::size_t>(t)] * net.g(k, t) /
           (kLn2 * (1.0 + sinr[static_cast<std::size_t>(t)]) * den[static_cast<std::size_t>(t)]);
    }
    grad[static_cast<std::size_t>(k)] = g;
  }
  return grad;
}

nn::Tape::NodeId gnn_forward_tape(const GnnModel& model, const InterferenceGraph& g,
                                  const NetworkInstance& net, double loss_scale, nn::Tape& tape,
                                  Gradients& grads, std::vector<nn::Tape::NodeId>* power_nodes) {
  const EncodedFeatures feat = encode(model, g);
  const double inv_pmax = 1.0 / model.max_power;
  const std::size_t n = static_cast<std::size_t>(g.vertex_count);
  const int agg_dim = model.f_a.output_dim();

  std::vector<nn::Tape::NodeId> zfeat(n), fe_nodes(g.edges.size());
  for (std::size_t v = 0; v < n; ++v) zfeat[v] = tape.input(feat.vertex[v]);
  for (std::size_t e = 0; e < g.edges.size(); ++e) fe_nodes[e] = tape.input(feat.edge[e]);

  std::vector<nn::Tape::NodeId> p(n);
  for (std::size_t v = 0; v < n; ++v) p[v] = tape.input(Vec{model.max_power});

  std::vector<nn::Tape::NodeId> m(n);
  std::vector<nn::Tape::NodeId> fa_out;
  for (int layer = 0; layer < model.layers; ++layer) {
    for (std::size_t v = 0; v < n; ++v) {
      m[v] = tape.concat(zfeat[v], tape.scale(p[v], inv_pmax));
    }
    for (std::size_t v = 0; v < n; ++v) {
      nn::Tape::NodeId aggregated;
      if (g.in_edges[v].empty()) {
        aggregated = tape.zeros(agg_dim);
      } else {
        fa_out.clear();
        for (const int e : g.in_edges[v]) {
          const auto& edge = g.edges[static_cast<std::size_t>(e)];
          const auto fa_in = tape.concat(m[static_cast<std::size_t>(edge.source)],
                                         fe_nodes[static_cast<std::size_t>(e)]);
          fa_out.push_back(tape.mlp(model.f_a, fa_in, grads.f_a));
        }
        aggregated = tape.sum_of(fa_out);
      }
      const auto fc_in = tape.concat(aggregated, m[v]);
      p[v] = tape.scale(tape.mlp(model.f_c, fc_in, grads.f_c), model.max_power);
    }
  }

  if (power_nodes != nullptr) *power_nodes = p;

  // Loss node: gathers the final powers and backpropagates the analytic
  // gradient of the negative weighted sum rate.
  Vec powers(n);
  for (std::size_t v = 0; v < n; ++v) powers[v] = tape.value(p[v])[0];
  const double loss = loss_scale * sum_rate_loss(powers, net);
  std::vector<nn::Tape::NodeId> parents(p.begin(), p.end());
  return tape.custom(
      std::move(parents), Vec{loss},
      [&net, powers, loss_scale](const Vec& up, const std::vector<const Vec*>&,
                                 const std::vector<Vec*>& pgrads) {
        const Vec dldp = sum_rate_loss_gradient(powers, net);
        for (std::size_t k = 0; k < pgrads.size(); ++k) {
          (*pgrads[k])[0] += up[0] * loss_scale * dldp[k];
        }
      });
}

TrainResult train(GnnModel& model, std::span<const NetworkInstance> dataset,
                  const stochgeo::ThresholdSpec& spec, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw std::invalid_argument("train: epochs and batch size must be >= 1");
  }
  if (model.stats.empty()) {
    model.stats = compute_feature_stats(dataset, spec, model.encoding);
  }
  model.trained_spec = spec.describe();

  // Pruning is fixed during training, so graphs are built once.
  std::vector<InterferenceGraph> graphs;
  graphs.reserve(dataset.size());
  for (const auto& net : dataset) graphs.push_back(graph::build_graph(net, spec));

  nn::AdamState state_a, state_c;
  Gradients grads(model);
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with a per-epoch substream.
    rng::SplitMix64 shuffle(rng::derive_stream(cfg.seed, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double scale = 1.0 / static_cast<double>(end - start);
      grads.reset();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        nn::Tape tape;
        const auto loss_node =
            gnn_forward_tape(model, graphs[i], dataset[i], scale, tape, grads);
        batch_loss += tape.value(loss_node)[0];
        tape.backward(loss_node);
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("train: loss diverged (non-finite) at epoch " + std::to_string(epoch));
      }
      adam_step(model.f_a.params, grads.f_a, state_a, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);
      adam_step(model.f_c.params, grads.f_c, state_c, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps);
      epoch_loss += batch_loss * static_cast<double>(end - start);
    }
    result.log.push_back(TrainLogEntry{epoch, epoch_loss / static_cast<double>(dataset.size())});
  }
  return result;
}

metrics::AllocationResult infer_timed(const GnnModel& model, const NetworkInstance& net,
                                      const stochgeo::ThresholdSpec& spec, int repeats,
                                      int warmups) {
  if (repeats < 1) throw std::invalid_argument("infer_timed: repeats must be >= 1");
  using clock = std::chrono::steady_clock;

  std::vector<double> powers;
  for (int i = 0; i < warmups; ++i) {
    const auto g = graph::build_graph(net, spec);
    powers = gnn_forward(model, g);
  }
  std::vector<double> times(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = clock::now();
    const auto g = graph::build_graph(net, spec);
    powers = gnn_forward(model, g);
    const auto t1 = clock::now();
    times[static_cast<std::size_t>(i)] = std::chrono::duration<double>(t1 - t0).count();
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  const double median = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);

  metrics::AllocationResult result;
  result.weighted_sum_rate = metrics::evaluate(net, powers).weighted_sum_rate;
  result.powers = std::move(powers);
  result.inference_seconds = median;
  return result;
}

void GnnModel::save(const std::string& path) const {
  json j{{"schema", "prunegnn.model"},
         {"version", 1},
         {"layers", layers},
         {"encoding", encoding == ChannelEncoding::kReIm ? "reim" : "gain"},
         {"max_power", max_power},
         {"init_seed", init_seed},
         {"trained_spec", trained_spec},
         {"stats",
          json{{"vertex_mean", stats.vertex_mean},
               {"vertex_std", stats.vertex_std},
               {"edge_mean", stats.edge_mean},
               {"edge_std", stats.edge_std}}},
         {"f_a", mlp_to_json(f_a)},
         {"f_c", mlp_to_json(f_c)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("GnnModel::save: cannot open '" + path + "'");
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("GnnModel::save: write failed for '" + path + "'");
}

GnnModel GnnModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("GnnModel::load: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("GnnModel::load: malformed model file: " + std::string(e.what()));
  }
  if (j.value("schema", "") != "prunegnn.model") {
    throw std::runtime_error("GnnModel::load: not a prunegnn model file");
  }
  if (j.value("version", -1) != 1) throw std::runtime_error("GnnModel::load: unsupported version");
  if (!j.contains("stats")) {
    throw std::runtime_error("GnnModel::load: model file lacks feature statistics (stale model)");
  }

  GnnModel m;
  try {
    m.layers = j.at("layers").get<int>();
    m.encoding = j.at("encoding").get<std::string>() == "gain" ? ChannelEncoding::kGain
                                                               : ChannelEncoding::kReIm;
    m.max_power = j.at("max_power").get<double>();
    m.init_seed = j.at("init_seed").get<std::uint64_t>();
    m.trained_spec = j.value("trained_spec", "");
    const auto& s = j.at("stats");
    m.stats.vertex_mean = s.at("vertex_mean").get<Vec>();
    m.stats.vertex_std = s.at("vertex_std").get<Vec>();
    m.stats.edge_mean = s.at("edge_mean").get<Vec>();
    m.stats.edge_std = s.at("edge_std").get<Vec>();
    m.f_a = mlp_from_json(j.at("f_a"));
    m.f_c = mlp_from_json(j.at("f_c"));
  } catch (const json::exception& e) {
    throw std::runtime_error("GnnModel::load: malformed model file: " + std::string(e.what()));
  }
  if (m.stats.empty()) {
    throw std::runtime_error("GnnModel::load: model file lacks feature statistics (stale model)");
  }
  return m;
}

}  // namespace prunegnn::gnn
