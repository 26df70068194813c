// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunegnn/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "prunegnn/graph.hpp"
#include "prunegnn/rng.hpp"

#ifndef PRUNEGNN_VERSION
#define PRUNEGNN_VERSION "unknown"
#endif

namespace prunegnn::harness {

using nlohmann::json;
using stochgeo::PppParams;
using stochgeo::ThresholdSpec;

std::string version_string() { return PRUNEGNN_VERSION; }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xf];
    v >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

double lambda_of(const netsim::ScenarioConfig& cfg) {
  if (cfg.fixed_pairs > 0) return cfg.fixed_pairs / (cfg.region_side * cfg.region_side);
  return cfg.intensity;
}

ThresholdSpec resolve_spec(const std::string& kind, const PppParams& ppp, double ratio) {
  if (kind == "neighbour") return stochgeo::solve_neighbour_threshold(ppp, ratio);
  if (kind == "distance") return stochgeo::solve_distance_threshold(ppp, ratio);
  return ThresholdSpec::Complete();
}

// Least-squares slope of ln(y) against ln(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-12));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::string provenance(const std::string& tool, const std::string& config_json,
                       std::uint64_t seed) {
  std::ostringstream out;
  out << "# prunegnn " << tool << '\n';
  out << "# version=" << version_string() << " config_hash=" << hex64(fnv1a_hash(config_json))
      << " seed=" << seed << '\n';
  out << "# config=" << config_json << '\n';
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void parallel_for_ordered(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (jobs <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Threshold tables

namespace {

// Published table values for the default grids, used to flag divergences.
const double kDefaultAlphas[6] = {3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
const double kDefaultRatios[3] = {0.90, 0.95, 0.98};
const double kDefaultLambdas[5] = {0.002, 0.004, 0.01, 0.02, 0.03};
const int kPublishedTable1[3][6] = {{7, 4, 3, 2, 2, 2}, {12, 6, 4, 3, 2, 2}, {26, 10, 5, 4, 3, 3}};
const int kPublishedTable2[5][6] = {{2, 1, 1, 1, 1, 1},
                                    {3, 2, 1, 1, 1, 1},
                                    {5, 2, 2, 1, 1, 1},
                                    {9, 3, 2, 2, 2, 2},
                                    {13, 4, 2, 2, 2, 2}};

template <typename T, std::size_t N>
int index_in(const T (&arr)[N], double v) {
  for (std::size_t i = 0; i < N; ++i) {
    if (std::fabs(arr[i] - v) < 1e-12) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::string make_table1_csv(const TableGrid& grid) {
  if (grid.alphas.empty() || grid.ratios.empty()) {
    throw std::invalid_argument("make_table1_csv: grids must be non-empty");
  }
  json cfg{{"table", 1}, {"alphas", grid.alphas}, {"ratios", grid.ratios}, {"d0", grid.reference_distance}};
  std::ostringstream out;
  out << provenance("thresholds table=1", cfg.dump(), 0);
  out << "ratio";
  for (const double a : grid.alphas) out << ",alpha=" << format_double(a);
  out << '\n';
  std::vector<std::string> flags;
  for (const double ratio : grid.ratios) {
    out << format_double(ratio);
    for (const double alpha : grid.alphas) {
      // The ratio A_t does not depend on the intensity.
      const PppParams ppp{1.0, alpha, grid.reference_distance};
      const auto spec = stochgeo::solve_distance_threshold(ppp, ratio);
      const long units = std::lround(spec.distance / grid.reference_distance);
      out << ',' << units;
      const int ri = index_in(kDefaultRatios, ratio);
      const int ai = index_in(kDefaultAlphas, alpha);
      if (ri >= 0 && ai >= 0 && ai == 0) {  // the alpha = 3 column, flagged per cell
        const int published = kPublishedTable1[ri][ai];
        std::ostringstream flag;
        flag << "# flag: alpha=3 ratio=" << format_double(ratio) << " computed=" << units
             << " published=" << published
             << (units == published ? " (agrees)"
                                    : " (published entry fails the ratio formula; formula value kept)");
        flags.push_back(flag.str());
      }
    }
    out << '\n';
  }
  for (const auto& f : flags) out << f << '\n';
  return out.str();
}

std::string make_table2_csv(const TableGrid& grid) {
  if (grid.alphas.empty() || grid.lambdas.empty()) {
    throw std::invalid_argument("make_table2_csv: grids must be non-empty");
  }
  json cfg{{"table", 2},
           {"alphas", grid.alphas},
           {"lambdas", grid.lambdas},
           {"ratio", grid.table2_ratio},
           {"d0", grid.reference_distance}};
  std::ostringstream out;
  out << provenance("thresholds table=2", cfg.dump(), 0);
  out << "lambda";
  for (const double a : grid.alphas) out << ",alpha=" << format_double(a);
  out << '\n';
  std::vector<std::string> flags;
  for (const double lambda : grid.lambdas) {
    out << format_double(lambda);
    for (const double alpha : grid.alphas) {
      const PppParams ppp{lambda, alpha, grid.reference_distance};
      const auto spec = stochgeo::solve_neighbour_threshold(ppp, grid.table2_ratio);
      out << ',' << spec.neighbour_count;
      const int li = index_in(kDefaultLambdas, lambda);
      const int ai = index_in(kDefaultAlphas, alpha);
      if (li >= 0 && ai >= 0 && std::fabs(grid.table2_ratio - 0.95) < 1e-12) {
        const int published = kPublishedTable2[li][ai];
        if (published != spec.neighbour_count) {
          std::ostringstream flag;
          flag << "# flag: lambda=" << format_double(lambda) << " alpha=" << format_double(alpha)
               << " computed=" << spec.neighbour_count << " published=" << published
               << " (published entry fails the ratio definition; formula value kept)";
          flags.push_back(flag.str());
        }
      }
    }
    out << '\n';
  }
  for (const auto& f : flags) out << f << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Variance study

VarianceStudyResult run_variance_study(const VarianceStudyOptions& opt) {
  if (opt.lambdas.empty() || opt.alphas.empty()) {
    throw std::invalid_argument("run_variance_study: grids must be non-empty");
  }
  VarianceStudyResult result;
  const int cols = static_cast<int>(opt.alphas.size());
  const int count = static_cast<int>(opt.lambdas.size()) * cols;
  result.cells.resize(static_cast<std::size_t>(count));

  parallel_for_ordered(count, opt.jobs, [&](int idx) {
    const double lambda = opt.lambdas[static_cast<std::size_t>(idx / cols)];
    const double alpha = opt.alphas[static_cast<std::size_t>(idx % cols)];
    const PppParams ppp{lambda, alpha, opt.reference_distance};
    VarianceCell cell;
    cell.lambda = lambda;
    cell.alpha = alpha;
    cell.distance_spec = stochgeo::solve_distance_threshold(ppp, opt.target_ratio);
    cell.neighbour_spec = stochgeo::solve_neighbour_threshold(ppp, opt.target_ratio);
    cell.distance_stats = stochgeo::monte_carlo_interference_stats(
        ppp, cell.distance_spec, opt.region_side, opt.trials,
        rng::derive_stream(opt.seed, static_cast<std::uint64_t>(2 * idx)));
    cell.neighbour_stats = stochgeo::monte_carlo_interference_stats(
        ppp, cell.neighbour_spec, opt.region_side, opt.trials,
        rng::derive_stream(opt.seed, static_cast<std::uint64_t>(2 * idx + 1)));
    result.cells[static_cast<std::size_t>(idx)] = std::move(cell);
  });

  json cfg{{"lambdas", opt.lambdas},     {"alphas", opt.alphas},
           {"ratio", opt.target_ratio},  {"region_side", opt.region_side},
           {"trials", opt.trials},       {"d0", opt.reference_distance}};
  auto emit = [&](bool neighbour) {
    std::ostringstream out;
    out << provenance(neighbour ? "variance table=4" : "variance table=3", cfg.dump(), opt.seed);
    out << "lambda";
    for (const double a : opt.alphas) out << ",alpha=" << format_double(a);
    out << '\n';
    for (std::size_t li = 0; li < opt.lambdas.size(); ++li) {
      out << format_double(opt.lambdas[li]);
      for (std::size_t ai = 0; ai < opt.alphas.size(); ++ai) {
        const auto& cell = result.cells[li * opt.alphas.size() + ai];
        out << ',' << format_double(neighbour ? cell.neighbour_stats.variance
                                              : cell.distance_stats.variance);
      }
      out << '\n';
    }
    return out.str();
  };
  result.distance_csv = emit(false);
  result.neighbour_csv = emit(true);

  for (const auto& cell : result.cells) {
    if (std::fabs(cell.lambda - 0.002) < 1e-12 && std::fabs(cell.alpha - 5.0) < 1e-12 &&
        cell.neighbour_stats.variance > 0.0) {
      result.low_intensity_variance_ratio =
          cell.distance_stats.variance / cell.neighbour_stats.variance;
      result.low_intensity_claim_holds = *result.low_intensity_variance_ratio > 10.0;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation shared by the performance pipeline and the eval CLI

namespace {

struct EvalInput {
  std::string name;
  const gnn::GnnModel* model = nullptr;  // null => baseline
  ThresholdSpec spec;
};

struct EvalOutput {
  std::vector<AlgorithmSummary> summary;
  std::string csv;
};

EvalOutput evaluate_algorithms(const std::vector<EvalInput>& algorithms,
                               const std::vector<netsim::NetworkInstance>& instances,
                               const std::vector<std::string>& baseline_names,
                               const std::string& config_json, std::uint64_t seed) {
  if (instances.empty()) throw std::invalid_argument("evaluate_algorithms: empty evaluation set");

  struct Row {
    std::string name;
    std::vector<double> rates;
    std::vector<double> times;
  };
  std::vector<Row> rows;

  // WMMSE anchors the normalization, so it always runs first.
  Row wmmse_row{"wmmse", {}, {}};
  for (const auto& net : instances) {
    const auto res = baselines::wmmse_allocate(net);
    wmmse_row.rates.push_back(res.weighted_sum_rate);
    wmmse_row.times.push_back(res.inference_seconds);
  }
  rows.push_back(std::move(wmmse_row));

  for (const auto& name : baseline_names) {
    if (name == "wmmse") continue;
    Row row{name, {}, {}};
    for (std::size_t i = 0; i < instances.size(); ++i) {
      metrics::AllocationResult res;
      if (name == "heuristic") {
        res = baselines::heuristic_allocate(instances[i]);
      } else if (name == "maxpower") {
        res = baselines::max_power_allocate(instances[i]);
      } else if (name == "random") {
        res = baselines::random_allocate(instances[i], rng::derive_stream(seed, i));
      } else {
        throw std::invalid_argument("unknown baseline '" + name + "'");
      }
      row.rates.push_back(res.weighted_sum_rate);
      row.times.push_back(res.inference_seconds);
    }
    rows.push_back(std::move(row));
  }

  for (const auto& alg : algorithms) {
    if (alg.model == nullptr) continue;
    Row row{alg.name, {}, {}};
    for (const auto& net : instances) {
      const auto res = gnn::infer_timed(*alg.model, net, alg.spec, 3, 1);
      row.rates.push_back(res.weighted_sum_rate);
      row.times.push_back(res.inference_seconds);
    }
    rows.push_back(std::move(row));
  }

  const auto& wmmse_rates = rows.front().rates;
  double wmmse_mean = 0.0;
  for (const double r : wmmse_rates) wmmse_mean += r;
  wmmse_mean /= static_cast<double>(wmmse_rates.size());

  EvalOutput out;
  std::ostringstream csv;
  csv << provenance("eval", config_json, seed);
  csv << "instance_id,algorithm,sum_rate,normalized,time_s\n";
  for (const auto& row : rows) {
    double mean_rate = 0.0, mean_time = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      csv << i << ',' << row.name << ',' << format_double(row.rates[i]) << ','
          << format_double(wmmse_rates[i] > 0.0 ? row.rates[i] / wmmse_rates[i] : 0.0) << ','
          << format_double(row.times[i]) << '\n';
      mean_rate += row.rates[i];
      mean_time += row.times[i];
    }
    mean_rate /= static_cast<double>(instances.size());
    mean_time /= static_cast<double>(instances.size());
    AlgorithmSummary s;
    s.name = row.name;
    s.mean_sum_rate = mean_rate;
    s.normalized_vs_wmmse = wmmse_mean > 0.0 ? mean_rate / wmmse_mean : 0.0;
    s.mean_time_seconds = mean_time;
    out.summary.push_back(s);
  }
  for (const auto& s : out.summary) {
    csv << "# summary: algorithm=" << s.name << " mean_sum_rate=" << format_double(s.mean_sum_rate)
        << " normalized=" << format_double(s.normalized_vs_wmmse)
        << " mean_time_s=" << format_double(s.mean_time_seconds) << '\n';
  }
  out.csv = csv.str();
  return out;
}

}  // namespace

PerformanceResult run_performance_experiment(const PerformanceOptions& opt) {
  opt.scenario.validate();
  const double lambda = lambda_of(opt.scenario);
  const PppParams ppp{lambda, opt.scenario.path_loss_exponent, opt.scenario.reference_distance};

  auto train_cfg = opt.scenario;
  const auto train_set = netsim::sample_dataset(train_cfg, opt.train_count);
  std::vector<netsim::NetworkInstance> test_set;
  test_set.reserve(static_cast<std::size_t>(opt.test_count));
  for (int i = 0; i < opt.test_count; ++i) {
    test_set.push_back(netsim::sample_network(train_cfg, (1ULL << 20) + static_cast<std::uint64_t>(i)));
  }

  PerformanceResult result;
  std::vector<EvalInput> algorithms;
  std::vector<std::string> failures;

  struct Variant {
    std::string name;
    bool enabled;
    std::string kind;
  };
  const Variant variants[] = {{"ngnn", opt.include_ngnn, "neighbour"},
                              {"dgnn", opt.include_dgnn, "distance"},
                              {"cgnn", opt.include_complete, "complete"}};
  for (const auto& variant : variants) {
    if (!variant.enabled) continue;
    const auto spec = resolve_spec(variant.kind, ppp, opt.target_ratio);
    try {
      auto model = gnn::GnnModel::create(opt.model, opt.scenario.max_power, {});
      const auto log = gnn::train(model, train_set, spec, opt.train);
      if (variant.name == "ngnn") result.ngnn_log = log.log;
      result.models.emplace(variant.name, std::move(model));
      algorithms.push_back(EvalInput{variant.name, &result.models.at(variant.name), spec});
    } catch (const std::runtime_error& e) {
      // Divergence aborts this cell only.
      failures.push_back(variant.name + ": " + e.what());
    }
  }

  json cfg{{"scenario", json::parse(opt.scenario.to_json_string())},
           {"train_count", opt.train_count},
           {"test_count", opt.test_count},
           {"target_ratio", opt.target_ratio},
           {"epochs", opt.train.epochs},
           {"batch_size", opt.train.batch_size},
           {"learning_rate", opt.train.learning_rate},
           {"train_seed", opt.train.seed}};
  auto eval = evaluate_algorithms(algorithms, test_set, opt.baseline_names, cfg.dump(), opt.train.seed);
  result.summary = std::move(eval.summary);
  std::ostringstream csv;
  csv << eval.csv;
  for (const auto& f : failures) {
    csv << "# error: training diverged for " << f << '\n';
    AlgorithmSummary s;
    s.name = f.substr(0, f.find(':'));
    s.failed = true;
    result.summary.push_back(s);
  }
  result.csv = csv.str();
  return result;
}

GeneralisationResult run_generalisation(const gnn::GnnModel& model,
                                        const netsim::ScenarioConfig& base,
                                        const std::vector<GeneralisationCell>& cells,
                                        double target_ratio, int eval_count,
                                        std::uint64_t seed) {
  if (cells.empty()) throw std::invalid_argument("run_generalisation: no cells");
  if (model.stats.empty()) {
    throw std::runtime_error("run_generalisation: model lacks feature statistics (stale model)");
  }
  const auto trained = ThresholdSpec::parse(model.trained_spec.empty() ? "complete" : model.trained_spec);

  GeneralisationResult result;
  std::ostringstream csv;
  json cfg{{"base", json::parse(base.to_json_string())},
           {"ratio", target_ratio},
           {"eval_count", eval_count},
           {"trained_spec", model.trained_spec}};
  csv << provenance("generalisation", cfg.dump(), seed);
  csv << "pairs,region_side,spec,normalized_vs_wmmse\n";

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto scenario = base;
    scenario.fixed_pairs = cells[c].pairs;
    scenario.region_side = cells[c].region_side;
    scenario.seed = rng::derive_stream(seed, c);
    scenario.validate();
    const double lambda = lambda_of(scenario);
    const PppParams ppp{lambda, scenario.path_loss_exponent, scenario.reference_distance};
    ThresholdSpec spec = trained;
    if (trained.kind == stochgeo::ThresholdKind::kNeighbour) {
      spec = stochgeo::solve_neighbour_threshold(ppp, target_ratio);
    } else if (trained.kind == stochgeo::ThresholdKind::kDistance) {
      spec = stochgeo::solve_distance_threshold(ppp, target_ratio);
    }

    double model_sum = 0.0, wmmse_sum = 0.0;
    for (int i = 0; i < eval_count; ++i) {
      const auto net = netsim::sample_network(scenario, static_cast<std::uint64_t>(i));
      const auto g = graph::build_graph(net, spec);
      const auto powers = gnn::gnn_forward(model, g);
      model_sum += metrics::evaluate(net, powers).weighted_sum_rate;
      wmmse_sum += baselines::wmmse_allocate(net).weighted_sum_rate;
    }
    GeneralisationRow row;
    row.cell = cells[c];
    row.spec = spec;
    row.normalized_vs_wmmse = wmmse_sum > 0.0 ? model_sum / wmmse_sum : 0.0;
    result.rows.push_back(row);
    csv << cells[c].pairs << ',' << format_double(cells[c].region_side) << ',' << spec.describe()
        << ',' << format_double(row.normalized_vs_wmmse) << '\n';
  }
  result.csv = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// Timing

TimingResult run_timing(const TimingOptions& opt) {
  if (opt.sizes.empty()) throw std::invalid_argument("run_timing: no sizes");
  const PppParams ppp{opt.lambda, opt.alpha, opt.reference_distance};
  const auto n_spec = stochgeo::solve_neighbour_threshold(ppp, opt.target_ratio);
  const auto d_spec = stochgeo::solve_distance_threshold(ppp, opt.target_ratio);

  // Timing depends on the architecture and the edge count, not on trained
  // weights, so a seeded random model with identity scaling suffices.
  gnn::FeatureStats identity;
  const auto enc = gnn::ChannelEncoding::kReIm;
  identity.vertex_mean.assign(static_cast<std::size_t>(gnn::vertex_feature_dim(enc)), 0.0);
  identity.vertex_std.assign(static_cast<std::size_t>(gnn::vertex_feature_dim(enc)), 1.0);
  identity.edge_mean.assign(static_cast<std::size_t>(gnn::edge_feature_dim(enc)), 0.0);
  identity.edge_std.assign(static_cast<std::size_t>(gnn::edge_feature_dim(enc)), 1.0);
  gnn::GnnConfig model_cfg;
  model_cfg.init_seed = opt.seed;
  const auto model = gnn::GnnModel::create(model_cfg, 1.0, identity);

  TimingResult result;
  struct Series {
    std::vector<double> sizes, times;
  };
  std::map<std::string, Series> series;

  for (std::size_t si = 0; si < opt.sizes.size(); ++si) {
    const int pairs = opt.sizes[si];
    netsim::ScenarioConfig scenario;
    scenario.fixed_pairs = pairs;
    scenario.region_side = std::sqrt(static_cast<double>(pairs) / opt.lambda);
    scenario.path_loss_exponent = opt.alpha;
    scenario.reference_distance = opt.reference_distance;
    scenario.seed = rng::derive_stream(opt.seed, si);
    const auto net = netsim::sample_network(scenario, 0);

    struct Algo {
      std::string name;
      ThresholdSpec spec;
      bool enabled;
    };
    const Algo algos[] = {{"ngnn", n_spec, true},
                          {"dgnn", d_spec, opt.include_dgnn},
                          {"cgnn", ThresholdSpec::Complete(), true}};
    for (const auto& algo : algos) {
      if (!algo.enabled) continue;
      const auto res = gnn::infer_timed(model, net, algo.spec, opt.repeats, opt.warmups);
      TimingRow row;
      row.algorithm = algo.name;
      row.pairs = pairs;
      row.edges = static_cast<long>(graph::build_graph(net, algo.spec).edges.size());
      row.median_seconds = res.inference_seconds;
      result.rows.push_back(row);
      series[algo.name].sizes.push_back(static_cast<double>(pairs));
      series[algo.name].times.push_back(row.median_seconds);
    }
    if (opt.include_wmmse) {
      std::vector<double> times;
      for (int r = 0; r < std::max(1, opt.repeats / 4); ++r) {
        times.push_back(baselines::wmmse_allocate(net).inference_seconds);
      }
      TimingRow row;
      row.algorithm = "wmmse";
      row.pairs = pairs;
      row.edges = static_cast<long>(pairs) * (pairs - 1);
      row.median_seconds = median_of(times);
      result.rows.push_back(row);
      series["wmmse"].sizes.push_back(static_cast<double>(pairs));
      series["wmmse"].times.push_back(row.median_seconds);
    }
  }

  for (const auto& [name, s] : series) {
    if (s.sizes.size() >= 2) result.loglog_slope[name] = loglog_slope(s.sizes, s.times);
  }

  json cfg{{"sizes", opt.sizes},       {"repeats", opt.repeats},
           {"warmups", opt.warmups},   {"alpha", opt.alpha},
           {"lambda", opt.lambda},     {"ratio", opt.target_ratio},
           {"neighbour", n_spec.neighbour_count}, {"distance", d_spec.distance}};
  std::ostringstream csv;
  csv << provenance("timing", cfg.dump(), opt.seed);
  csv << "algorithm,pairs,edges,median_time_s\n";
  for (const auto& row : result.rows) {
    csv << row.algorithm << ',' << row.pairs << ',' << row.edges << ','
        << format_double(row.median_seconds) << '\n';
  }
  for (const auto& [name, slope] : result.loglog_slope) {
    csv << "# slope: algorithm=" << name << " loglog=" << format_double(slope) << '\n';
  }
  result.csv = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// Reproduce driver

int reproduce(const ReproduceOptions& opt) {
  namespace fs = std::filesystem;
  if ((opt.table == 0) == (opt.figure == 0)) {
    throw std::invalid_argument("reproduce: select exactly one of --table or --figure");
  }
  fs::create_directories(opt.out_dir);
  const auto path = [&](const std::string& name) { return (fs::path(opt.out_dir) / name).string(); };
  int exit_code = 0;

  if (opt.table == 1) {
    write_text_file(path("table1.csv"), make_table1_csv(TableGrid{}));
  } else if (opt.table == 2) {
    write_text_file(path("table2.csv"), make_table2_csv(TableGrid{}));
  } else if (opt.table == 3 || opt.table == 4) {
    VarianceStudyOptions vo;
    vo.trials = opt.trials;
    vo.seed = opt.seed;
    vo.jobs = opt.jobs;
    const auto result = run_variance_study(vo);
    write_text_file(path("table3.csv"), result.distance_csv);
    write_text_file(path("table4.csv"), result.neighbour_csv);
    if (!result.low_intensity_claim_holds) {
      // The published low-intensity variance contrast does not emerge under
      // the centre-probe capture convention; surfaced as a failed assertion.
      exit_code = 2;
    }
  } else if (opt.figure == 3) {
    PerformanceOptions po;
    po.scenario.fixed_pairs = 20;
    po.scenario.path_loss_exponent = 3.5;
    po.scenario.seed = opt.seed;
    po.train.seed = opt.seed;
    po.train_count = opt.paper_scale ? 10000 : 2000;
    po.test_count = opt.paper_scale ? 2000 : 500;
    po.train.epochs = opt.paper_scale ? 120 : 60;
    po.include_dgnn = opt.paper_scale;
    po.include_complete = opt.paper_scale;
    const auto result = run_performance_experiment(po);
    write_text_file(path("figure3.csv"), result.csv);
    for (const auto& s : result.summary) {
      if (s.failed) exit_code = 2;
    }
    if (auto it = result.models.find("ngnn"); it != result.models.end()) {
      it->second.save(path("ngnn_model.json"));
    }
  } else if (opt.figure == 4 || opt.figure == 5) {
    TimingOptions to;
    to.seed = opt.seed;
    to.target_ratio = opt.figure == 4 ? 0.95 : 0.98;
    const auto result = run_timing(to);
    write_text_file(path(opt.figure == 4 ? "figure4.csv" : "figure5.csv"), result.csv);
  } else {
    throw std::invalid_argument("reproduce: unknown table/figure selection");
  }
  return exit_code;
}

// ---------------------------------------------------------------------------
// Experiment config document

std::string default_experiment_config_json() {
  json cfg{{"pairs", 20},
           {"intensity", 0.0},
           {"region_side", 100.0},
           {"d_min", 2.0},
           {"d_max", 10.0},
           {"path_loss_exponent", 3.5},
           {"reference_distance", 1.0},
           {"noise_power", 1e-4},
           {"max_power", 1.0},
           {"weight_mode", "all_ones"},
           {"target_ratio", 0.95},
           {"threshold", "auto"},
           {"train_count", 2000},
           {"test_count", 500},
           {"epochs", 60},
           {"batch_size", 64},
           {"learning_rate", 1e-3},
           {"layers", 3},
           {"encoding", "reim"},
           {"baselines", "wmmse,heuristic,maxpower,random"},
           {"seed", 1},
           {"jobs", 1},
           {"out_dir", "."}};
  return cfg.dump(2);
}

void validate_experiment_config(const std::string& json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw std::runtime_error("config: expected a flat JSON object");
  const json defaults = json::parse(default_experiment_config_json());
  for (const auto& [key, value] : cfg.items()) {
    const auto it = defaults.find(key);
    if (it == defaults.end()) throw std::runtime_error("config: unknown key '" + key + "'");
    if (value.type() != it->type() && !(value.is_number() && it->is_number())) {
      throw std::runtime_error("config: key '" + key + "' has the wrong type");
    }
  }
}

}  // namespace prunegnn::harness
