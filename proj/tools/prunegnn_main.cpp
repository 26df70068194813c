// Copyright 2026 The prunegnn Authors
// SPDX-License-Identifier: Apache-2.0
//
// prunegnn: threshold selection, dataset generation, GNN training and
// evaluation, variance/timing studies, and one-shot table/figure
// reproduction.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prunegnn/baselines.hpp"
#include "prunegnn/gnn.hpp"
#include "prunegnn/graph.hpp"
#include "prunegnn/harness.hpp"
#include "prunegnn/metrics.hpp"
#include "prunegnn/netsim.hpp"
#include "prunegnn/rng.hpp"
#include "prunegnn/stochgeo.hpp"

namespace {

using namespace prunegnn;
using stochgeo::PppParams;
using stochgeo::ThresholdSpec;

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    harness::write_text_file(out_path, content);
    std::cerr << "wrote " << out_path << '\n';
  }
}

// "auto" / "auto:0.98" resolve through the solvers; anything else parses
// as an explicit spec.
ThresholdSpec resolve_spec_arg(const std::string& text, const netsim::ScenarioConfig& scenario,
                               const std::string& kind_hint) {
  if (text.rfind("auto", 0) == 0) {
    double ratio = 0.95;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
      ratio = std::stod(text.substr(colon + 1));
    }
    const double lambda = scenario.fixed_pairs > 0
                              ? scenario.fixed_pairs / (scenario.region_side * scenario.region_side)
                              : scenario.intensity;
    const PppParams ppp{lambda, scenario.path_loss_exponent, scenario.reference_distance};
    if (kind_hint == "distance") return stochgeo::solve_distance_threshold(ppp, ratio);
    return stochgeo::solve_neighbour_threshold(ppp, ratio);
  }
  return ThresholdSpec::parse(text);
}

int cmd_thresholds(double alpha, double lambda, double ratio, const std::string& kind, int table,
                   const std::string& out) {
  if (table != 0) {
    harness::TableGrid grid;
    if (table == 1) {
      write_or_print(out, harness::make_table1_csv(grid));
    } else if (table == 2) {
      write_or_print(out, harness::make_table2_csv(grid));
    } else if (table == 3 || table == 4) {
      harness::VarianceStudyOptions vo;
      const auto result = harness::run_variance_study(vo);
      write_or_print(out, table == 3 ? result.distance_csv : result.neighbour_csv);
    } else {
      std::cerr << "error: --table must be 1..4\n";
      return 1;
    }
    return 0;
  }
  const PppParams ppp{lambda, alpha, 1.0};
  std::ostringstream csv;
  nlohmann::json cfg{{"alpha", alpha}, {"lambda", lambda}, {"ratio", ratio}, {"kind", kind}};
  csv << harness::provenance("thresholds", cfg.dump(), 0);
  csv << "kind,value,achieved_ratio\n";
  if (kind == "distance" || kind == "both") {
    const auto spec = stochgeo::solve_distance_threshold(ppp, ratio);
    csv << "distance," << harness::format_double(spec.distance) << ','
        << harness::format_double(spec.target_ratio) << '\n';
  }
  if (kind == "neighbour" || kind == "both") {
    const auto spec = stochgeo::solve_neighbour_threshold(ppp, ratio);
    csv << "neighbour," << spec.neighbour_count << ','
        << harness::format_double(spec.target_ratio) << '\n';
  }
  write_or_print(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-pruned graph neural networks for D2D power allocation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", harness::version_string());

  // thresholds ---------------------------------------------------------
  double th_alpha = 3.5, th_lambda = 0.01, th_ratio = 0.95;
  std::string th_kind = "both", th_out;
  int th_table = 0;
  auto* thresholds = app.add_subcommand("thresholds", "Solve pruning thresholds / emit tables");
  thresholds->add_option("--alpha", th_alpha, "Path-loss exponent");
  thresholds->add_option("--lambda", th_lambda, "Intensity, pairs per m^2");
  thresholds->add_option("--ratio", th_ratio, "Target captured-interference ratio");
  thresholds->add_option("--kind", th_kind, "distance|neighbour|both")
      ->check(CLI::IsMember({"distance", "neighbour", "both"}));
  thresholds->add_option("--table", th_table, "Emit a full table (1..4) instead");
  thresholds->add_option("--out", th_out, "Output file (default stdout)");

  // generate -----------------------------------------------------------
  netsim::ScenarioConfig gen_cfg;
  int gen_count = 100;
  std::string gen_out = "dataset.jsonl";
  auto* generate = app.add_subcommand("generate", "Sample a network dataset");
  generate->add_option("--count", gen_count, "Number of instances");
  generate->add_option("--pairs", gen_cfg.fixed_pairs, "Fixed pair count (0 = Poisson)");
  generate->add_option("--lambda", gen_cfg.intensity, "Intensity, pairs per m^2");
  generate->add_option("--region", gen_cfg.region_side, "Region side, meters");
  generate->add_option("--alpha", gen_cfg.path_loss_exponent, "Path-loss exponent");
  generate->add_option("--dmin", gen_cfg.d_min, "Min receiver offset, m");
  generate->add_option("--dmax", gen_cfg.d_max, "Max receiver offset, m");
  generate->add_option("--noise", gen_cfg.noise_power, "Noise power sigma^2");
  generate->add_option("--pmax", gen_cfg.max_power, "Max transmit power");
  generate->add_option("--seed", gen_cfg.seed, "RNG seed");
  generate->add_option("--out", gen_out, "Output JSONL path")->required();

  // train ----------------------------------------------------------------
  std::string tr_data, tr_spec = "auto", tr_out = "model.json", tr_log, tr_encoding = "reim";
  gnn::TrainConfig tr_cfg;
  int tr_layers = 3;
  auto* train = app.add_subcommand("train", "Train a threshold-pruned GNN");
  train->add_option("--data", tr_data, "Training dataset (JSONL)")->required();
  train->add_option("--spec", tr_spec, "distance:t | neighbour:n | complete | auto[:ratio]");
  train->add_option("--epochs", tr_cfg.epochs, "Training epochs");
  train->add_option("--batch", tr_cfg.batch_size, "Mini-batch size");
  train->add_option("--lr", tr_cfg.learning_rate, "Adam learning rate");
  train->add_option("--seed", tr_cfg.seed, "Training seed");
  train->add_option("--layers", tr_layers, "Message-passing layers");
  train->add_option("--encoding", tr_encoding, "reim|gain")
      ->check(CLI::IsMember({"reim", "gain"}));
  train->add_option("--out", tr_out, "Model output path");
  train->add_option("--log", tr_log, "Training-log CSV path");

  // eval -----------------------------------------------------------------
  std::string ev_model, ev_data, ev_spec, ev_baselines = "wmmse,heuristic,maxpower,random", ev_csv;
  std::uint64_t ev_seed = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate a model against baselines");
  eval->add_option("--model", ev_model, "Trained model file")->required();
  eval->add_option("--data", ev_data, "Evaluation dataset (JSONL)")->required();
  eval->add_option("--spec", ev_spec, "Pruning spec override (default: the trained spec)");
  eval->add_option("--baselines", ev_baselines, "Comma-separated baseline list");
  eval->add_option("--seed", ev_seed, "Seed for randomized baselines");
  eval->add_option("--csv", ev_csv, "Output CSV (default stdout)");

  // variance ---------------------------------------------------------------
  harness::VarianceStudyOptions var_opt;
  std::string var_outdir = ".";
  auto* variance = app.add_subcommand("variance", "Monte-Carlo captured-interference variance study");
  variance->add_option("--trials", var_opt.trials, "Trials per cell");
  variance->add_option("--seed", var_opt.seed, "RNG seed");
  variance->add_option("--region", var_opt.region_side, "Region side, m");
  variance->add_option("--ratio", var_opt.target_ratio, "Threshold target ratio");
  variance->add_option("--jobs", var_opt.jobs, "Worker threads");
  variance->add_option("--out-dir", var_outdir, "Directory for table3.csv/table4.csv");

  // timing ---------------------------------------------------------------
  harness::TimingOptions tm_opt;
  std::string tm_sizes = "50,100,200,400", tm_out = "timing.csv";
  auto* timing = app.add_subcommand("timing", "Inference-time scaling benchmark");
  timing->add_option("--sizes", tm_sizes, "Comma-separated pair counts");
  timing->add_option("--repeats", tm_opt.repeats, "Timed repetitions per point");
  timing->add_option("--warmups", tm_opt.warmups, "Warmup runs per point");
  timing->add_option("--alpha", tm_opt.alpha, "Path-loss exponent");
  timing->add_option("--lambda", tm_opt.lambda, "Intensity, pairs per m^2");
  timing->add_option("--ratio", tm_opt.target_ratio, "Threshold target ratio");
  timing->add_option("--seed", tm_opt.seed, "RNG seed");
  timing->add_option("--out", tm_out, "Output CSV");

  // reproduce --------------------------------------------------------------
  harness::ReproduceOptions rep_opt;
  auto* reproduce = app.add_subcommand("reproduce", "Reproduce a table or figure");
  reproduce->add_option("--table", rep_opt.table, "Table number (1..4)");
  reproduce->add_option("--figure", rep_opt.figure, "Figure number (3..5)");
  reproduce->add_option("--out-dir", rep_opt.out_dir, "Output directory");
  reproduce->add_option("--seed", rep_opt.seed, "RNG seed");
  reproduce->add_option("--trials", rep_opt.trials, "Variance-study trials");
  reproduce->add_option("--jobs", rep_opt.jobs, "Worker threads");
  reproduce->add_flag("--paper-scale", rep_opt.paper_scale,
                      "Full-size experiment preset (slow) instead of the desk preset");

  // config -----------------------------------------------------------------
  auto* config = app.add_subcommand("config", "Experiment-config utilities");
  auto* config_show = config->add_subcommand("show", "Dump the default config with all keys");
  std::string cfg_validate_path;
  auto* config_validate = config->add_subcommand("validate", "Schema-check a config file");
  config_validate->add_option("file", cfg_validate_path, "Config JSON path")->required();
  config->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (thresholds->parsed()) {
      return cmd_thresholds(th_alpha, th_lambda, th_ratio, th_kind, th_table, th_out);
    }

    if (generate->parsed()) {
      gen_cfg.validate();
      const auto instances = netsim::sample_dataset(gen_cfg, gen_count);
      netsim::write_dataset(instances, gen_cfg, gen_out);
      std::cerr << "wrote " << instances.size() << " instances to " << gen_out << '\n';
      return 0;
    }

    if (train->parsed()) {
      netsim::ScenarioConfig data_cfg;
      const auto dataset = netsim::read_dataset(tr_data, &data_cfg);
      const auto spec = resolve_spec_arg(tr_spec, data_cfg, "neighbour");
      gnn::GnnConfig model_cfg;
      model_cfg.layers = tr_layers;
      model_cfg.encoding =
          tr_encoding == "gain" ? gnn::ChannelEncoding::kGain : gnn::ChannelEncoding::kReIm;
      model_cfg.init_seed = tr_cfg.seed;
      auto model = gnn::GnnModel::create(model_cfg, data_cfg.max_power, {});
      const auto result = gnn::train(model, dataset, spec, tr_cfg);
      model.save(tr_out);
      std::cerr << "trained " << spec.describe() << " model for " << tr_cfg.epochs
                << " epochs; final loss " << result.log.back().mean_loss << "; saved to " << tr_out
                << '\n';
      if (!tr_log.empty()) {
        nlohmann::json cfg{{"data", tr_data}, {"spec", spec.describe()}, {"epochs", tr_cfg.epochs}};
        std::ostringstream csv;
        csv << harness::provenance("train", cfg.dump(), tr_cfg.seed);
        csv << "epoch,loss\n";
        for (const auto& entry : result.log) {
          csv << entry.epoch << ',' << harness::format_double(entry.mean_loss) << '\n';
        }
        harness::write_text_file(tr_log, csv.str());
      }
      return 0;
    }

    if (eval->parsed()) {
      netsim::ScenarioConfig data_cfg;
      const auto dataset = netsim::read_dataset(ev_data, &data_cfg);
      const auto model = gnn::GnnModel::load(ev_model);
      const auto spec = ev_spec.empty()
                            ? ThresholdSpec::parse(model.trained_spec)
                            : resolve_spec_arg(ev_spec, data_cfg, "neighbour");

      std::vector<std::string> baseline_names;
      std::stringstream ss(ev_baselines);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) baseline_names.push_back(item);
      }

      // Per-instance evaluation with WMMSE normalization.
      std::ostringstream csv;
      nlohmann::json cfg{{"model", ev_model}, {"data", ev_data}, {"spec", spec.describe()},
                         {"baselines", ev_baselines}};
      csv << harness::provenance("eval", cfg.dump(), ev_seed);
      csv << "instance_id,algorithm,sum_rate,normalized,time_s\n";
      std::vector<double> wmmse_rates(dataset.size(), 1.0);
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        wmmse_rates[i] = baselines::wmmse_allocate(dataset[i]).weighted_sum_rate;
      }
      auto emit = [&](const std::string& name, std::size_t i, const metrics::AllocationResult& r) {
        csv << i << ',' << name << ',' << harness::format_double(r.weighted_sum_rate) << ','
            << harness::format_double(wmmse_rates[i] > 0 ? r.weighted_sum_rate / wmmse_rates[i] : 0)
            << ',' << harness::format_double(r.inference_seconds) << '\n';
      };
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& net = dataset[i];
        for (const auto& name : baseline_names) {
          if (name == "wmmse") {
            emit(name, i, baselines::wmmse_allocate(net));
          } else if (name == "heuristic") {
            emit(name, i, baselines::heuristic_allocate(net));
          } else if (name == "maxpower") {
            emit(name, i, baselines::max_power_allocate(net));
          } else if (name == "random") {
            emit(name, i, baselines::random_allocate(net, rng::derive_stream(ev_seed, i)));
          } else {
            throw std::runtime_error("unknown baseline '" + name + "'");
          }
        }
        emit("gnn", i, gnn::infer_timed(model, net, spec, 3, 1));
      }
      write_or_print(ev_csv, csv.str());
      return 0;
    }

    if (variance->parsed()) {
      const auto result = harness::run_variance_study(var_opt);
      namespace fs = std::filesystem;
      fs::create_directories(var_outdir);
      harness::write_text_file((fs::path(var_outdir) / "table3.csv").string(), result.distance_csv);
      harness::write_text_file((fs::path(var_outdir) / "table4.csv").string(), result.neighbour_csv);
      if (result.low_intensity_variance_ratio) {
        std::cerr << "low-intensity variance ratio (distance/neighbour at lambda=0.002, alpha=5): "
                  << *result.low_intensity_variance_ratio << '\n';
      }
      if (!result.low_intensity_claim_holds) {
        std::cerr << "assertion failed: distance/neighbour variance ratio <= 10 under the "
                     "centre-probe capture convention\n";
        return 2;
      }
      return 0;
    }

    if (timing->parsed()) {
      tm_opt.sizes.clear();
      std::stringstream ss(tm_sizes);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) tm_opt.sizes.push_back(std::stoi(item));
      }
      const auto result = harness::run_timing(tm_opt);
      write_or_print(tm_out, result.csv);
      return 0;
    }

    if (reproduce->parsed()) return harness::reproduce(rep_opt);

    if (config_show->parsed()) {
      std::cout << harness::default_experiment_config_json() << '\n';
      return 0;
    }
    if (config_validate->parsed()) {
      std::ifstream in(cfg_validate_path);
      if (!in) throw std::runtime_error("cannot open '" + cfg_validate_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      harness::validate_experiment_config(buf.str());
      std::cerr << "config ok\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
