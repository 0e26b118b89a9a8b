// stagenet: stage-transition regulatory network inference from
// stage-structured expression data with staged-death missingness.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stagenet/baselines.hpp"
#include "stagenet/bench.hpp"
#include "stagenet/chain.hpp"
#include "stagenet/config.hpp"
#include "stagenet/io.hpp"
#include "stagenet/model.hpp"
#include "stagenet/subsample.hpp"

namespace {

using namespace stagenet;

struct CommonArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

// defaults -> config file -> explicit CLI flags
Settings resolve_settings(const CommonArgs& args) {
  Settings settings;
  if (!args.config_path.empty()) {
    settings.apply(KeyValueConfig::parse_file(args.config_path));
  }
  KeyValueConfig cli;
  for (const auto& [k, v] : args.overrides) cli.set(k, v);
  settings.apply(cli);
  return settings;
}

void add_key_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value configuration file");
  for (const KeySpec& spec : Settings::keys()) {
    auto* opt = cmd->add_option_function<std::string>(
        "--" + spec.key,
        [&args, key = spec.key](const std::string& v) { args.overrides[key] = v; },
        spec.description + " [" + spec.default_value + "]");
    opt->expected(1);
  }
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

int cmd_simulate(const CommonArgs& args, const std::string& out,
                 const std::string& truth_out) {
  const Settings s = resolve_settings(args);
  const Dims dims = s.make_dims();
  const PriorConfig prior = s.make_prior(dims);
  Rng rng(s.seed);
  const GlobalParams params = generate_global_params(rng, dims, prior);
  const RegulatoryModel truth = generate_network(rng, dims, s.sim_density);
  const RegulationCoefficients coeffs = generate_coefficients(rng, truth, prior);
  const ExpressionDataset data = simulate_dataset(truth, coeffs, params, dims, rng);
  emit(out, dataset_to_csv(data));
  if (!truth_out.empty()) {
    MetaMap meta{{"kind", "truth"}, {"seed", std::to_string(s.seed)},
                 {"density", format_number4(s.sim_density)}};
    write_text_file(truth_out, network_to_json(truth, nullptr, &params, meta));
  }
  return 0;
}

int cmd_infer(const CommonArgs& args, const std::string& data_path,
              const std::string& out) {
  const Settings s = resolve_settings(args);
  ExpressionDataset data = load_dataset(data_path);
  PriorConfig prior = s.make_prior(data.dims);
  Chain chain(std::move(data), prior, s.make_mcmc());
  const ChainSummary summary = chain.run();
  const NetworkEstimate estimate = extract_network(summary, s.min_support);
  MetaMap meta{{"kind", "inference"},
               {"seed", std::to_string(s.seed)},
               {"min_support", format_number4(s.min_support)},
               {"data", data_path}};
  if (s.format == "json") {
    emit(out, summary_to_json(summary, estimate, meta));
  } else {
    emit(out, network_to_tsv(estimate.model, &estimate.support));
  }
  return 0;
}

int cmd_baseline(const CommonArgs& args, const std::string& data_path,
                 const std::string& method, const std::string& out) {
  const Settings s = resolve_settings(args);
  const ExpressionDataset data = load_dataset(data_path);
  RegulatoryModel estimate;
  if (method == "pearson1") {
    estimate = pearson_network_observed(data);
  } else if (method == "pearson2") {
    estimate = pearson_network_imputed(impute_mean(data));
  } else if (method == "pearson3") {
    Rng rng(s.seed);
    estimate = pearson_network_imputed(
        impute_random_forest(data, s.rf_trees, s.rf_max_iters, rng));
  } else {
    throw CLI::ValidationError("--method", "expected pearson1|pearson2|pearson3");
  }
  MetaMap meta{{"kind", "baseline"}, {"method", method}, {"data", data_path},
               {"seed", std::to_string(s.seed)}};
  if (s.format == "json") {
    emit(out, network_to_json(estimate, nullptr, nullptr, meta));
  } else {
    emit(out, network_to_tsv(estimate, nullptr));
  }
  return 0;
}

int cmd_benchmark(const CommonArgs& args, const std::string& methods_csv,
                  const std::string& out) {
  const Settings s = resolve_settings(args);
  BenchConfig config;
  config.replicates = s.bench_replicates;
  config.dims = s.make_dims();
  config.density = s.sim_density;
  config.prior = s.make_prior(config.dims);
  config.mcmc = s.make_mcmc();
  config.min_support = s.min_support;
  config.rf_trees = s.rf_trees;
  config.rf_max_iters = s.rf_max_iters;
  config.threads = s.threads;
  config.seed = s.seed;
  if (!methods_csv.empty()) {
    config.methods.clear();
    std::string name;
    std::istringstream in(methods_csv);
    while (std::getline(in, name, ',')) config.methods.push_back(method_from_name(name));
  }
  const BenchmarkReport report = run_benchmark(config);
  std::fprintf(stderr, "benchmark: %d replicates in %.1fs\n", config.replicates,
               report.wall_seconds);
  MetaMap meta{{"kind", "benchmark"},
               {"replicates", std::to_string(config.replicates)},
               {"density", format_number4(config.density)},
               {"seed", std::to_string(s.seed)}};
  emit(out, s.format == "json" ? benchmark_to_json(report, meta)
                               : benchmark_to_tsv(report));
  return 0;
}

int cmd_subsample(const CommonArgs& args, const std::string& data_path,
                  const std::string& out) {
  const Settings s = resolve_settings(args);
  const ExpressionDataset data = load_dataset(data_path);
  SubsampleConfig config;
  config.genes_per_run = s.sub_genes;
  config.regions_per_run = s.sub_regions;
  config.runs = s.sub_runs;
  config.min_support = s.min_support;
  config.threads = s.threads;
  config.seed = s.seed;
  Dims run_dims;
  run_dims.stages = data.dims.stages;
  run_dims.genes = config.genes_per_run;
  run_dims.regions = config.regions_per_run;
  run_dims.persons_per_stage = data.dims.persons_per_stage;
  const PriorConfig prior = s.make_prior(run_dims);
  const SubsampleReport report = subsample_runs(data, config, prior, s.make_mcmc());
  MetaMap meta{{"kind", "subsample"}, {"seed", std::to_string(s.seed)},
               {"runs", std::to_string(config.runs)}, {"data", data_path}};
  emit(out, s.format == "json" ? subsample_to_json(report, data.dims, meta)
                               : subsample_to_tsv(report, data.dims));
  return 0;
}

int cmd_metrics(const CommonArgs& args, const std::string& truth_path,
                const std::string& estimated_path, const std::string& out) {
  const Settings s = resolve_settings(args);
  const RegulatoryModel truth = network_from_json(read_text_file(truth_path));
  const RegulatoryModel estimate =
      network_from_json(read_text_file(estimated_path));
  const MetricsReport report = compute_metrics(truth, estimate);
  MetaMap meta{{"kind", "metrics"}, {"truth", truth_path},
               {"estimated", estimated_path}};
  emit(out, s.format == "json" ? metrics_to_json(report, meta)
                               : metrics_to_tsv(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stage-transition regulatory network inference"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out = "-";
  std::string data_path, truth_out, method = "pearson1", methods_csv;
  std::string truth_path, estimated_path;

  auto add_common = [&](CLI::App* cmd) {
    add_key_options(cmd, args);
    cmd->add_option("--out", out, "output path (default: stdout)");
  };

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim);
  sim->add_option("--truth", truth_out, "write the true network JSON here");

  auto* infer = app.add_subcommand("infer", "run the sampler on a dataset");
  add_common(infer);
  infer->add_option("--data", data_path, "input dataset CSV")->required();

  auto* baseline = app.add_subcommand("baseline", "Pearson-correlation baselines");
  add_common(baseline);
  baseline->add_option("--data", data_path, "input dataset CSV")->required();
  baseline->add_option("--method", method, "pearson1|pearson2|pearson3");

  auto* bench = app.add_subcommand("benchmark", "simulation benchmark");
  add_common(bench);
  bench->add_option("--methods", methods_csv,
                    "comma-separated subset of proposed,pearson1,pearson2,pearson3");

  auto* sub = app.add_subcommand("subsample", "wide-range subsampled runs");
  add_common(sub);
  sub->add_option("--data", data_path, "input dataset CSV")->required();

  auto* met = app.add_subcommand("metrics", "score an estimate against a truth");
  add_common(met);
  met->add_option("--truth", truth_path, "true network JSON")->required();
  met->add_option("--estimated", estimated_path, "estimated network JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(args, out, truth_out);
    if (infer->parsed()) return cmd_infer(args, data_path, out);
    if (baseline->parsed()) return cmd_baseline(args, data_path, method, out);
    if (bench->parsed()) return cmd_benchmark(args, methods_csv, out);
    if (sub->parsed()) return cmd_subsample(args, data_path, out);
    if (met->parsed()) return cmd_metrics(args, truth_path, estimated_path, out);
  } catch (const stagenet::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const stagenet::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
