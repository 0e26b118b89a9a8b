#include "stagenet/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "stagenet/baselines.hpp"
#include "stagenet/model.hpp"
#include "stagenet/stats.hpp"

namespace stagenet {

std::string method_name(Method m) {
  switch (m) {
    case Method::kProposed: return "proposed";
    case Method::kPearson1: return "pearson1";
    case Method::kPearson2: return "pearson2";
    case Method::kPearson3: return "pearson3";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "proposed") return Method::kProposed;
  if (name == "pearson1") return Method::kPearson1;
  if (name == "pearson2") return Method::kPearson2;
  if (name == "pearson3") return Method::kPearson3;
  throw DataError("unknown method: " + name);
}

namespace {

// one replicate: simulate a truth, run the requested methods, score them
std::vector<MetricsReport> run_replicate(const BenchConfig& config, int rep) {
  Rng data_rng(Rng::derive_seed(config.seed, 4ull * rep));
  const GlobalParams truth_params =
      generate_global_params(data_rng, config.dims, config.prior);
  const RegulatoryModel truth =
      generate_network(data_rng, config.dims, config.density);
  const RegulationCoefficients truth_coeffs =
      generate_coefficients(data_rng, truth, config.prior);
  const ExpressionDataset data =
      simulate_dataset(truth, truth_coeffs, truth_params, config.dims, data_rng);

  std::vector<MetricsReport> out;
  out.reserve(config.methods.size());
  for (Method m : config.methods) {
    RegulatoryModel estimate;
    switch (m) {
      case Method::kProposed: {
        McmcConfig mc = config.mcmc;
        mc.seed = Rng::derive_seed(config.seed, 4ull * rep + 1);
        Chain chain(data, config.prior, mc);
        const ChainSummary summary = chain.run();
        estimate = extract_network(summary, config.min_support).model;
        break;
      }
      case Method::kPearson1:
        estimate = pearson_network_observed(data);
        break;
      case Method::kPearson2:
        estimate = pearson_network_imputed(impute_mean(data));
        break;
      case Method::kPearson3: {
        Rng rf_rng(Rng::derive_seed(config.seed, 4ull * rep + 2));
        estimate = pearson_network_imputed(impute_random_forest(
            data, config.rf_trees, config.rf_max_iters, rf_rng));
        break;
      }
    }
    out.push_back(compute_metrics(truth, estimate));
  }
  return out;
}

IndexStats collect(const std::vector<double>& xs) {
  IndexStats s;
  s.n = static_cast<int>(xs.size());
  if (s.n > 0) s.mean = mean(xs);
  if (s.n > 1) s.var = variance(xs);
  return s;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchConfig& config) {
  if (config.replicates < 1) throw DataError("run_benchmark: need replicates >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::vector<MetricsReport>> by_replicate(config.replicates);
  std::atomic<int> next{0};
  const int workers =
      std::max(1, std::min(config.threads, config.replicates));
  auto work = [&] {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= config.replicates) return;
      by_replicate[rep] = run_replicate(config, rep);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  BenchmarkReport report;
  report.dims = config.dims;
  report.methods = config.methods;
  const int rows = config.dims.transitions() + 1;  // + Total
  report.table.assign(config.methods.size(), std::vector<BenchCell>(rows));
  report.raw.assign(config.methods.size(), {});
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    for (int rep = 0; rep < config.replicates; ++rep) {
      report.raw[mi].push_back(by_replicate[rep][mi]);
    }
    for (int row = 0; row < rows; ++row) {
      std::vector<double> det, rec, err, f1;
      for (int rep = 0; rep < config.replicates; ++rep) {
        const MetricsReport& mr = report.raw[mi][rep];
        const TransitionMetrics& tm =
            row < config.dims.transitions() ? mr.per_transition[row] : mr.total;
        if (!tm.defined) continue;
        det.push_back(tm.detection);
        rec.push_back(tm.recall);
        err.push_back(tm.error);
        f1.push_back(tm.f1);
      }
      report.table[mi][row] = BenchCell{collect(det), collect(rec),
                                        collect(err), collect(f1)};
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace stagenet
