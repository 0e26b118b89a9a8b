#include "stagenet/subsample.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stagenet/stats.hpp"

namespace stagenet {

std::vector<double> subsample_gene_weights(const ExpressionDataset& data) {
  const Dims& dims = data.dims;
  const int n = static_cast<int>(data.persons.size());
  std::vector<double> weights(dims.genes, 0.0);
  std::vector<double> xs, ys;
  for (int g = 0; g < dims.genes; ++g) {
    double total = 0.0;
    for (int m = 0; m < dims.genes; ++m) {
      if (m == g) continue;
      xs.clear();
      ys.clear();
      // pair observed death-stage values of both genes over (person, region)
      for (int e = 0; e < n; ++e) {
        const int s = data.persons[e].death_stage - 1;
        for (int r = 0; r < dims.regions; ++r) {
          const int cg = g * dims.regions + r;
          const int cm = m * dims.regions + r;
          if (data.observed(e, s, cg) && data.observed(e, s, cm)) {
            xs.push_back(data.value(e, s, cg));
            ys.push_back(data.value(e, s, cm));
          }
        }
      }
      total += pearson_correlation(xs, ys);
    }
    weights[g] = std::max(total, 0.0);
  }
  return weights;
}

std::vector<double> subsample_region_weights(const ExpressionDataset& data) {
  const Dims& dims = data.dims;
  const int n = static_cast<int>(data.persons.size());
  std::vector<double> weights(dims.regions, 0.0);
  std::vector<double> base, later;
  for (int r = 0; r < dims.regions; ++r) {
    int significant = 0;
    for (int g = 0; g < dims.genes; ++g) {
      const int cell = g * dims.regions + r;
      base.clear();
      for (int e = 0; e < n; ++e) {
        if (data.persons[e].death_stage != 1) continue;
        if (data.observed(e, 0, cell)) base.push_back(data.value(e, 0, cell));
      }
      for (int stage = 2; stage <= dims.stages; ++stage) {
        later.clear();
        for (int e = 0; e < n; ++e) {
          if (data.persons[e].death_stage != stage) continue;
          if (data.observed(e, stage - 1, cell)) {
            later.push_back(data.value(e, stage - 1, cell));
          }
        }
        if (welch_t_test_pvalue(later, base) <= 0.05) ++significant;
      }
    }
    weights[r] = static_cast<double>(significant);
  }
  return weights;
}

std::vector<int> sample_without_replacement(std::vector<double> weights,
                                            int count, Rng& rng) {
  const int n = static_cast<int>(weights.size());
  if (count > n) throw DataError("sample_without_replacement: count > population");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) std::fill(weights.begin(), weights.end(), 1.0);
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;
  std::vector<int> chosen;
  std::vector<double> w(weights);
  for (int k = 0; k < count; ++k) {
    std::vector<double> current;
    current.reserve(alive.size());
    for (int i : alive) current.push_back(w[i]);
    double s = 0.0;
    for (double x : current) s += x;
    if (!(s > 0.0)) std::fill(current.begin(), current.end(), 1.0);
    const int pick = rng.categorical(current);
    chosen.push_back(alive[pick]);
    alive.erase(alive.begin() + pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

ExpressionDataset restrict_dataset(const ExpressionDataset& data,
                                   const std::vector<int>& genes,
                                   const std::vector<int>& regions) {
  ExpressionDataset out;
  out.dims.stages = data.dims.stages;
  out.dims.genes = static_cast<int>(genes.size());
  out.dims.regions = static_cast<int>(regions.size());
  const int sub_cells = out.dims.cells();
  for (const Person& p : data.persons) {
    Person q;
    q.id = p.id;
    q.death_stage = p.death_stage;
    q.values.assign(static_cast<std::size_t>(p.death_stage) * sub_cells, 0.0);
    q.observed.assign(q.values.size(), 0);
    for (int s = 0; s < p.death_stage; ++s) {
      for (int gi = 0; gi < out.dims.genes; ++gi) {
        for (int ri = 0; ri < out.dims.regions; ++ri) {
          const int src_cell = genes[gi] * data.dims.regions + regions[ri];
          const std::size_t dst =
              static_cast<std::size_t>(s) * sub_cells + gi * out.dims.regions + ri;
          q.values[dst] = p.value(s, src_cell, data.dims.cells());
          q.observed[dst] =
              p.observed[static_cast<std::size_t>(s) * data.dims.cells() + src_cell];
        }
      }
    }
    out.persons.push_back(std::move(q));
  }
  out.finalize();
  return out;
}

}  // namespace

SubsampleReport subsample_runs(const ExpressionDataset& data,
                               const SubsampleConfig& config,
                               const PriorConfig& prior_template,
                               const McmcConfig& mcmc) {
  if (config.genes_per_run > data.dims.genes ||
      config.regions_per_run > data.dims.regions) {
    throw DataError("subsample_runs: per-run counts exceed the dataset");
  }
  if (config.runs < 1) throw DataError("subsample_runs: need at least one run");

  SubsampleReport report;
  report.gene_weights = subsample_gene_weights(data);
  report.region_weights = subsample_region_weights(data);

  Rng pick_rng(Rng::derive_seed(config.seed, 0));
  report.run_genes.resize(config.runs);
  report.run_regions.resize(config.runs);
  for (int run = 0; run < config.runs; ++run) {
    report.run_genes[run] = sample_without_replacement(
        report.gene_weights, config.genes_per_run, pick_rng);
    report.run_regions[run] = sample_without_replacement(
        report.region_weights, config.regions_per_run, pick_rng);
  }

  std::vector<std::vector<SubsampleEdge>> per_run(config.runs);
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int run = next.fetch_add(1);
      if (run >= config.runs) return;
      const auto& genes = report.run_genes[run];
      const auto& regions = report.run_regions[run];
      const ExpressionDataset sub = restrict_dataset(data, genes, regions);
      PriorConfig prior = prior_template;
      prior.c.assign(sub.dims.cells(), prior_template.c.empty() ? 5.0 : prior_template.c[0]);
      prior.d.assign(sub.dims.cells(), prior_template.d.empty() ? 0.5 : prior_template.d[0]);
      McmcConfig mc = mcmc;
      mc.seed = Rng::derive_seed(config.seed, 1 + run);
      Chain chain(sub, prior, mc);
      const NetworkEstimate est = extract_network(chain.run(), config.min_support);
      for (int tr = 0; tr < sub.dims.transitions(); ++tr) {
        for (int cell = 0; cell < sub.dims.cells(); ++cell) {
          const int src = est.model.source(tr, cell);
          if (src == RegulatoryModel::kNotRegulated) continue;
          const TargetId t_sub = target_from_cell(sub.dims, cell);
          const TargetId s_sub = target_from_cell(sub.dims, src);
          SubsampleEdge edge;
          edge.run = run + 1;
          edge.transition = tr;
          edge.target = TargetId{genes[t_sub.gene], regions[t_sub.region]};
          edge.source = TargetId{genes[s_sub.gene], regions[s_sub.region]};
          edge.support = est.support[tr][cell];
          per_run[run].push_back(edge);
        }
      }
    }
  };
  const int workers = std::max(1, std::min(config.threads, config.runs));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (int run = 0; run < config.runs; ++run) {
    report.edges.insert(report.edges.end(), per_run[run].begin(),
                        per_run[run].end());
  }
  return report;
}

}  // namespace stagenet
