#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stagenet/model.hpp"
#include "stagenet/subsample.hpp"
#include "testing/oracles.hpp"

using namespace stagenet;

namespace {

ExpressionDataset wide_dataset(std::uint64_t seed, int genes, int regions,
                               int per_stage) {
  Dims dims;
  dims.stages = 3;
  dims.genes = genes;
  dims.regions = regions;
  dims.persons_per_stage.assign(3, per_stage);
  PriorConfig prior = PriorConfig::defaults(dims);
  Rng rng(seed);
  const GlobalParams params = generate_global_params(rng, dims, prior);
  const RegulatoryModel truth = generate_network(rng, dims, 0.2);
  const RegulationCoefficients coeffs = generate_coefficients(rng, truth, prior);
  return simulate_dataset(truth, coeffs, params, dims, rng);
}

}  // namespace

TEST_CASE("weighted sampling without replacement follows its weights") {
  Rng rng(5);
  const std::vector<double> weights{1.0, 3.0, 6.0};
  std::vector<long> first_counts(3, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto picked = sample_without_replacement(weights, 1, rng);
    first_counts[picked[0]] += 1;
  }
  CHECK(testing::chi_square_gof_pvalue(first_counts, {0.1, 0.3, 0.6}) > 0.001);

  // exhaustive subset: everything selected exactly once
  const auto all = sample_without_replacement(weights, 3, rng);
  CHECK(all == std::vector<int>({0, 1, 2}));

  // zero weights fall back to uniform
  std::vector<long> uniform_counts(3, 0);
  for (int i = 0; i < draws; ++i) {
    const auto picked = sample_without_replacement({0.0, 0.0, 0.0}, 1, rng);
    uniform_counts[picked[0]] += 1;
  }
  CHECK(testing::chi_square_gof_pvalue(uniform_counts,
                                       {1 / 3.0, 1 / 3.0, 1 / 3.0}) > 0.001);
}

TEST_CASE("weights are permutation-equivariant and nonnegative") {
  const ExpressionDataset ds = wide_dataset(8, 6, 3, 5);
  const auto gene_w = subsample_gene_weights(ds);
  const auto region_w = subsample_region_weights(ds);
  REQUIRE(gene_w.size() == 6);
  REQUIRE(region_w.size() == 3);
  for (double w : gene_w) CHECK(w >= 0.0);
  for (double w : region_w) CHECK(w >= 0.0);

  // relabel genes 0 and 2 by swapping their cells in every layer
  ExpressionDataset swapped = ds;
  for (auto& p : swapped.persons) {
    for (int s = 0; s < p.death_stage; ++s) {
      for (int r = 0; r < ds.dims.regions; ++r) {
        const std::size_t a =
            static_cast<std::size_t>(s) * ds.dims.cells() + 0 * ds.dims.regions + r;
        const std::size_t b =
            static_cast<std::size_t>(s) * ds.dims.cells() + 2 * ds.dims.regions + r;
        std::swap(p.values[a], p.values[b]);
        std::swap(p.observed[a], p.observed[b]);
      }
    }
  }
  const auto swapped_w = subsample_gene_weights(swapped);
  CHECK(swapped_w[0] == doctest::Approx(gene_w[2]).epsilon(1e-12));
  CHECK(swapped_w[2] == doctest::Approx(gene_w[0]).epsilon(1e-12));
  CHECK(swapped_w[1] == doctest::Approx(gene_w[1]).epsilon(1e-12));
}

TEST_CASE("subsampled runs cover the full index space and map edges back") {
  const ExpressionDataset ds = wide_dataset(10, 8, 4, 6);
  SubsampleConfig config;
  config.genes_per_run = 4;
  config.regions_per_run = 3;
  config.runs = 3;
  config.min_support = 0.1;
  config.threads = 2;
  config.seed = 21;
  PriorConfig prior;
  prior.c.assign(12, 5.0);
  prior.d.assign(12, 0.5);
  McmcConfig mcmc;
  mcmc.inner_iterations = 20;
  mcmc.outer_sweeps = 5;
  mcmc.burn_in = 25;
  const SubsampleReport report = subsample_runs(ds, config, prior, mcmc);
  REQUIRE(report.run_genes.size() == 3);
  for (const auto& genes : report.run_genes) {
    CHECK(genes.size() == 4);
    CHECK(std::is_sorted(genes.begin(), genes.end()));
    for (int g : genes) CHECK(g < 8);
  }
  for (const SubsampleEdge& e : report.edges) {
    CHECK(e.run >= 1);
    CHECK(e.run <= 3);
    CHECK(e.target.gene < 8);
    CHECK(e.source.region < 4);
    CHECK(e.support >= config.min_support);
    // edges only connect cells that were in the same run
    const auto& genes = report.run_genes[e.run - 1];
    const auto& regions = report.run_regions[e.run - 1];
    CHECK(std::count(genes.begin(), genes.end(), e.target.gene) == 1);
    CHECK(std::count(regions.begin(), regions.end(), e.source.region) == 1);
  }

  // exhaustive subset degenerates to the full index set
  SubsampleConfig full = config;
  full.genes_per_run = 8;
  full.regions_per_run = 4;
  full.runs = 1;
  PriorConfig full_prior;
  full_prior.c.assign(32, 5.0);
  full_prior.d.assign(32, 0.5);
  const SubsampleReport fr = subsample_runs(ds, full, full_prior, mcmc);
  CHECK(fr.run_genes[0].size() == 8);
  CHECK(fr.run_regions[0] == std::vector<int>({0, 1, 2, 3}));
}
