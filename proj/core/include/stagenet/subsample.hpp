#pragma once

#include <cstdint>
#include <vector>

#include "stagenet/chain.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

struct SubsampleConfig {
  int genes_per_run = 15;
  int regions_per_run = 5;
  int runs = 10;
  double min_support = 0.15;
  int threads = 1;
  std::uint64_t seed = 1;
};

// Gene affinity weights: P(g) proportional to the summed cross-gene Pearson
// correlations of pooled observed values (negative sums clamp to zero).
std::vector<double> subsample_gene_weights(const ExpressionDataset& data);

// Region weights: the number of (gene, stage>=2) Welch tests of stage-t
// observations against stage-1 observations with p <= 0.05.
std::vector<double> subsample_region_weights(const ExpressionDataset& data);

// Weighted sampling without replacement; falls back to uniform when all
// weights are zero. Returns ascending indices.
std::vector<int> sample_without_replacement(std::vector<double> weights,
                                            int count, Rng& rng);

struct SubsampleEdge {
  int run = 0;         // 1-based sub-run index
  int transition = 0;  // 0-based
  TargetId target;     // original (full-range) indices
  TargetId source;
  double support = 0.0;
};

struct SubsampleReport {
  std::vector<double> gene_weights;
  std::vector<double> region_weights;
  std::vector<std::vector<int>> run_genes;    // selected per run, ascending
  std::vector<std::vector<int>> run_regions;
  std::vector<SubsampleEdge> edges;  // union over runs, with provenance
};

SubsampleReport subsample_runs(const ExpressionDataset& data,
                               const SubsampleConfig& config,
                               const PriorConfig& prior_template,
                               const McmcConfig& mcmc);

}  // namespace stagenet
