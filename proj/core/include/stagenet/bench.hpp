#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stagenet/chain.hpp"
#include "stagenet/metrics.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

enum class Method { kProposed, kPearson1, kPearson2, kPearson3 };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct BenchConfig {
  int replicates = 10;
  Dims dims;
  double density = 0.3;
  PriorConfig prior;
  McmcConfig mcmc;
  double min_support = 0.15;
  int rf_trees = 100;
  int rf_max_iters = 10;
  std::vector<Method> methods = {Method::kPearson1, Method::kPearson2,
                                 Method::kPearson3, Method::kProposed};
  int threads = 1;
  std::uint64_t seed = 1;
};

struct IndexStats {
  double mean = 0.0;
  double var = 0.0;
  int n = 0;  // replicates where the index was defined
};

struct BenchCell {
  IndexStats detection, recall, error, f1;
};

// Mean/variance of each index over replicates, per transition plus a pooled
// Total row, per method; raw per-replicate reports retained.
struct BenchmarkReport {
  Dims dims;
  std::vector<Method> methods;
  // [method][transition 0..T-2, then Total at index T-1]
  std::vector<std::vector<BenchCell>> table;
  std::vector<std::vector<MetricsReport>> raw;  // [method][replicate]
  double wall_seconds = 0.0;
};

BenchmarkReport run_benchmark(const BenchConfig& config);

}  // namespace stagenet
