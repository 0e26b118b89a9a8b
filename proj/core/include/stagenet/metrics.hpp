#pragma once

#include <vector>

#include "stagenet/types.hpp"

namespace stagenet {

// The four evaluation indexes per transition, with the raw counts kept for
// exact pooling. A transition with no true edges is undefined and excluded
// from the pooled Total.
struct TransitionMetrics {
  long true_edges = 0;
  long detected = 0;
  long correct = 0;
  bool defined = false;
  double detection = 0.0;
  double recall = 0.0;
  double error = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<TransitionMetrics> per_transition;
  TransitionMetrics total;
};

MetricsReport compute_metrics(const RegulatoryModel& truth,
                              const RegulatoryModel& estimate);

}  // namespace stagenet
