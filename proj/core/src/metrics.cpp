#include "stagenet/metrics.hpp"

#include <stdexcept>

namespace stagenet {

namespace {

TransitionMetrics from_counts(long true_edges, long detected, long correct) {
  TransitionMetrics m;
  m.true_edges = true_edges;
  m.detected = detected;
  m.correct = correct;
  if (true_edges == 0) return m;  // undefined, ratios stay at 0 with defined=false
  m.defined = true;
  const double t = static_cast<double>(true_edges);
  m.detection = detected / t;
  m.recall = correct / t;
  m.error = static_cast<double>((detected - correct) + (true_edges - correct)) / t;
  m.precision = detected > 0 ? static_cast<double>(correct) / detected : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace

MetricsReport compute_metrics(const RegulatoryModel& truth,
                              const RegulatoryModel& estimate) {
  if (truth.transitions() != estimate.transitions() ||
      truth.cells() != estimate.cells()) {
    throw std::invalid_argument("compute_metrics: dimension mismatch");
  }
  MetricsReport report;
  long pooled_true = 0, pooled_det = 0, pooled_correct = 0;
  for (int tr = 0; tr < truth.transitions(); ++tr) {
    long t = 0, d = 0, c = 0;
    for (int cell = 0; cell < truth.cells(); ++cell) {
      const int ts = truth.source(tr, cell);
      const int es = estimate.source(tr, cell);
      if (ts != RegulatoryModel::kNotRegulated) ++t;
      if (es != RegulatoryModel::kNotRegulated) ++d;
      if (ts != RegulatoryModel::kNotRegulated && ts == es) ++c;
    }
    report.per_transition.push_back(from_counts(t, d, c));
    if (t > 0) {
      pooled_true += t;
      pooled_det += d;
      pooled_correct += c;
    }
  }
  report.total = from_counts(pooled_true, pooled_det, pooled_correct);
  return report;
}

}  // namespace stagenet
