// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Expects a quiet machine; the benchmark criterion runs the full
// desk-scale study.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "stagenet/baselines.hpp"
#include "stagenet/bench.hpp"
#include "stagenet/chain.hpp"
#include "stagenet/config.hpp"
#include "stagenet/io.hpp"
#include "stagenet/model.hpp"
#include "stagenet/stats.hpp"
#include "stagenet/subsample.hpp"
#include "testing/oracles.hpp"

using namespace stagenet;

namespace {

int g_failures = 0;

void check_line(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------- criterion 1+2
BenchmarkReport desk_scale_benchmark() {
  Settings s;  // desk-scale defaults: 2000 inner per transition, burn-in 25%
  BenchConfig config;
  config.replicates = 10;
  config.dims = s.make_dims();
  config.density = 0.3;
  config.prior = s.make_prior(config.dims);
  config.mcmc = s.make_mcmc();
  config.min_support = s.min_support;
  config.rf_trees = s.rf_trees;
  config.rf_max_iters = s.rf_max_iters;
  config.methods = {Method::kPearson1, Method::kPearson2, Method::kPearson3,
                    Method::kProposed};
  config.threads = 4;
  config.seed = 20240811;
  return run_benchmark(config);
}

void criterion_benchmark() {
  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkReport report = desk_scale_benchmark();
  const double secs = seconds_since(t0);
  const int total_row = report.dims.transitions();
  auto cell = [&](Method m, int row) -> const BenchCell& {
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      if (report.methods[i] == m) return report.table[i][row];
    }
    throw std::logic_error("method missing");
  };
  const BenchCell& proposed = cell(Method::kProposed, total_row);
  const BenchCell& p1 = cell(Method::kPearson1, total_row);
  const BenchCell& p2 = cell(Method::kPearson2, total_row);
  const BenchCell& p3 = cell(Method::kPearson3, total_row);

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "proposed recall %.4f f1 %.4f | pearson1 f1 %.4f | "
                "pearson2 det %.2f pearson3 det %.2f | %.0fs",
                proposed.recall.mean, proposed.f1.mean, p1.f1.mean,
                p2.detection.mean, p3.detection.mean, secs);
  const bool pass = proposed.recall.mean >= 0.50 && proposed.f1.mean >= 0.60 &&
                    p1.f1.mean <= 0.15 && p2.detection.mean >= 2.5 &&
                    p3.detection.mean >= 2.5 && secs <= 1800.0;
  check_line("criterion 1: desk-scale simulation study", pass, detail);

  const BenchCell& r12 = cell(Method::kProposed, 0);
  const BenchCell& r23 = cell(Method::kProposed, 1);
  const BenchCell& r34 = cell(Method::kProposed, 2);
  std::snprintf(detail, sizeof(detail), "recall 1->2 %.4f, 2->3 %.4f, 3->4 %.4f",
                r12.recall.mean, r23.recall.mean, r34.recall.mean);
  check_line("criterion 2: first transition is hardest",
         r12.recall.mean <= r23.recall.mean && r12.recall.mean <= r34.recall.mean,
         detail);
}

}  // namespace

int main() {
  criterion_benchmark();
  return g_failures == 0 ? 0 : 1;
}
