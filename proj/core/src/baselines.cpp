#include "stagenet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stagenet/random_forest.hpp"
#include "stagenet/stats.hpp"

namespace stagenet {

namespace {

struct TensorShape {
  int persons;
  int cells;
  int stages;
  int cols() const { return cells * stages; }
};

}  // namespace

ImputedTensor impute_mean(const ExpressionDataset& data) {
  const Dims& dims = data.dims;
  const int cells = dims.cells();
  const int n = static_cast<int>(data.persons.size());
  ImputedTensor out;
  out.dims = dims;
  out.values.assign(n, std::vector<double>(static_cast<std::size_t>(cells) * dims.stages, 0.0));
  out.observed.assign(n, std::vector<std::uint8_t>(static_cast<std::size_t>(cells) * dims.stages, 0));

  // per (cell, stage): mean over persons observed at that stage
  for (int s = 0; s < dims.stages; ++s) {
    for (int c = 0; c < cells; ++c) {
      double sum = 0.0;
      int count = 0;
      for (int e = 0; e < n; ++e) {
        if (data.persons[e].death_stage - 1 != s) continue;
        if (!data.observed(e, s, c)) continue;
        sum += data.value(e, s, c);
        ++count;
      }
      if (count == 0) {
        const TargetId t = target_from_cell(dims, c);
        throw DataError("impute_mean: no observations for gene " +
                        std::to_string(t.gene + 1) + " region " +
                        std::to_string(t.region + 1) + " stage " +
                        std::to_string(s + 1));
      }
      const double m = sum / count;
      for (int e = 0; e < n; ++e) {
        const std::size_t k = static_cast<std::size_t>(s) * cells + c;
        const bool obs = data.persons[e].death_stage - 1 == s && data.observed(e, s, c);
        if (obs) {
          out.values[e][k] = data.value(e, s, c);
          out.observed[e][k] = 1;
        } else {
          out.values[e][k] = m;
        }
      }
    }
  }
  return out;
}

ImputedTensor impute_random_forest(const ExpressionDataset& data, int trees,
                                   int max_iters, Rng& rng) {
  ImputedTensor tensor = impute_mean(data);
  const TensorShape shape{static_cast<int>(tensor.values.size()),
                          tensor.dims.cells(), tensor.dims.stages};
  const int cols = shape.cols();

  std::vector<int> missing_per_col(cols, 0);
  for (int col = 0; col < cols; ++col) {
    for (int e = 0; e < shape.persons; ++e) {
      if (!tensor.observed[e][col]) ++missing_per_col[col];
    }
  }
  std::vector<int> order;
  for (int col = 0; col < cols; ++col) {
    if (missing_per_col[col] > 0 && missing_per_col[col] < shape.persons) {
      order.push_back(col);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return missing_per_col[a] < missing_per_col[b];
  });
  if (order.empty() || max_iters < 1) return tensor;

  RandomForestConfig rf_config;
  rf_config.trees = trees;

  auto features_for = [&](int e, int col) {
    std::vector<double> f;
    f.reserve(cols - 1);
    for (int k = 0; k < cols; ++k) {
      if (k != col) f.push_back(tensor.values[e][k]);
    }
    return f;
  };

  ImputedTensor previous = tensor;
  double prev_change = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int col : order) {
      std::vector<std::vector<double>> train_rows;
      std::vector<double> train_targets;
      for (int e = 0; e < shape.persons; ++e) {
        if (!tensor.observed[e][col]) continue;
        train_rows.push_back(features_for(e, col));
        train_targets.push_back(tensor.values[e][col]);
      }
      const double target_var = variance(train_targets);
      if (train_rows.size() < 2 || target_var <= 1e-12) {
        // degenerate column: keep the mean imputation
        const double m = mean(train_targets);
        for (int e = 0; e < shape.persons; ++e) {
          if (!tensor.observed[e][col]) tensor.values[e][col] = m;
        }
        continue;
      }
      RandomForestRegressor rf;
      rf.fit(train_rows, train_targets, rf_config, rng);
      for (int e = 0; e < shape.persons; ++e) {
        if (tensor.observed[e][col]) continue;
        tensor.values[e][col] = rf.predict(features_for(e, col));
      }
    }
    // stop when the relative change in imputed values starts rising
    double num = 0.0, den = 0.0;
    for (int e = 0; e < shape.persons; ++e) {
      for (int col = 0; col < cols; ++col) {
        if (tensor.observed[e][col]) continue;
        const double d = tensor.values[e][col] - previous.values[e][col];
        num += d * d;
        den += tensor.values[e][col] * tensor.values[e][col];
      }
    }
    const double change = den > 0.0 ? num / den : 0.0;
    if (change > prev_change) return previous;
    prev_change = change;
    previous = tensor;
  }
  return tensor;
}

namespace {

RegulatoryModel decide_from_correlations(
    const Dims& dims,
    const std::vector<std::vector<std::vector<double>>>& corr) {
  // corr[tr][target][1 + source], index 0 holding the self-lag check when
  // present (NaN when absent)
  RegulatoryModel model(dims);
  const int cells = dims.cells();
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    for (int t = 0; t < cells; ++t) {
      double best_abs = -1.0;
      int best_src = -1;
      bool any_large = false;
      const double self_r = corr[tr][t][0];
      if (std::isfinite(self_r) && std::fabs(self_r) >= 0.5) any_large = true;
      for (int s = 0; s < cells; ++s) {
        if (s == t) continue;
        const double r = corr[tr][t][1 + s];
        if (std::fabs(r) >= 0.5) any_large = true;
        if (std::fabs(r) > best_abs) {
          best_abs = std::fabs(r);
          best_src = s;
        }
      }
      if (any_large && best_src >= 0) model.set_source(tr, t, best_src);
    }
  }
  return model;
}

}  // namespace

RegulatoryModel pearson_network_observed(const ExpressionDataset& data) {
  const Dims& dims = data.dims;
  const int cells = dims.cells();
  const int n = static_cast<int>(data.persons.size());
  // person indices per death stage, in id order
  std::vector<std::vector<int>> cohort(dims.stages);
  for (int e = 0; e < n; ++e) {
    cohort[data.persons[e].death_stage - 1].push_back(e);
  }
  for (auto& c : cohort) {
    std::sort(c.begin(), c.end(), [&](int a, int b) {
      return data.persons[a].id < data.persons[b].id;
    });
  }

  std::vector<std::vector<std::vector<double>>> corr(
      dims.transitions(),
      std::vector<std::vector<double>>(
          cells, std::vector<double>(cells + 1,
                                     std::numeric_limits<double>::quiet_NaN())));
  std::vector<double> xs, ys;
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    const auto& prev_cohort = cohort[tr];
    const auto& next_cohort = cohort[tr + 1];
    for (int t = 0; t < cells; ++t) {
      for (int s = 0; s <= cells; ++s) {
        const int src = s - 1;  // s == 0: self-lag pair
        const int src_cell = s == 0 ? t : src;
        if (s > 0 && src == t) continue;
        xs.clear();
        ys.clear();
        // pair observed source values (died at t-1) with observed target
        // values (died at t), in id order, truncated to the shorter cohort
        std::vector<double> xv, yv;
        for (int e : prev_cohort) {
          if (data.observed(e, tr, src_cell)) xv.push_back(data.value(e, tr, src_cell));
        }
        for (int e : next_cohort) {
          if (data.observed(e, tr + 1, t)) yv.push_back(data.value(e, tr + 1, t));
        }
        const std::size_t k = std::min(xv.size(), yv.size());
        xs.assign(xv.begin(), xv.begin() + k);
        ys.assign(yv.begin(), yv.begin() + k);
        corr[tr][t][s == 0 ? 0 : 1 + src] = pearson_correlation(xs, ys);
      }
    }
  }
  return decide_from_correlations(dims, corr);
}

RegulatoryModel pearson_network_imputed(const ImputedTensor& tensor) {
  const Dims& dims = tensor.dims;
  const int cells = dims.cells();
  const int n = static_cast<int>(tensor.values.size());
  std::vector<std::vector<std::vector<double>>> corr(
      dims.transitions(),
      std::vector<std::vector<double>>(
          cells, std::vector<double>(cells + 1,
                                     std::numeric_limits<double>::quiet_NaN())));
  std::vector<double> xs(n), ys(n);
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    const int stage = tr + 1;  // the later stage of the transition
    for (int t = 0; t < cells; ++t) {
      for (int e = 0; e < n; ++e) ys[e] = tensor.value(e, stage, t);
      for (int s = 0; s < cells; ++s) {
        if (s == t) continue;
        for (int e = 0; e < n; ++e) xs[e] = tensor.value(e, stage, s);
        corr[tr][t][1 + s] = pearson_correlation(xs, ys);
      }
    }
  }
  return decide_from_correlations(dims, corr);
}

}  // namespace stagenet
