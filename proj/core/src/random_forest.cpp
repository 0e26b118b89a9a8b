#include "stagenet/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stagenet {

namespace {

double subset_mean(const std::vector<double>& targets, const std::vector<int>& idx,
                   int begin, int end) {
  double s = 0.0;
  for (int i = begin; i < end; ++i) s += targets[idx[i]];
  return s / (end - begin);
}

}  // namespace

int RandomForestRegressor::build_node(Tree& tree,
                                      const std::vector<std::vector<double>>& rows,
                                      const std::vector<double>& targets,
                                      std::vector<int>& idx, int begin, int end,
                                      const RandomForestConfig& config, Rng& rng) {
  const int n = end - begin;
  const int node_id = static_cast<int>(tree.size());
  tree.push_back(Node{});
  tree[node_id].value = subset_mean(targets, idx, begin, end);
  if (n < 2 * config.min_leaf) return node_id;

  double sum = 0.0, sumsq = 0.0;
  for (int i = begin; i < end; ++i) {
    sum += targets[idx[i]];
    sumsq += targets[idx[i]] * targets[idx[i]];
  }
  const double total_sse = sumsq - sum * sum / n;
  if (total_sse <= 1e-12) return node_id;

  const int p = static_cast<int>(rows[0].size());
  const int mtry =
      config.mtry > 0 ? std::min(config.mtry, p) : std::max(1, p / 3);
  // sample feature subset without replacement
  std::vector<int> features(p);
  std::iota(features.begin(), features.end(), 0);
  for (int i = 0; i < mtry; ++i) {
    const int j = i + rng.uniform_int(p - i);
    std::swap(features[i], features[j]);
  }

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_gain = 1e-12;
  std::vector<std::pair<double, double>> vals;  // (feature value, target)
  vals.reserve(n);
  for (int fi = 0; fi < mtry; ++fi) {
    const int f = features[fi];
    vals.clear();
    for (int i = begin; i < end; ++i) {
      vals.emplace_back(rows[idx[i]][f], targets[idx[i]]);
    }
    std::sort(vals.begin(), vals.end());
    double left_sum = 0.0;
    for (int k = 1; k < n; ++k) {
      left_sum += vals[k - 1].second;
      if (vals[k].first <= vals[k - 1].first) continue;  // no boundary here
      if (k < config.min_leaf || n - k < config.min_leaf) continue;
      const double right_sum = sum - left_sum;
      const double gain =
          left_sum * left_sum / k + right_sum * right_sum / (n - k) -
          sum * sum / n;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = f;
        best_threshold = 0.5 * (vals[k - 1].first + vals[k].first);
      }
    }
  }
  if (best_feature < 0) return node_id;

  auto mid_it = std::partition(idx.begin() + begin, idx.begin() + end,
                               [&](int i) {
                                 return rows[i][best_feature] <= best_threshold;
                               });
  const int mid = static_cast<int>(mid_it - idx.begin());
  if (mid == begin || mid == end) return node_id;

  tree[node_id].feature = best_feature;
  tree[node_id].threshold = best_threshold;
  const int left = build_node(tree, rows, targets, idx, begin, mid, config, rng);
  tree[node_id].left = left;
  const int right = build_node(tree, rows, targets, idx, mid, end, config, rng);
  tree[node_id].right = right;
  return node_id;
}

void RandomForestRegressor::fit(const std::vector<std::vector<double>>& rows,
                                const std::vector<double>& targets,
                                const RandomForestConfig& config, Rng& rng) {
  if (rows.empty() || rows.size() != targets.size()) {
    throw std::invalid_argument("RandomForestRegressor: bad training data");
  }
  const int n = static_cast<int>(rows.size());
  forest_.clear();
  forest_.reserve(config.trees);
  std::vector<int> idx(n);
  for (int t = 0; t < config.trees; ++t) {
    for (int i = 0; i < n; ++i) idx[i] = rng.uniform_int(n);  // bootstrap
    Tree tree;
    build_node(tree, rows, targets, idx, 0, n, config, rng);
    forest_.push_back(std::move(tree));
  }
}

double RandomForestRegressor::predict(const std::vector<double>& features) const {
  if (forest_.empty()) {
    throw std::logic_error("RandomForestRegressor: predict before fit");
  }
  double total = 0.0;
  for (const Tree& tree : forest_) {
    int node = 0;
    while (tree[node].feature >= 0) {
      node = features[tree[node].feature] <= tree[node].threshold
                 ? tree[node].left
                 : tree[node].right;
    }
    total += tree[node].value;
  }
  return total / static_cast<double>(forest_.size());
}

}  // namespace stagenet
