#pragma once

#include <vector>

#include "stagenet/rng.hpp"

namespace stagenet {

struct RandomForestConfig {
  int trees = 100;
  int min_leaf = 5;
  int mtry = 0;  // 0: max(1, features/3)
};

// Bootstrap-aggregated regression trees with variance-reduction splits over
// random feature subsets. Small data only; everything is stored densely.
class RandomForestRegressor {
 public:
  // rows: n x p feature matrix, targets: length n
  void fit(const std::vector<std::vector<double>>& rows,
           const std::vector<double>& targets, const RandomForestConfig& config,
           Rng& rng);
  double predict(const std::vector<double>& features) const;
  bool trained() const { return !forest_.empty(); }

 private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;
  };
  using Tree = std::vector<Node>;

  int build_node(Tree& tree, const std::vector<std::vector<double>>& rows,
                 const std::vector<double>& targets, std::vector<int>& idx,
                 int begin, int end, const RandomForestConfig& config, Rng& rng);

  std::vector<Tree> forest_;
};

}  // namespace stagenet
