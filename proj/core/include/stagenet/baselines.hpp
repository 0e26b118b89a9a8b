#pragma once

#include <cstdint>
#include <vector>

#include "stagenet/rng.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

// Per person, a complete stages x cells block (all stages filled, including
// past the death stage) plus a provenance mask.
struct ImputedTensor {
  Dims dims;
  std::vector<std::vector<double>> values;         // [person][stage0*cells+cell]
  std::vector<std::vector<std::uint8_t>> observed; // true: original observation

  double value(int person, int stage0, int cell) const {
    return values[person][static_cast<std::size_t>(stage0) * dims.cells() + cell];
  }
};

// Every missing cell (both unobserved and never-produced entries) becomes
// the mean of the values observed at that (gene, region, stage).
ImputedTensor impute_mean(const ExpressionDataset& data);

// missForest-style scheme: initialize with the mean imputation, then re-fit
// a random-forest regressor per variable and re-predict the missing cells
// until the change in imputed values rises or max_iters is reached.
ImputedTensor impute_random_forest(const ExpressionDataset& data, int trees,
                                   int max_iters, Rng& rng);

// Raw-observation variant: cohorts who died at adjacent stages are paired by
// person order (truncated to equal length).
RegulatoryModel pearson_network_observed(const ExpressionDataset& data);

// Imputed variant: correlations over the full person vectors of the later
// stage of each transition.
RegulatoryModel pearson_network_imputed(const ImputedTensor& tensor);

}  // namespace stagenet
