#pragma once

#include <cmath>

#include "stagenet/rng.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

struct GaussianPosterior {
  double mean = 0.0;
  double variance = 1.0;
  double sample(Rng& rng) const { return rng.normal(mean, std::sqrt(variance)); }
};

struct InverseGammaPosterior {
  double shape = 1.0;
  double scale = 1.0;
  double sample(Rng& rng) const { return rng.inv_gamma(shape, scale); }
  // defined for shape > 1
  double mean() const { return scale / (shape - 1.0); }
};

// Non-owning bundle of everything the conditional posteriors condition on.
struct ModelState {
  const ExpressionDataset* data = nullptr;
  const RegulatoryModel* model = nullptr;
  const RegulationCoefficients* coeffs = nullptr;
  const GlobalParams* params = nullptr;
};

// Full conditional of a person's stage-1 value (0-based stage 0) for
// `cell`, given the stage-2 layer, the other cells' stage-1 values and the
// first-transition regulation structure. Requires death stage >= 2.
GaussianPosterior missing_stage1_posterior(int person, int cell,
                                           const ModelState& state);

// Full conditional of an interior layer value, 1 <= stage0 <= death0 - 1,
// combining the backward prediction, the forward correction and the
// regression terms of the cells this one regulates.
GaussianPosterior missing_interior_posterior(int person, int cell, int stage0,
                                             const ModelState& state);

// Death-stage value with no forward layer: the increment law alone. Falls
// back to the stage-1 prior for persons who died at stage 1.
GaussianPosterior missing_terminal_posterior(int person, int cell,
                                             const ModelState& state);

GaussianPosterior mu_gr_posterior(int cell, const ModelState& state,
                                  const PriorConfig& prior);
InverseGammaPosterior sigma1_posterior(const ModelState& state,
                                       const PriorConfig& prior);
GaussianPosterior mu2_posterior(const ModelState& state,
                                const PriorConfig& prior);
InverseGammaPosterior sigma2_posterior(const ModelState& state,
                                       const PriorConfig& prior);

// Expected increment of `cell` over `transition` for one person, given the
// current assignment: mu2 when unregulated, a + b * D_source_prev otherwise.
double expected_increment(int person, int cell, int transition,
                          const ModelState& state);

}  // namespace stagenet
