#pragma once

#include <string>
#include <vector>

#include "stagenet/rng.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

// Returns one message per constraint violation; empty when the model is
// admissible (a target never regulates itself; indices in range).
std::vector<std::string> validate_model(const RegulatoryModel& model,
                                        const Dims& dims);

// Each (target, transition) is independently regulated with probability
// `density`, by a source drawn uniformly from the admissible cells.
RegulatoryModel generate_network(Rng& rng, const Dims& dims, double density);

// One shared sigma^2 ~ IG(v/2, 2*v*lambda), then independent
// (a, b) ~ N(alpha, sigma^2 * diag(V_a, v^2/V_b)) per regulation.
RegulationCoefficients generate_coefficients(Rng& rng,
                                             const RegulatoryModel& model,
                                             const PriorConfig& prior);

// Draws true global parameters from their priors.
GlobalParams generate_global_params(Rng& rng, const Dims& dims,
                                    const PriorConfig& prior);

// Forward simulation. Stage-1 values ~ N(mu_gr, sigma1^2); each later layer
// adds increments N(mu2, sigma2^2) (unregulated) or
// N(a + b * D_source_prev, sigma2^2) (regulated). Latent layers are kept
// with observed = false; only the death-stage layer is observed.
ExpressionDataset simulate_dataset(const RegulatoryModel& model,
                                   const RegulationCoefficients& coeffs,
                                   const GlobalParams& params, const Dims& dims,
                                   Rng& rng);

}  // namespace stagenet
