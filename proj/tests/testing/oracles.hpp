#pragma once

#include <functional>
#include <map>
#include <vector>

#include "stagenet/chain.hpp"
#include "stagenet/marginals.hpp"
#include "stagenet/types.hpp"

// Test-only reference implementations, kept independent of the library's
// computation paths they check.
namespace stagenet::testing {

struct GridMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Normalizes exp(log_f) by trapezoid quadrature on [lo, hi], then refines
// the grid around the located mass. n is the point count per pass.
GridMoments grid_conditional_moments(const std::function<double(double)>& log_f,
                                     double lo, double hi, int n = 4001);

// Complete-data log joint of everything that involves one person's value at
// (stage0, cell): the stage-1 density or incoming increment, the outgoing
// increment, and the increments of every cell it regulates. Evaluating this
// on a grid gives the exact full conditional for that value.
double log_joint_terms_for_value(const ExpressionDataset& data,
                                 const RegulatoryModel& model,
                                 const RegulationCoefficients& coeffs,
                                 const GlobalParams& params, int person,
                                 int stage0, int cell, double value);

// Full complete-data log joint (all persons, all layers).
double log_joint_complete(const ExpressionDataset& data,
                          const RegulatoryModel& model,
                          const RegulationCoefficients& coeffs,
                          const GlobalParams& params);

// Plain Monte Carlo estimate of the collapsed regulated marginal: draws
// sigma^2 from its collapsed posterior, (a, b) from the conditional normal
// prior, and averages the Gaussian increment likelihood. Returns the scaled
// mean and its standard error along with the scaling constant (log).
struct McEstimate {
  double log_scale = 0.0;  // estimate of the marginal is mean * exp(log_scale)
  double mean = 0.0;
  double se = 0.0;
};
McEstimate mc_regulated_marginal(const std::vector<double>& increments,
                                 const std::vector<double>& sources,
                                 const GlobalParams& params,
                                 const PriorConfig& prior,
                                 const CollapsedContext& ctx, long draws,
                                 Rng& rng);

// Chi-square goodness-of-fit p-value of observed counts against expected
// probabilities (cells with tiny expectation are pooled).
double chi_square_gof_pvalue(const std::vector<long>& counts,
                             const std::vector<double>& probs);

// Standard error of a chain mean by batch means.
double batch_means_se(const std::vector<double>& xs, int batches = 50);

// Independent direct-summation enumeration over joint models of one
// transition (per-person Gaussian products, no sufficient statistics).
std::map<std::vector<int>, double> direct_enumeration(
    const ExpressionDataset& data, const FixedCoefficientTable& coeffs,
    const GlobalParams& params, int transition);

double total_variation(const std::map<std::vector<int>, double>& p,
                       const std::map<std::vector<int>, double>& q);

}  // namespace stagenet::testing
