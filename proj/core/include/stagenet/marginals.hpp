#pragma once

#include <vector>

#include "stagenet/posteriors.hpp"
#include "stagenet/rng.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

// (x - location)/scale ~ t_dof.
struct ScaledStudentT {
  double dof = 1.0;
  double location = 0.0;
  double scale = 1.0;
  double log_pdf(double x) const;
};

// Bivariate Student-t over (a, b) with symmetric scale matrix.
struct BivariateT {
  double dof = 2.0;
  double loc_a = 0.0, loc_b = 0.0;
  double s_aa = 1.0, s_ab = 0.0, s_bb = 1.0;
  double log_pdf(double a, double b) const;
  Coef sample(Rng& rng) const;
};

// Stacked increment regression statistics for one transition: every person
// with death stage past the transition contributes one row per cell.
struct PairStats {
  double n = 0.0;        // stacked row count
  double sum_prev = 0.0, sumsq_prev = 0.0;  // source previous-stage values
  double sum_inc = 0.0, sumsq_inc = 0.0;    // target increments
  double cross = 0.0;    // sum of increment * source value
};

class TransitionStats {
 public:
  static TransitionStats build(const ExpressionDataset& data, int transition);

  int rows() const { return n_; }
  int cells() const { return cells_; }
  PairStats pair(int target, int source) const;
  // only the increment fields are populated
  PairStats target_only(int target) const;

 private:
  int n_ = 0;
  int cells_ = 0;
  std::vector<double> prev_sum_, prev_sqsum_;
  std::vector<double> inc_sum_, inc_sqsum_;
  std::vector<double> cross_;  // [target * cells + source]
};

// Running totals over all regulations (all transitions): the count N_beta
// and the quadratic form sum_k [(a_k-alpha_a)^2/V_a + (b_k-alpha_b)^2/(v^2/V_b)].
struct CoeffTotals {
  int n_beta = 0;
  double quad = 0.0;
  static CoeffTotals from(const RegulationCoefficients& coeffs,
                          const RegulatoryModel& model, const PriorConfig& prior);
};

double pair_quad(const Coef& c, const PriorConfig& prior);

// Conditioning context for one target's collapsed quantities: the count and
// quadratic form of all OTHER regulations.
struct CollapsedContext {
  int n_beta_minus = 0;
  double c_minus = 0.0;
};

// sigma^2 | other coefficients ~ IG(v/2 + N_beta^-, 2*v*lambda + C/2).
InverseGammaPosterior collapsed_sigma_sq_posterior(const PriorConfig& prior,
                                                   const CollapsedContext& ctx);

// Conditional prior of one (a, b) pair given all other pairs: bivariate t
// with dof v + 2*N_beta^- and scale ((4*v*lambda + C)/dof) * diag(V_a, v^2/V_b).
BivariateT coeff_pair_conditional_prior(const PriorConfig& prior,
                                        const CollapsedContext& ctx);

enum class CoefComponent { kIntercept, kSlope };

// Univariate conditional prior of a (resp. b) given everything else,
// including the pair's other component: t_{v + 2 N_beta - 1}.
ScaledStudentT coeff_conditional_prior(CoefComponent which, int target_cell,
                                       int transition,
                                       const RegulationCoefficients& coeffs,
                                       const RegulatoryModel& model,
                                       const PriorConfig& prior);

// Log joint density of the coefficient pair under the conditional prior
// (needed by the exact trans-dimensional correction).
double coeff_pair_log_prior(const Coef& c, const PriorConfig& prior,
                            const CollapsedContext& ctx);

// Gaussian increment log likelihoods at fixed values.
double null_increment_loglik(const PairStats& target, double mu2,
                             double sigma2_sq);
double regulated_increment_loglik(const PairStats& pair, const Coef& c,
                                  double sigma2_sq);

// Result of the collapsed evaluation for one (target, source) pair: the log
// marginal with (a, b, sigma^2) integrated out, plus (optionally) the
// moments of p(a, b | data, other coefficients) for proposal fitting.
struct CollapsedEvaluation {
  double log_marginal = 0.0;
  bool moments_ok = false;
  double mean_a = 0.0, mean_b = 0.0;
  double cov_aa = 0.0, cov_ab = 0.0, cov_bb = 0.0;
};

CollapsedEvaluation evaluate_collapsed(const PairStats& pair,
                                       const GlobalParams& params,
                                       const PriorConfig& prior,
                                       const CollapsedContext& ctx,
                                       bool with_moments);

// Bivariate-t proposal matched to p(a, b | data, other coefficients); falls
// back to the conditional prior when posterior moments are unavailable.
BivariateT fit_coefficient_proposal(const PairStats& pair,
                                    const GlobalParams& params,
                                    const PriorConfig& prior,
                                    const CollapsedContext& ctx);

// Convenience wrappers over the current model state (the chain uses the
// cached-statistics path instead).
double null_marginal_loglik(int target_cell, int transition,
                            const ModelState& state);
double regulated_marginal_loglik(int target_cell, int source_cell,
                                 int transition, const ModelState& state,
                                 const PriorConfig& prior);

// Normalized posterior over the 1 + (G*R - 1) configurations of one target:
// index 0 is "not regulated", index 1 + s is source cell s. Log accessors
// stay finite when a configuration dominates to the point of underflow.
struct ConfigPosterior {
  int target = -1;
  int cells = 0;
  std::vector<double> log_weight;
  std::vector<double> prob;
  double log_norm = 0.0;
  double p_not_regulated() const { return prob[0]; }
  double p_source(int source_cell) const { return prob[1 + source_cell]; }
  double p_gene(int gene, const Dims& dims) const;
  double log_p_not_regulated() const { return log_weight[0] - log_norm; }
  double log_p_source(int source_cell) const {
    return log_weight[1 + source_cell] - log_norm;
  }
  // log(1 - p of the given entry), computed from the complement's weights
  double log_complement(int entry) const;
  double log_p_regulated() const { return log_complement(0); }
};

ConfigPosterior model_config_posterior(int target_cell, int transition,
                                       const ModelState& state,
                                       const PriorConfig& prior);

// One Metropolis update each for a then b of a regulated target, against
// the Student-t conditional prior times the Gaussian likelihood factor.
// Returns {a accepted, b accepted}.
struct CoeffMhResult {
  bool accepted_a = false;
  bool accepted_b = false;
};
CoeffMhResult coeff_mh_step(int target_cell, int transition,
                            const ExpressionDataset& data,
                            const RegulatoryModel& model,
                            RegulationCoefficients& coeffs,
                            const GlobalParams& params,
                            const PriorConfig& prior, Rng& rng,
                            double step_a, double step_b);

// Internal building block shared with the chain: MH update of one pair
// given precomputed pair statistics and running totals. Mutates coeffs and
// totals in place.
CoeffMhResult coeff_mh_step_cached(int target_cell, int transition,
                                   const PairStats& ps,
                                   RegulationCoefficients& coeffs,
                                   CoeffTotals& totals,
                                   const GlobalParams& params,
                                   const PriorConfig& prior, Rng& rng,
                                   double step_a, double step_b);

}  // namespace stagenet
