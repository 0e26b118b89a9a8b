#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "stagenet/marginals.hpp"
#include "stagenet/model.hpp"
#include "stagenet/posteriors.hpp"
#include "stagenet/rng.hpp"
#include "stagenet/types.hpp"

namespace stagenet {

enum class MoveType { kAdd = 0, kDelete = 1, kSwap = 2 };

// Complete coefficient table over every admissible (target, source) pair,
// used to freeze coefficients for exact-enumeration checks.
struct FixedCoefficientTable {
  int cells = 0;
  std::vector<std::vector<Coef>> table;  // [transition][target * cells + source]

  const Coef& at(int transition, int target, int source) const {
    return table[transition][static_cast<std::size_t>(target) * cells + source];
  }
  static FixedCoefficientTable sample(const Dims& dims, const PriorConfig& prior,
                                      Rng& rng);
};

struct McmcConfig {
  int inner_iterations = 200;  // L: model moves per transition per outer sweep
  int outer_sweeps = 50;
  long burn_in = 2500;  // in inner iterations per transition
  int thinning = 1;
  std::uint64_t seed = 1;
  OperationMatrix op_matrix{};
  double step_a = 0.3, step_b = 0.3;
  bool adapt_steps = true;  // tune steps toward 20-50% acceptance in burn-in
  bool update_coefficients = true;
  bool update_missing = true;
  bool update_params = true;
  bool record_joint = false;  // keep joint model counts (small instances only)

  // How coefficients for a newly added/swapped regulation are drawn.
  // kPosteriorFit: bivariate-t proposal fitted to the collapsed conditional
  // posterior, with the proposal density folded into the acceptance ratio
  // (the move leaves the joint posterior exactly invariant).
  // kConditionalPrior: draw from the conditional prior and accept with the
  // plain collapsed-marginal ratio.
  enum class CoefRedraw { kPosteriorFit, kConditionalPrior };
  CoefRedraw coef_redraw = CoefRedraw::kPosteriorFit;

  long total_inner() const {
    return static_cast<long>(inner_iterations) * outer_sweeps;
  }
  void validate() const;
};

struct ChainSummary {
  Dims dims;
  long retained = 0;  // retained model samples per transition
  // [transition][cell]: sampled configuration -> frequency (key -1 = none)
  std::vector<std::vector<std::map<int, double>>> config_freq;
  std::vector<double> mu_mean;
  double sigma1_sq_mean = 0.0, mu2_mean = 0.0, sigma2_sq_mean = 0.0;
  std::vector<double> model_accept_rate;  // per transition
  double coeff_accept_a = 0.0, coeff_accept_b = 0.0;
  // joint per-transition model counts, filled when record_joint is set
  std::vector<std::map<std::vector<int>, long>> joint_counts;
};

struct NetworkEstimate {
  RegulatoryModel model;
  std::vector<std::vector<double>> support;  // [transition][cell], 0 when none
};

// Majority configuration per target; regulations below min_support (or
// losing to "not regulated") are dropped. Ties break toward not regulated,
// then the lowest source cell.
NetworkEstimate extract_network(const ChainSummary& summary, double min_support);

class Chain {
 public:
  Chain(ExpressionDataset data, PriorConfig prior, McmcConfig config);

  // Switches every model-space likelihood to fixed coefficients (exact
  // enumeration reference mode); disables coefficient updates.
  void set_frozen_coefficients(FixedCoefficientTable table);

  ChainSummary run();

  // Individual kernel pieces (run() composes these; calibration tests drive
  // them directly).
  void transition_sweep(int transition);
  bool model_mh_step(int transition);
  void refresh_coefficients(int transition);
  void resample_missing_layer(int transition);
  void sweep_missing_all();
  void update_global_params();
  void outer_pass();  // one full pass, no recording

  struct Proposal {
    bool valid = false;
    MoveType type = MoveType::kAdd;
    int target = -1;
    int old_source = -1;
    int new_source = -1;
    double log_selection = 0.0;  // target+source selection, move type excluded
  };
  Proposal propose_add(int transition);
  Proposal propose_delete(int transition);
  Proposal propose_swap(int transition);

  ConfigPosterior config_posterior(int transition, int target) const;
  OperationMatrix::Row classify(int transition) const;

  // state access/injection
  const ExpressionDataset& data() const { return data_; }
  const RegulatoryModel& model() const { return model_; }
  const RegulationCoefficients& coefficients() const { return coeffs_; }
  const GlobalParams& params() const { return params_; }
  Rng& rng() { return rng_; }
  void set_model(const RegulatoryModel& m);
  void set_coefficients(const RegulationCoefficients& c);
  void set_params(const GlobalParams& p);
  void set_value(int person, int stage0, int cell, double v);
  double step_a() const { return step_a_; }
  double step_b() const { return step_b_; }

 private:
  struct MoveOutcome {
    bool proposed = false;
    bool accepted = false;
  };
  MoveOutcome attempt_move(int transition);
  const TransitionStats& stats(int transition);
  void invalidate_stats();
  CollapsedContext context_for(int transition, int target) const;
  std::vector<double> config_log_weights(int transition, int target) const;
  ConfigPosterior config_posterior_cached(int transition, int target,
                                          const TransitionStats& st) const;
  double log_move_prob(OperationMatrix::Row row, MoveType type) const;
  double delete_selection_logprob(int transition, int target) const;
  double add_selection_logprob(int transition, int target, int source) const;
  double swap_selection_logprob(int transition, int target, int new_source,
                                int excluded_source) const;
  void apply_regulation(int transition, int target, int source, const Coef& c);
  void remove_regulation(int transition, int target);
  void record_samples(int transition);
  void maybe_adapt_steps();

  ExpressionDataset data_;
  PriorConfig prior_;
  McmcConfig config_;
  RegulatoryModel model_;
  RegulationCoefficients coeffs_;
  GlobalParams params_;
  CoeffTotals totals_;
  Rng rng_;
  std::optional<FixedCoefficientTable> frozen_;

  std::vector<TransitionStats> stats_;
  std::vector<char> stats_valid_;

  double step_a_, step_b_;
  long coeff_tries_a_ = 0, coeff_acc_a_ = 0;
  long coeff_tries_b_ = 0, coeff_acc_b_ = 0;
  long adapt_window_tries_ = 0, adapt_window_acc_a_ = 0, adapt_window_acc_b_ = 0;
  bool adapting_ = false;
  std::vector<long> move_tries_, move_accepts_;

  // recording
  bool recording_enabled_ = false;
  std::vector<long> inner_count_;  // per transition
  long retained_ = 0;
  std::vector<std::vector<std::vector<long>>> config_counts_;  // [tr][cell][1+cells]
  std::vector<std::map<std::vector<int>, long>> joint_counts_;
  std::vector<double> mu_accum_;
  double s1_accum_ = 0.0, mu2_accum_ = 0.0, s2_accum_ = 0.0;
  long param_samples_ = 0;
};

// Exact posterior over all joint models of one transition with coefficients
// held at fixed values (plain Gaussian likelihoods, nothing collapsed).
struct EnumeratedPosterior {
  int cells = 0;
  std::vector<double> prob;  // indexed by base-(cells) odometer over targets
  std::vector<int> decode(std::size_t index) const;  // per-cell: -1 or source
  std::size_t encode(const std::vector<int>& config) const;
  std::map<std::vector<int>, double> as_map() const;
};

EnumeratedPosterior enumerate_exact_posterior(const ExpressionDataset& data,
                                              const FixedCoefficientTable& coeffs,
                                              const GlobalParams& params,
                                              const PriorConfig& prior,
                                              int transition);

}  // namespace stagenet
