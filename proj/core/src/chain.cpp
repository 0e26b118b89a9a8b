#include "stagenet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stagenet/stats.hpp"

namespace stagenet {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void McmcConfig::validate() const {
  if (inner_iterations < 1 || outer_sweeps < 1) {
    throw DataError("McmcConfig: iteration counts must be positive");
  }
  if (thinning < 1) throw DataError("McmcConfig: thinning must be >= 1");
  if (burn_in < 0 || burn_in >= total_inner()) {
    throw DataError("McmcConfig: burn_in must lie inside the run");
  }
  op_matrix.validate();
  if (!(step_a > 0.0) || !(step_b > 0.0)) {
    throw DataError("McmcConfig: step sizes must be positive");
  }
}

FixedCoefficientTable FixedCoefficientTable::sample(const Dims& dims,
                                                    const PriorConfig& prior,
                                                    Rng& rng) {
  FixedCoefficientTable t;
  t.cells = dims.cells();
  t.table.assign(dims.transitions(),
                 std::vector<Coef>(static_cast<std::size_t>(t.cells) * t.cells));
  const double sigma_sq = rng.inv_gamma(0.5 * prior.v, 2.0 * prior.v * prior.lambda);
  const double sd_a = std::sqrt(sigma_sq * prior.v_a);
  const double sd_b = std::sqrt(sigma_sq * prior.slope_prior_scale());
  for (auto& layer : t.table) {
    for (int tgt = 0; tgt < t.cells; ++tgt) {
      for (int src = 0; src < t.cells; ++src) {
        if (src == tgt) continue;
        layer[static_cast<std::size_t>(tgt) * t.cells + src] =
            Coef{rng.normal(prior.alpha_a, sd_a), rng.normal(prior.alpha_b, sd_b)};
      }
    }
  }
  return t;
}

Chain::Chain(ExpressionDataset data, PriorConfig prior, McmcConfig config)
    : data_(std::move(data)),
      prior_(std::move(prior)),
      config_(config),
      rng_(config.seed),
      step_a_(config.step_a),
      step_b_(config.step_b) {
  data_.sort_persons_by_id();
  data_.finalize();
  prior_.validate(data_.dims);
  config_.validate();
  model_ = RegulatoryModel(data_.dims);
  coeffs_ = RegulationCoefficients(data_.dims);
  params_.mu = prior_.c;
  params_.sigma1_sq = prior_.q1 / std::max(prior_.p1 - 1.0, 0.5);
  params_.mu2 = prior_.c2;
  params_.sigma2_sq = prior_.q2 / std::max(prior_.p2 - 1.0, 0.5);
  totals_ = CoeffTotals{};
  stats_.resize(data_.dims.transitions());
  stats_valid_.assign(data_.dims.transitions(), 0);
  move_tries_.assign(data_.dims.transitions(), 0);
  move_accepts_.assign(data_.dims.transitions(), 0);

  // fill latent entries: unobserved death-stage values start at the prior
  // location, earlier layers backfill from the death layer
  const int cells = data_.dims.cells();
  for (auto& p : data_.persons) {
    const int death0 = p.death_stage - 1;
    for (int c = 0; c < cells; ++c) {
      auto& v = p.values[static_cast<std::size_t>(death0) * cells + c];
      if (!p.observed[static_cast<std::size_t>(death0) * cells + c]) {
        v = prior_.c[c];
      }
      for (int s = 0; s < death0; ++s) {
        p.values[static_cast<std::size_t>(s) * cells + c] = v;
      }
    }
  }
}

void Chain::set_frozen_coefficients(FixedCoefficientTable table) {
  if (table.cells != data_.dims.cells() ||
      static_cast<int>(table.table.size()) != data_.dims.transitions()) {
    throw DataError("FixedCoefficientTable: dimension mismatch");
  }
  frozen_ = std::move(table);
  config_.update_coefficients = false;
  // keep state coefficients consistent with the table
  for (int tr = 0; tr < model_.transitions(); ++tr) {
    for (int c = 0; c < model_.cells(); ++c) {
      if (model_.is_regulated(tr, c)) {
        coeffs_.set(tr, c, frozen_->at(tr, c, model_.source(tr, c)));
      }
    }
  }
  totals_ = CoeffTotals::from(coeffs_, model_, prior_);
}

void Chain::set_model(const RegulatoryModel& m) {
  if (m.transitions() != model_.transitions() || m.cells() != model_.cells()) {
    throw DataError("set_model: dimension mismatch");
  }
  if (!validate_model(m, data_.dims).empty()) {
    throw DataError("set_model: invalid model");
  }
  model_ = m;
  // reconcile coefficient domain
  for (int tr = 0; tr < model_.transitions(); ++tr) {
    for (int c = 0; c < model_.cells(); ++c) {
      const bool reg = model_.is_regulated(tr, c);
      if (reg && !coeffs_.has(tr, c)) {
        coeffs_.set(tr, c, frozen_ ? frozen_->at(tr, c, model_.source(tr, c))
                                   : Coef{prior_.alpha_a, prior_.alpha_b});
      } else if (!reg && coeffs_.has(tr, c)) {
        coeffs_.erase(tr, c);
      } else if (reg && frozen_) {
        coeffs_.set(tr, c, frozen_->at(tr, c, model_.source(tr, c)));
      }
    }
  }
  totals_ = CoeffTotals::from(coeffs_, model_, prior_);
}

void Chain::set_coefficients(const RegulationCoefficients& c) {
  const auto mism = c.domain_mismatches(model_);
  if (!mism.empty()) throw DataError("set_coefficients: " + mism.front());
  coeffs_ = c;
  totals_ = CoeffTotals::from(coeffs_, model_, prior_);
}

void Chain::set_params(const GlobalParams& p) {
  p.validate(data_.dims);
  params_ = p;
}

void Chain::set_value(int person, int stage0, int cell, double v) {
  data_.set_value(person, stage0, cell, v);
  invalidate_stats();
}

const TransitionStats& Chain::stats(int transition) {
  if (!stats_valid_[transition]) {
    stats_[transition] = TransitionStats::build(data_, transition);
    stats_valid_[transition] = 1;
  }
  return stats_[transition];
}

void Chain::invalidate_stats() {
  std::fill(stats_valid_.begin(), stats_valid_.end(), 0);
}

CollapsedContext Chain::context_for(int transition, int target) const {
  CollapsedContext ctx{totals_.n_beta, totals_.quad};
  if (model_.is_regulated(transition, target)) {
    ctx.n_beta_minus -= 1;
    ctx.c_minus -= pair_quad(coeffs_.at(transition, target), prior_);
  }
  ctx.c_minus = std::max(ctx.c_minus, 0.0);
  return ctx;
}

std::vector<double> Chain::config_log_weights(int transition, int target) const {
  const TransitionStats& st = stats_[transition];
  const int cells = data_.dims.cells();
  std::vector<double> lw(cells + 1, kNegInf);
  const double log_prior = -std::log(static_cast<double>(cells));
  lw[0] = log_prior + null_increment_loglik(st.target_only(target), params_.mu2,
                                            params_.sigma2_sq);
  if (frozen_) {
    for (int s = 0; s < cells; ++s) {
      if (s == target) continue;
      lw[1 + s] = log_prior + regulated_increment_loglik(
                                  st.pair(target, s), frozen_->at(transition, target, s),
                                  params_.sigma2_sq);
    }
  } else {
    const CollapsedContext ctx = context_for(transition, target);
    for (int s = 0; s < cells; ++s) {
      if (s == target) continue;
      lw[1 + s] =
          log_prior +
          evaluate_collapsed(st.pair(target, s), params_, prior_, ctx, false)
              .log_marginal;
    }
  }
  return lw;
}

ConfigPosterior Chain::config_posterior_cached(int transition, int target,
                                               const TransitionStats&) const {
  ConfigPosterior cp;
  cp.target = target;
  cp.cells = data_.dims.cells();
  cp.log_weight = config_log_weights(transition, target);
  const double lz = log_sum_exp(cp.log_weight);
  cp.prob.assign(cp.cells + 1, 0.0);
  for (int i = 0; i <= cp.cells; ++i) {
    cp.prob[i] =
        std::isfinite(cp.log_weight[i]) ? std::exp(cp.log_weight[i] - lz) : 0.0;
  }
  return cp;
}

ConfigPosterior Chain::config_posterior(int transition, int target) const {
  const_cast<Chain*>(this)->stats(transition);
  return config_posterior_cached(transition, target, stats_[transition]);
}

OperationMatrix::Row Chain::classify(int transition) const {
  const int k = model_.regulation_count(transition);
  if (k == 0) return OperationMatrix::kNoRelationship;
  if (k == model_.cells()) return OperationMatrix::kAllRegulated;
  return OperationMatrix::kOtherCase;
}

double Chain::log_move_prob(OperationMatrix::Row row, MoveType type) const {
  const double p = config_.op_matrix.p[row][static_cast<int>(type)];
  return p > 0.0 ? std::log(p) : kNegInf;
}

namespace {

// selection index from nonnegative weights with a uniform fallback
int pick_weighted(Rng& rng, std::vector<double>& weights, double* log_prob,
                  int fixed_choice = -1) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    total = static_cast<double>(weights.size());
  }
  int idx;
  if (fixed_choice >= 0) {
    idx = fixed_choice;
  } else {
    idx = rng.categorical(weights);
  }
  *log_prob = std::log(weights[idx] / total);
  return idx;
}

}  // namespace

Chain::Proposal Chain::propose_add(int transition) {
  stats(transition);
  Proposal prop;
  prop.type = MoveType::kAdd;
  const int cells = data_.dims.cells();
  if (cells < 2) return prop;
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<ConfigPosterior> cps;
  for (int c = 0; c < cells; ++c) {
    if (model_.is_regulated(transition, c)) continue;
    targets.push_back(c);
    cps.push_back(config_posterior_cached(transition, c, stats_[transition]));
    weights.push_back(1.0 - cps.back().p_not_regulated());
  }
  if (targets.empty()) return prop;
  double log_pt = 0.0;
  const int ti = pick_weighted(rng_, weights, &log_pt);
  prop.target = targets[ti];
  const ConfigPosterior& cp = cps[ti];
  std::vector<int> sources;
  std::vector<double> sweights;
  for (int s = 0; s < cells; ++s) {
    if (s == prop.target) continue;
    sources.push_back(s);
    sweights.push_back(cp.p_source(s));
  }
  double log_ps = 0.0;
  const int si = pick_weighted(rng_, sweights, &log_ps);
  prop.new_source = sources[si];
  prop.log_selection = log_pt + log_ps;
  prop.valid = true;
  return prop;
}

double Chain::add_selection_logprob(int transition, int target, int source) const {
  const int cells = data_.dims.cells();
  double total = 0.0, w_target = 0.0;
  int candidates = 0;
  ConfigPosterior cp_target;
  for (int c = 0; c < cells; ++c) {
    if (model_.is_regulated(transition, c)) continue;
    ++candidates;
    ConfigPosterior cp = config_posterior_cached(transition, c, stats_[transition]);
    const double w = 1.0 - cp.p_not_regulated();
    total += w;
    if (c == target) {
      w_target = w;
      cp_target = std::move(cp);
    }
  }
  double log_pt;
  if (total > 0.0) {
    log_pt = std::log(w_target / total);
  } else {
    log_pt = -std::log(static_cast<double>(candidates));
  }
  double stotal = 0.0;
  for (int s = 0; s < cells; ++s) {
    if (s == target) continue;
    stotal += cp_target.p_source(s);
  }
  double log_ps;
  if (stotal > 0.0) {
    log_ps = std::log(cp_target.p_source(source) / stotal);
  } else {
    log_ps = -std::log(static_cast<double>(cells - 1));
  }
  return log_pt + log_ps;
}

Chain::Proposal Chain::propose_delete(int transition) {
  stats(transition);
  Proposal prop;
  prop.type = MoveType::kDelete;
  std::vector<int> targets;
  std::vector<double> weights;
  for (int c = 0; c < data_.dims.cells(); ++c) {
    if (!model_.is_regulated(transition, c)) continue;
    targets.push_back(c);
    const ConfigPosterior cp =
        config_posterior_cached(transition, c, stats_[transition]);
    weights.push_back(1.0 - cp.p_source(model_.source(transition, c)));
  }
  if (targets.empty()) return prop;
  double log_pt = 0.0;
  const int ti = pick_weighted(rng_, weights, &log_pt);
  prop.target = targets[ti];
  prop.old_source = model_.source(transition, prop.target);
  prop.log_selection = log_pt;
  prop.valid = true;
  return prop;
}

double Chain::delete_selection_logprob(int transition, int target) const {
  double total = 0.0, w_target = 0.0;
  int candidates = 0;
  for (int c = 0; c < data_.dims.cells(); ++c) {
    if (!model_.is_regulated(transition, c)) continue;
    ++candidates;
    const ConfigPosterior cp =
        config_posterior_cached(transition, c, stats_[transition]);
    const double w = 1.0 - cp.p_source(model_.source(transition, c));
    total += w;
    if (c == target) w_target = w;
  }
  if (total > 0.0) return std::log(w_target / total);
  return -std::log(static_cast<double>(candidates));
}

Chain::Proposal Chain::propose_swap(int transition) {
  stats(transition);
  Proposal prop;
  prop.type = MoveType::kSwap;
  const int cells = data_.dims.cells();
  if (cells < 3) return prop;  // no alternative source can exist
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<ConfigPosterior> cps;
  for (int c = 0; c < cells; ++c) {
    if (!model_.is_regulated(transition, c)) continue;
    targets.push_back(c);
    cps.push_back(config_posterior_cached(transition, c, stats_[transition]));
    weights.push_back(1.0 - cps.back().p_source(model_.source(transition, c)));
  }
  if (targets.empty()) return prop;
  double log_pt = 0.0;
  const int ti = pick_weighted(rng_, weights, &log_pt);
  prop.target = targets[ti];
  prop.old_source = model_.source(transition, prop.target);
  std::vector<int> sources;
  std::vector<double> sweights;
  for (int s = 0; s < cells; ++s) {
    if (s == prop.target || s == prop.old_source) continue;
    sources.push_back(s);
    sweights.push_back(cps[ti].p_source(s));
  }
  if (sources.empty()) return prop;
  double log_ps = 0.0;
  const int si = pick_weighted(rng_, sweights, &log_ps);
  prop.new_source = sources[si];
  prop.log_selection = log_pt + log_ps;
  prop.valid = true;
  return prop;
}

double Chain::swap_selection_logprob(int transition, int target, int new_source,
                                     int excluded_source) const {
  const int cells = data_.dims.cells();
  double total = 0.0, w_target = 0.0;
  int candidates = 0;
  ConfigPosterior cp_target;
  for (int c = 0; c < cells; ++c) {
    if (!model_.is_regulated(transition, c)) continue;
    ++candidates;
    ConfigPosterior cp = config_posterior_cached(transition, c, stats_[transition]);
    const double w = 1.0 - cp.p_source(model_.source(transition, c));
    total += w;
    if (c == target) {
      w_target = w;
      cp_target = std::move(cp);
    }
  }
  const double log_pt = total > 0.0
                            ? std::log(w_target / total)
                            : -std::log(static_cast<double>(candidates));
  double stotal = 0.0;
  int scand = 0;
  for (int s = 0; s < cells; ++s) {
    if (s == target || s == excluded_source) continue;
    stotal += cp_target.p_source(s);
    ++scand;
  }
  const double log_ps = stotal > 0.0
                            ? std::log(cp_target.p_source(new_source) / stotal)
                            : -std::log(static_cast<double>(scand));
  return log_pt + log_ps;
}

void Chain::apply_regulation(int transition, int target, int source,
                             const Coef& c) {
  model_.set_source(transition, target, source);
  coeffs_.set(transition, target, c);
  totals_.n_beta += 1;
  totals_.quad += pair_quad(c, prior_);
}

void Chain::remove_regulation(int transition, int target) {
  totals_.n_beta -= 1;
  totals_.quad =
      std::max(totals_.quad - pair_quad(coeffs_.at(transition, target), prior_), 0.0);
  coeffs_.erase(transition, target);
  model_.clear(transition, target);
}

Chain::MoveOutcome Chain::attempt_move(int transition) {
  const TransitionStats& st = stats(transition);
  MoveOutcome out;
  const OperationMatrix::Row row = classify(transition);
  const double* row_p = config_.op_matrix.p[row];
  const MoveType move =
      static_cast<MoveType>(rng_.categorical(std::span<const double>(row_p, 3)));

  const bool frozen = frozen_.has_value();
  const auto redraw = config_.coef_redraw;

  if (move == MoveType::kAdd) {
    Proposal prop = propose_add(transition);
    if (!prop.valid) return out;
    out.proposed = true;
    const PairStats ps = st.pair(prop.target, prop.new_source);
    const PairStats ts = st.target_only(prop.target);
    const double log_null =
        null_increment_loglik(ts, params_.mu2, params_.sigma2_sq);
    const CollapsedContext ctx = context_for(transition, prop.target);

    Coef coef;
    double log_coef_term;
    if (frozen) {
      coef = frozen_->at(transition, prop.target, prop.new_source);
      log_coef_term =
          regulated_increment_loglik(ps, coef, params_.sigma2_sq) - log_null;
    } else if (redraw == McmcConfig::CoefRedraw::kPosteriorFit) {
      const BivariateT q = fit_coefficient_proposal(ps, params_, prior_, ctx);
      coef = q.sample(rng_);
      log_coef_term = regulated_increment_loglik(ps, coef, params_.sigma2_sq) +
                      coeff_pair_log_prior(coef, prior_, ctx) -
                      q.log_pdf(coef.a, coef.b) - log_null;
    } else {
      coef = coeff_pair_conditional_prior(prior_, ctx).sample(rng_);
      log_coef_term =
          evaluate_collapsed(ps, params_, prior_, ctx, false).log_marginal -
          log_null;
    }

    const double log_fwd = log_move_prob(row, MoveType::kAdd) + prop.log_selection;
    apply_regulation(transition, prop.target, prop.new_source, coef);
    const double log_rev = log_move_prob(classify(transition), MoveType::kDelete) +
                           delete_selection_logprob(transition, prop.target);
    const double log_theta = log_coef_term + log_rev - log_fwd;
    if (std::log(rng_.uniform()) < std::min(0.0, log_theta)) {
      out.accepted = true;
    } else {
      remove_regulation(transition, prop.target);
    }
    return out;
  }

  if (move == MoveType::kDelete) {
    Proposal prop = propose_delete(transition);
    if (!prop.valid) return out;
    out.proposed = true;
    const PairStats ps = st.pair(prop.target, prop.old_source);
    const PairStats ts = st.target_only(prop.target);
    const double log_null =
        null_increment_loglik(ts, params_.mu2, params_.sigma2_sq);
    const CollapsedContext ctx = context_for(transition, prop.target);
    const Coef old_coef = coeffs_.at(transition, prop.target);

    double log_coef_term;
    if (frozen) {
      log_coef_term =
          log_null - regulated_increment_loglik(ps, old_coef, params_.sigma2_sq);
    } else if (redraw == McmcConfig::CoefRedraw::kPosteriorFit) {
      const BivariateT q = fit_coefficient_proposal(ps, params_, prior_, ctx);
      log_coef_term =
          log_null - (regulated_increment_loglik(ps, old_coef, params_.sigma2_sq) +
                      coeff_pair_log_prior(old_coef, prior_, ctx) -
                      q.log_pdf(old_coef.a, old_coef.b));
    } else {
      log_coef_term =
          log_null -
          evaluate_collapsed(ps, params_, prior_, ctx, false).log_marginal;
    }

    const double log_fwd =
        log_move_prob(row, MoveType::kDelete) + prop.log_selection;
    remove_regulation(transition, prop.target);
    const double log_rev =
        log_move_prob(classify(transition), MoveType::kAdd) +
        add_selection_logprob(transition, prop.target, prop.old_source);
    const double log_theta = log_coef_term + log_rev - log_fwd;
    if (std::log(rng_.uniform()) < std::min(0.0, log_theta)) {
      out.accepted = true;
    } else {
      apply_regulation(transition, prop.target, prop.old_source, old_coef);
    }
    return out;
  }

  // Swap
  Proposal prop = propose_swap(transition);
  if (!prop.valid) return out;
  out.proposed = true;
  const PairStats ps_new = st.pair(prop.target, prop.new_source);
  const PairStats ps_old = st.pair(prop.target, prop.old_source);
  const CollapsedContext ctx = context_for(transition, prop.target);
  const Coef old_coef = coeffs_.at(transition, prop.target);

  Coef new_coef;
  double log_coef_term;
  if (frozen) {
    new_coef = frozen_->at(transition, prop.target, prop.new_source);
    log_coef_term =
        regulated_increment_loglik(ps_new, new_coef, params_.sigma2_sq) -
        regulated_increment_loglik(ps_old, old_coef, params_.sigma2_sq);
  } else if (redraw == McmcConfig::CoefRedraw::kPosteriorFit) {
    const BivariateT q_new = fit_coefficient_proposal(ps_new, params_, prior_, ctx);
    const BivariateT q_old = fit_coefficient_proposal(ps_old, params_, prior_, ctx);
    new_coef = q_new.sample(rng_);
    log_coef_term =
        (regulated_increment_loglik(ps_new, new_coef, params_.sigma2_sq) +
         coeff_pair_log_prior(new_coef, prior_, ctx) -
         q_new.log_pdf(new_coef.a, new_coef.b)) -
        (regulated_increment_loglik(ps_old, old_coef, params_.sigma2_sq) +
         coeff_pair_log_prior(old_coef, prior_, ctx) -
         q_old.log_pdf(old_coef.a, old_coef.b));
  } else {
    new_coef = coeff_pair_conditional_prior(prior_, ctx).sample(rng_);
    log_coef_term =
        evaluate_collapsed(ps_new, params_, prior_, ctx, false).log_marginal -
        evaluate_collapsed(ps_old, params_, prior_, ctx, false).log_marginal;
  }

  const double log_fwd = log_move_prob(row, MoveType::kSwap) + prop.log_selection;
  // apply: replace the source in place
  totals_.quad += pair_quad(new_coef, prior_) - pair_quad(old_coef, prior_);
  model_.set_source(transition, prop.target, prop.new_source);
  coeffs_.set(transition, prop.target, new_coef);
  const double log_rev =
      log_move_prob(classify(transition), MoveType::kSwap) +
      swap_selection_logprob(transition, prop.target, prop.old_source,
                             prop.new_source);
  const double log_theta = log_coef_term + log_rev - log_fwd;
  if (std::log(rng_.uniform()) < std::min(0.0, log_theta)) {
    out.accepted = true;
  } else {
    totals_.quad += pair_quad(old_coef, prior_) - pair_quad(new_coef, prior_);
    model_.set_source(transition, prop.target, prop.old_source);
    coeffs_.set(transition, prop.target, old_coef);
  }
  return out;
}

bool Chain::model_mh_step(int transition) {
  const MoveOutcome out = attempt_move(transition);
  if (out.proposed) {
    move_tries_[transition] += 1;
    move_accepts_[transition] += out.accepted ? 1 : 0;
  }
  return out.accepted;
}

void Chain::refresh_coefficients(int transition) {
  if (frozen_) return;
  const TransitionStats& st = stats(transition);
  for (int c = 0; c < data_.dims.cells(); ++c) {
    if (!model_.is_regulated(transition, c)) continue;
    const PairStats ps = st.pair(c, model_.source(transition, c));
    const CoeffMhResult res =
        coeff_mh_step_cached(c, transition, ps, coeffs_, totals_, params_,
                             prior_, rng_, step_a_, step_b_);
    coeff_tries_a_ += 1;
    coeff_tries_b_ += 1;
    coeff_acc_a_ += res.accepted_a ? 1 : 0;
    coeff_acc_b_ += res.accepted_b ? 1 : 0;
    if (adapting_) {
      adapt_window_tries_ += 1;
      adapt_window_acc_a_ += res.accepted_a ? 1 : 0;
      adapt_window_acc_b_ += res.accepted_b ? 1 : 0;
      maybe_adapt_steps();
    }
  }
}

void Chain::maybe_adapt_steps() {
  constexpr long kWindow = 60;
  if (adapt_window_tries_ < kWindow) return;
  const double rate_a =
      static_cast<double>(adapt_window_acc_a_) / adapt_window_tries_;
  const double rate_b =
      static_cast<double>(adapt_window_acc_b_) / adapt_window_tries_;
  auto tune = [](double& step, double rate) {
    if (rate > 0.5) step *= 1.3;
    if (rate < 0.2) step /= 1.3;
    step = std::clamp(step, 1e-3, 1e3);
  };
  tune(step_a_, rate_a);
  tune(step_b_, rate_b);
  adapt_window_tries_ = adapt_window_acc_a_ = adapt_window_acc_b_ = 0;
}

void Chain::resample_missing_layer(int transition) {
  const ModelState state{&data_, &model_, &coeffs_, &params_};
  const int layer = transition;  // stage t-1 of the (t-1, t) transition
  for (int e = 0; e < static_cast<int>(data_.persons.size()); ++e) {
    if (data_.persons[e].death_stage - 1 < transition + 1) continue;
    for (int c = 0; c < data_.dims.cells(); ++c) {
      const GaussianPosterior post =
          layer == 0 ? missing_stage1_posterior(e, c, state)
                     : missing_interior_posterior(e, c, layer, state);
      data_.set_value(e, layer, c, post.sample(rng_));
    }
  }
  invalidate_stats();
}

void Chain::sweep_missing_all() {
  const ModelState state{&data_, &model_, &coeffs_, &params_};
  const int cells = data_.dims.cells();
  for (int e = 0; e < static_cast<int>(data_.persons.size()); ++e) {
    const int death0 = data_.persons[e].death_stage - 1;
    for (int c = 0; c < cells; ++c) {
      if (!data_.observed(e, death0, c)) {
        data_.set_value(e, death0, c,
                        missing_terminal_posterior(e, c, state).sample(rng_));
      }
    }
    for (int s = death0 - 1; s >= 0; --s) {
      for (int c = 0; c < cells; ++c) {
        const GaussianPosterior post =
            s == 0 ? missing_stage1_posterior(e, c, state)
                   : missing_interior_posterior(e, c, s, state);
        data_.set_value(e, s, c, post.sample(rng_));
      }
    }
  }
  invalidate_stats();
}

void Chain::update_global_params() {
  const ModelState state{&data_, &model_, &coeffs_, &params_};
  for (int c = 0; c < data_.dims.cells(); ++c) {
    params_.mu[c] = mu_gr_posterior(c, state, prior_).sample(rng_);
  }
  params_.sigma1_sq = sigma1_posterior(state, prior_).sample(rng_);
  params_.mu2 = mu2_posterior(state, prior_).sample(rng_);
  params_.sigma2_sq = sigma2_posterior(state, prior_).sample(rng_);
}

void Chain::record_samples(int transition) {
  inner_count_[transition] += 1;
  const long i = inner_count_[transition];
  if (i <= config_.burn_in) return;
  if ((i - config_.burn_in - 1) % config_.thinning != 0) return;
  if (transition == 0) retained_ += 1;
  auto& counts = config_counts_[transition];
  for (int c = 0; c < data_.dims.cells(); ++c) {
    const int src = model_.source(transition, c);
    counts[c][src + 1] += 1;
  }
  if (config_.record_joint) {
    std::vector<int> key(data_.dims.cells());
    for (int c = 0; c < data_.dims.cells(); ++c) {
      key[c] = model_.source(transition, c);
    }
    joint_counts_[transition][key] += 1;
  }
}

void Chain::transition_sweep(int transition) {
  totals_ = CoeffTotals::from(coeffs_, model_, prior_);  // resync drift
  stats(transition);
  for (int l = 0; l < config_.inner_iterations; ++l) {
    if (adapting_ && recording_enabled_ &&
        inner_count_[transition] >= config_.burn_in) {
      adapting_ = false;  // freeze steps once past burn-in
    }
    model_mh_step(transition);
    if (config_.update_coefficients) refresh_coefficients(transition);
    if (recording_enabled_) record_samples(transition);
  }
  if (config_.update_missing) resample_missing_layer(transition);
}

void Chain::outer_pass() {
  for (int tr = 0; tr < data_.dims.transitions(); ++tr) {
    transition_sweep(tr);
  }
  if (config_.update_missing) sweep_missing_all();
  if (config_.update_params) update_global_params();
}

ChainSummary Chain::run() {
  bool any_transition_person = false;
  for (const auto& p : data_.persons) {
    if (p.death_stage >= 2) any_transition_person = true;
  }
  if (!any_transition_person) {
    throw DataError("run_chain: no persons past stage 1, no transitions estimable");
  }

  const int trs = data_.dims.transitions();
  const int cells = data_.dims.cells();
  recording_enabled_ = true;
  adapting_ = config_.adapt_steps && !frozen_;
  retained_ = 0;
  inner_count_.assign(trs, 0);
  config_counts_.assign(
      trs, std::vector<std::vector<long>>(cells, std::vector<long>(cells + 1, 0)));
  joint_counts_.assign(config_.record_joint ? trs : 0, {});
  mu_accum_.assign(cells, 0.0);
  s1_accum_ = mu2_accum_ = s2_accum_ = 0.0;
  param_samples_ = 0;

  for (int outer = 0; outer < config_.outer_sweeps; ++outer) {
    for (int tr = 0; tr < trs; ++tr) transition_sweep(tr);
    if (config_.update_missing) sweep_missing_all();
    if (config_.update_params) update_global_params();
    if (static_cast<long>(outer + 1) * config_.inner_iterations > config_.burn_in) {
      for (int c = 0; c < cells; ++c) mu_accum_[c] += params_.mu[c];
      s1_accum_ += params_.sigma1_sq;
      mu2_accum_ += params_.mu2;
      s2_accum_ += params_.sigma2_sq;
      param_samples_ += 1;
    }
  }
  recording_enabled_ = false;

  ChainSummary summary;
  summary.dims = data_.dims;
  summary.retained = retained_;
  summary.config_freq.assign(trs, std::vector<std::map<int, double>>(cells));
  for (int tr = 0; tr < trs; ++tr) {
    for (int c = 0; c < cells; ++c) {
      for (int k = 0; k <= cells; ++k) {
        const long n = config_counts_[tr][c][k];
        if (n > 0) {
          summary.config_freq[tr][c][k - 1] =
              static_cast<double>(n) / static_cast<double>(retained_);
        }
      }
    }
  }
  summary.mu_mean.assign(cells, 0.0);
  if (param_samples_ > 0) {
    for (int c = 0; c < cells; ++c) summary.mu_mean[c] = mu_accum_[c] / param_samples_;
    summary.sigma1_sq_mean = s1_accum_ / param_samples_;
    summary.mu2_mean = mu2_accum_ / param_samples_;
    summary.sigma2_sq_mean = s2_accum_ / param_samples_;
  }
  summary.model_accept_rate.assign(trs, 0.0);
  for (int tr = 0; tr < trs; ++tr) {
    if (move_tries_[tr] > 0) {
      summary.model_accept_rate[tr] =
          static_cast<double>(move_accepts_[tr]) / move_tries_[tr];
    }
  }
  summary.coeff_accept_a =
      coeff_tries_a_ > 0 ? static_cast<double>(coeff_acc_a_) / coeff_tries_a_ : 0.0;
  summary.coeff_accept_b =
      coeff_tries_b_ > 0 ? static_cast<double>(coeff_acc_b_) / coeff_tries_b_ : 0.0;
  if (config_.record_joint) {
    summary.joint_counts = joint_counts_;
  }
  return summary;
}

NetworkEstimate extract_network(const ChainSummary& summary, double min_support) {
  if (!(min_support >= 0.0 && min_support <= 1.0)) {
    throw std::invalid_argument("extract_network: min_support must be in [0,1]");
  }
  NetworkEstimate est;
  est.model = RegulatoryModel(summary.dims);
  est.support.assign(summary.dims.transitions(),
                     std::vector<double>(summary.dims.cells(), 0.0));
  for (int tr = 0; tr < summary.dims.transitions(); ++tr) {
    for (int c = 0; c < summary.dims.cells(); ++c) {
      const auto& freq = summary.config_freq[tr][c];
      int best_key = -1;
      double best = -1.0;
      // map iteration is ascending: -1 visits first, ties keep the earlier
      // key, so ties break toward "not regulated" then the lowest source
      for (const auto& [key, f] : freq) {
        if (f > best) {
          best = f;
          best_key = key;
        }
      }
      if (best_key >= 0 && best >= min_support) {
        est.model.set_source(tr, c, best_key);
        est.support[tr][c] = best;
      }
    }
  }
  return est;
}

std::vector<int> EnumeratedPosterior::decode(std::size_t index) const {
  std::vector<int> config(cells, RegulatoryModel::kNotRegulated);
  for (int c = 0; c < cells; ++c) {
    const int digit = static_cast<int>(index % cells);
    index /= cells;
    // digit 0 = not regulated, then sources in ascending order skipping self
    if (digit > 0) {
      int src = digit - 1;
      if (src >= c) ++src;
      config[c] = src;
    }
  }
  return config;
}

std::size_t EnumeratedPosterior::encode(const std::vector<int>& config) const {
  std::size_t index = 0;
  for (int c = cells - 1; c >= 0; --c) {
    int digit = 0;
    if (config[c] != RegulatoryModel::kNotRegulated) {
      digit = config[c] < c ? config[c] + 1 : config[c];
    }
    index = index * cells + digit;
  }
  return index;
}

std::map<std::vector<int>, double> EnumeratedPosterior::as_map() const {
  std::map<std::vector<int>, double> out;
  for (std::size_t i = 0; i < prob.size(); ++i) out[decode(i)] = prob[i];
  return out;
}

EnumeratedPosterior enumerate_exact_posterior(const ExpressionDataset& data,
                                              const FixedCoefficientTable& coeffs,
                                              const GlobalParams& params,
                                              const PriorConfig& prior,
                                              int transition) {
  (void)prior;
  const int cells = data.dims.cells();
  double model_count = 1.0;
  for (int c = 0; c < cells; ++c) model_count *= cells;
  if (model_count > 1e6) {
    throw std::invalid_argument("enumerate_exact_posterior: instance too large");
  }
  const TransitionStats st = TransitionStats::build(data, transition);
  // per target: log likelihood of each of its `cells` configurations
  std::vector<std::vector<double>> loglik(cells, std::vector<double>(cells, 0.0));
  for (int c = 0; c < cells; ++c) {
    loglik[c][0] =
        null_increment_loglik(st.target_only(c), params.mu2, params.sigma2_sq);
    for (int digit = 1; digit < cells; ++digit) {
      int src = digit - 1;
      if (src >= c) ++src;
      loglik[c][digit] = regulated_increment_loglik(
          st.pair(c, src), coeffs.at(transition, c, src), params.sigma2_sq);
    }
  }
  const auto total = static_cast<std::size_t>(model_count);
  std::vector<double> logp(total, 0.0);
  for (std::size_t m = 0; m < total; ++m) {
    std::size_t idx = m;
    double lp = 0.0;
    for (int c = 0; c < cells; ++c) {
      lp += loglik[c][idx % cells];
      idx /= cells;
    }
    logp[m] = lp;
  }
  const double lz = log_sum_exp(logp);
  EnumeratedPosterior out;
  out.cells = cells;
  out.prob.resize(total);
  for (std::size_t m = 0; m < total; ++m) out.prob[m] = std::exp(logp[m] - lz);
  return out;
}

}  // namespace stagenet
