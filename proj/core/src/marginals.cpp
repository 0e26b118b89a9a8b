#include "stagenet/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stagenet/stats.hpp"

namespace stagenet {

double ScaledStudentT::log_pdf(double x) const {
  return log_student_t_pdf(x, dof, location, scale);
}

double BivariateT::log_pdf(double a, double b) const {
  return log_bivariate_t_pdf(a, b, dof, loc_a, loc_b, s_aa, s_ab, s_bb);
}

Coef BivariateT::sample(Rng& rng) const {
  const double l00 = std::sqrt(s_aa);
  const double l10 = s_ab / l00;
  const double arg = s_bb - l10 * l10;
  const double l11 = std::sqrt(std::max(arg, 1e-300));
  const double z0 = rng.normal(0.0, 1.0);
  const double z1 = rng.normal(0.0, 1.0);
  const double w = std::sqrt(dof / rng.chi_square(dof));
  return Coef{loc_a + w * l00 * z0, loc_b + w * (l10 * z0 + l11 * z1)};
}

TransitionStats TransitionStats::build(const ExpressionDataset& data,
                                       int transition) {
  TransitionStats st;
  st.cells_ = data.dims.cells();
  const int cells = st.cells_;
  st.prev_sum_.assign(cells, 0.0);
  st.prev_sqsum_.assign(cells, 0.0);
  st.inc_sum_.assign(cells, 0.0);
  st.inc_sqsum_.assign(cells, 0.0);
  st.cross_.assign(static_cast<std::size_t>(cells) * cells, 0.0);
  std::vector<double> prev(cells), inc(cells);
  for (int e = 0; e < static_cast<int>(data.persons.size()); ++e) {
    if (data.persons[e].death_stage - 1 < transition + 1) continue;
    ++st.n_;
    for (int c = 0; c < cells; ++c) {
      prev[c] = data.value(e, transition, c);
      inc[c] = data.value(e, transition + 1, c) - prev[c];
      st.prev_sum_[c] += prev[c];
      st.prev_sqsum_[c] += prev[c] * prev[c];
      st.inc_sum_[c] += inc[c];
      st.inc_sqsum_[c] += inc[c] * inc[c];
    }
    for (int t = 0; t < cells; ++t) {
      const double it = inc[t];
      double* row = &st.cross_[static_cast<std::size_t>(t) * cells];
      for (int s = 0; s < cells; ++s) row[s] += it * prev[s];
    }
  }
  return st;
}

PairStats TransitionStats::pair(int target, int source) const {
  return PairStats{static_cast<double>(n_),
                   prev_sum_[source],
                   prev_sqsum_[source],
                   inc_sum_[target],
                   inc_sqsum_[target],
                   cross_[static_cast<std::size_t>(target) * cells_ + source]};
}

PairStats TransitionStats::target_only(int target) const {
  PairStats ps;
  ps.n = static_cast<double>(n_);
  ps.sum_inc = inc_sum_[target];
  ps.sumsq_inc = inc_sqsum_[target];
  return ps;
}

double pair_quad(const Coef& c, const PriorConfig& prior) {
  const double da = c.a - prior.alpha_a;
  const double db = c.b - prior.alpha_b;
  return da * da / prior.v_a + db * db / prior.slope_prior_scale();
}

CoeffTotals CoeffTotals::from(const RegulationCoefficients& coeffs,
                              const RegulatoryModel& model,
                              const PriorConfig& prior) {
  CoeffTotals t;
  for (int tr = 0; tr < model.transitions(); ++tr) {
    for (int c = 0; c < model.cells(); ++c) {
      if (!model.is_regulated(tr, c)) continue;
      ++t.n_beta;
      t.quad += pair_quad(coeffs.at(tr, c), prior);
    }
  }
  return t;
}

InverseGammaPosterior collapsed_sigma_sq_posterior(const PriorConfig& prior,
                                                   const CollapsedContext& ctx) {
  return {0.5 * prior.v + ctx.n_beta_minus,
          2.0 * prior.v * prior.lambda + 0.5 * ctx.c_minus};
}

BivariateT coeff_pair_conditional_prior(const PriorConfig& prior,
                                        const CollapsedContext& ctx) {
  const double dof = prior.v + 2.0 * ctx.n_beta_minus;
  const double s = (4.0 * prior.v * prior.lambda + ctx.c_minus) / dof;
  return BivariateT{dof,
                    prior.alpha_a,
                    prior.alpha_b,
                    s * prior.v_a,
                    0.0,
                    s * prior.slope_prior_scale()};
}

double coeff_pair_log_prior(const Coef& c, const PriorConfig& prior,
                            const CollapsedContext& ctx) {
  return coeff_pair_conditional_prior(prior, ctx).log_pdf(c.a, c.b);
}

ScaledStudentT coeff_conditional_prior(CoefComponent which, int target_cell,
                                       int transition,
                                       const RegulationCoefficients& coeffs,
                                       const RegulatoryModel& model,
                                       const PriorConfig& prior) {
  if (!model.is_regulated(transition, target_cell)) {
    throw std::invalid_argument(
        "coeff_conditional_prior: target is not regulated at this transition");
  }
  const CoeffTotals totals = CoeffTotals::from(coeffs, model, prior);
  const Coef& cur = coeffs.at(transition, target_cell);
  const double c_minus = totals.quad - pair_quad(cur, prior);
  const double dof = prior.v + 2.0 * totals.n_beta - 1.0;
  const double four_vl = 4.0 * prior.v * prior.lambda;
  if (which == CoefComponent::kIntercept) {
    const double db = cur.b - prior.alpha_b;
    const double a_factor = db * db / prior.slope_prior_scale() + four_vl + c_minus;
    return ScaledStudentT{dof, prior.alpha_a,
                          std::sqrt(a_factor * prior.v_a / dof)};
  }
  const double da = cur.a - prior.alpha_a;
  const double b_factor = da * da / prior.v_a + four_vl + c_minus;
  return ScaledStudentT{dof, prior.alpha_b,
                        std::sqrt(b_factor * prior.slope_prior_scale() / dof)};
}

double null_increment_loglik(const PairStats& target, double mu2,
                             double sigma2_sq) {
  const double rss =
      target.sumsq_inc - 2.0 * mu2 * target.sum_inc + target.n * mu2 * mu2;
  return -0.5 * target.n * (kLogTwoPi + std::log(sigma2_sq)) -
         0.5 * rss / sigma2_sq;
}

double regulated_increment_loglik(const PairStats& ps, const Coef& c,
                                  double sigma2_sq) {
  const double rss = ps.sumsq_inc + ps.n * c.a * c.a +
                     c.b * c.b * ps.sumsq_prev - 2.0 * c.a * ps.sum_inc -
                     2.0 * c.b * ps.cross + 2.0 * c.a * c.b * ps.sum_prev;
  return -0.5 * ps.n * (kLogTwoPi + std::log(sigma2_sq)) - 0.5 * rss / sigma2_sq;
}

namespace {

// Everything needed to evaluate, at one sigma^2, the log density of the
// stacked increments with (a, b) integrated out:
//   log N(r; 0, sigma2_sq*I + sigma^2 * X V0 X'),
// reduced to 2x2 algebra through the matrix determinant lemma and Woodbury.
struct CollapsedIntegrand {
  double p;            // stacked rows
  double s2;           // sigma2_sq
  double rtr;          // residual sum of squares at theta = alpha
  double xr0, xr1;     // X' r
  double xx00, xx01, xx11;  // X' X
  double va, vb2;      // prior scale diagonal
  double tr_a, det_a;  // trace/determinant of V0 * X'X
  double alpha_a, alpha_b;
  double a0, b0;       // collapsed sigma^2 posterior (shape, scale)
  double log_ig_const;

  double log_f(double sig_sq) const {
    if (p == 0.0) return 0.0;
    const double s = sig_sq / s2;
    const double logdet = p * std::log(s2) + std::log1p(s * tr_a + s * s * det_a);
    // M = (sig_sq V0)^{-1} + X'X / s2
    const double m00 = 1.0 / (sig_sq * va) + xx00 / s2;
    const double m01 = xx01 / s2;
    const double m11 = 1.0 / (sig_sq * vb2) + xx11 / s2;
    const double det_m = m00 * m11 - m01 * m01;
    const double corr =
        (xr0 * (m11 * xr0 - m01 * xr1) + xr1 * (m00 * xr1 - m01 * xr0)) / det_m;
    const double quad = rtr / s2 - corr / (s2 * s2);
    return -0.5 * p * kLogTwoPi - 0.5 * logdet - 0.5 * quad;
  }

  // g(z), the log integrand over z = log sigma^2 (jacobian included)
  double log_g(double z) const {
    const double sig_sq = std::exp(z);
    return log_f(sig_sq) + log_ig_const - a0 * z - b0 * std::exp(-z);
  }

  // conditional Gaussian moments of (a, b) at fixed sigma^2
  void theta_moments(double sig_sq, double* mean_a, double* mean_b, double* c00,
                     double* c01, double* c11, double sum_inc,
                     double cross) const {
    const double m00 = 1.0 / (sig_sq * va) + xx00 / s2;
    const double m01 = xx01 / s2;
    const double m11 = 1.0 / (sig_sq * vb2) + xx11 / s2;
    const double det_m = m00 * m11 - m01 * m01;
    *c00 = m11 / det_m;
    *c01 = -m01 / det_m;
    *c11 = m00 / det_m;
    const double r0 = alpha_a / (sig_sq * va) + sum_inc / s2;
    const double r1 = alpha_b / (sig_sq * vb2) + cross / s2;
    *mean_a = *c00 * r0 + *c01 * r1;
    *mean_b = *c01 * r0 + *c11 * r1;
  }
};

CollapsedIntegrand make_integrand(const PairStats& ps, const GlobalParams& params,
                                  const PriorConfig& prior,
                                  const CollapsedContext& ctx) {
  if (!(params.sigma2_sq > 0.0)) {
    throw NumericalError("collapsed marginal: sigma2^2 must be positive");
  }
  if (!(prior.v_a > 0.0) || !(prior.v_b > 0.0)) {
    throw NumericalError("collapsed marginal: prior scale not positive definite");
  }
  CollapsedIntegrand in{};
  in.p = ps.n;
  in.s2 = params.sigma2_sq;
  in.va = prior.v_a;
  in.vb2 = prior.slope_prior_scale();
  in.alpha_a = prior.alpha_a;
  in.alpha_b = prior.alpha_b;
  const double aa = prior.alpha_a, ab = prior.alpha_b;
  in.rtr = ps.sumsq_inc - 2.0 * (aa * ps.sum_inc + ab * ps.cross) +
           (ps.n * aa * aa + 2.0 * aa * ab * ps.sum_prev + ab * ab * ps.sumsq_prev);
  in.xr0 = ps.sum_inc - ps.n * aa - ps.sum_prev * ab;
  in.xr1 = ps.cross - ps.sum_prev * aa - ps.sumsq_prev * ab;
  in.xx00 = ps.n;
  in.xx01 = ps.sum_prev;
  in.xx11 = ps.sumsq_prev;
  in.tr_a = in.va * ps.n + in.vb2 * ps.sumsq_prev;
  in.det_a = in.va * in.vb2 *
             std::max(ps.n * ps.sumsq_prev - ps.sum_prev * ps.sum_prev, 0.0);
  in.a0 = 0.5 * prior.v + ctx.n_beta_minus;
  in.b0 = 2.0 * prior.v * prior.lambda + 0.5 * ctx.c_minus;
  in.log_ig_const = in.a0 * std::log(in.b0) - std::lgamma(in.a0);
  return in;
}

}  // namespace

CollapsedEvaluation evaluate_collapsed(const PairStats& ps,
                                       const GlobalParams& params,
                                       const PriorConfig& prior,
                                       const CollapsedContext& ctx,
                                       bool with_moments) {
  const CollapsedIntegrand in = make_integrand(ps, params, prior, ctx);
  CollapsedEvaluation out;

  if (ps.n == 0.0) {
    // empty likelihood: the marginal is 1 and the "posterior" is the prior
    out.log_marginal = 0.0;
    if (with_moments && in.a0 > 1.0) {
      const double es = in.b0 / (in.a0 - 1.0);
      out.moments_ok = true;
      out.mean_a = prior.alpha_a;
      out.mean_b = prior.alpha_b;
      out.cov_aa = es * in.va;
      out.cov_ab = 0.0;
      out.cov_bb = es * in.vb2;
    }
    return out;
  }

  // locate the support of the integrand in z = log sigma^2
  const double zc = std::log(in.b0 / (in.a0 + 1.0));
  constexpr double kDrop = 45.0;
  double gmax = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> scan;
  scan.reserve(256);
  auto probe = [&](double z) {
    const double g = in.log_g(z);
    scan.emplace_back(z, g);
    gmax = std::max(gmax, g);
  };
  for (double z = zc - 25.0; z <= zc + 90.0; z += 0.75) probe(z);
  {
    double z = zc - 25.0;
    while (z > zc - 300.0 && scan.front().second > gmax - kDrop) {
      z -= 2.0;
      const double g = in.log_g(z);
      scan.insert(scan.begin(), {z, g});
      gmax = std::max(gmax, g);
    }
    z = zc + 90.0;
    while (z < zc + 300.0 && scan.back().second > gmax - kDrop) {
      z += 2.0;
      probe(z);
    }
  }
  double lo = scan.back().first, hi = scan.front().first;
  for (const auto& [z, g] : scan) {
    if (g >= gmax - kDrop + 3.0) {
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
  }
  lo -= 1.0;
  hi += 1.0;

  // composite 16-point Gauss-Legendre over [lo, hi]
  const auto& rule = GaussLegendre::rule16();
  constexpr int kPanels = 12;
  const double width = (hi - lo) / kPanels;
  const double half = 0.5 * width;
  std::vector<double> node_z, node_logw;
  node_z.reserve(kPanels * 16);
  node_logw.reserve(kPanels * 16);
  for (int p = 0; p < kPanels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (std::size_t i = 0; i < rule.nodes().size(); ++i) {
      const double z = mid + half * rule.nodes()[i];
      node_z.push_back(z);
      node_logw.push_back(in.log_g(z) + std::log(rule.weights()[i] * half));
    }
  }
  out.log_marginal = log_sum_exp(node_logw);
  if (!std::isfinite(out.log_marginal)) {
    throw NumericalError("collapsed marginal: quadrature failed");
  }

  if (with_moments) {
    double wsum = 0.0;
    double ma = 0.0, mb = 0.0, saa = 0.0, sab = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < node_z.size(); ++i) {
      const double w = std::exp(node_logw[i] - out.log_marginal);
      if (w <= 0.0) continue;
      double mean_a, mean_b, c00, c01, c11;
      in.theta_moments(std::exp(node_z[i]), &mean_a, &mean_b, &c00, &c01, &c11,
                       ps.sum_inc, ps.cross);
      wsum += w;
      ma += w * mean_a;
      mb += w * mean_b;
      saa += w * (c00 + mean_a * mean_a);
      sab += w * (c01 + mean_a * mean_b);
      sbb += w * (c11 + mean_b * mean_b);
    }
    if (wsum > 0.0) {
      ma /= wsum;
      mb /= wsum;
      const double cov_aa = saa / wsum - ma * ma;
      const double cov_ab = sab / wsum - ma * mb;
      const double cov_bb = sbb / wsum - mb * mb;
      const double det = cov_aa * cov_bb - cov_ab * cov_ab;
      if (std::isfinite(det) && cov_aa > 0.0 && det > 0.0) {
        out.moments_ok = true;
        out.mean_a = ma;
        out.mean_b = mb;
        out.cov_aa = cov_aa;
        out.cov_ab = cov_ab;
        out.cov_bb = cov_bb;
      }
    }
  }
  return out;
}

BivariateT fit_coefficient_proposal(const PairStats& ps,
                                    const GlobalParams& params,
                                    const PriorConfig& prior,
                                    const CollapsedContext& ctx) {
  const CollapsedEvaluation ev = evaluate_collapsed(ps, params, prior, ctx, true);
  if (!ev.moments_ok) return coeff_pair_conditional_prior(prior, ctx);
  double dof = prior.v + 2.0 * ctx.n_beta_minus + ps.n;
  dof = std::max(dof, 3.0);
  const double shrink = (dof - 2.0) / dof;  // t covariance is dof/(dof-2) * scale
  return BivariateT{dof,      ev.mean_a,           ev.mean_b,
                    shrink * ev.cov_aa, shrink * ev.cov_ab, shrink * ev.cov_bb};
}

namespace {

PairStats build_pair_stats(const ExpressionDataset& data, int transition,
                           int target, int source) {
  PairStats ps;
  for (int e = 0; e < static_cast<int>(data.persons.size()); ++e) {
    if (data.persons[e].death_stage - 1 < transition + 1) continue;
    const double prev = data.value(e, transition, source);
    const double inc =
        data.value(e, transition + 1, target) - data.value(e, transition, target);
    ps.n += 1.0;
    ps.sum_prev += prev;
    ps.sumsq_prev += prev * prev;
    ps.sum_inc += inc;
    ps.sumsq_inc += inc * inc;
    ps.cross += inc * prev;
  }
  return ps;
}

CollapsedContext context_excluding(const RegulationCoefficients& coeffs,
                                   const RegulatoryModel& model,
                                   const PriorConfig& prior, int transition,
                                   int target_cell) {
  const CoeffTotals totals = CoeffTotals::from(coeffs, model, prior);
  CollapsedContext ctx{totals.n_beta, totals.quad};
  if (model.is_regulated(transition, target_cell)) {
    ctx.n_beta_minus -= 1;
    ctx.c_minus -= pair_quad(coeffs.at(transition, target_cell), prior);
  }
  ctx.c_minus = std::max(ctx.c_minus, 0.0);
  return ctx;
}

}  // namespace

double null_marginal_loglik(int target_cell, int transition,
                            const ModelState& state) {
  const PairStats ps =
      build_pair_stats(*state.data, transition, target_cell, target_cell);
  return null_increment_loglik(ps, state.params->mu2, state.params->sigma2_sq);
}

double regulated_marginal_loglik(int target_cell, int source_cell,
                                 int transition, const ModelState& state,
                                 const PriorConfig& prior) {
  if (source_cell == target_cell) {
    throw std::invalid_argument("regulated_marginal_loglik: self-regulation");
  }
  const CollapsedContext ctx = context_excluding(
      *state.coeffs, *state.model, prior, transition, target_cell);
  const PairStats ps =
      build_pair_stats(*state.data, transition, target_cell, source_cell);
  return evaluate_collapsed(ps, *state.params, prior, ctx, false).log_marginal;
}

double ConfigPosterior::p_gene(int gene, const Dims& dims) const {
  double total = 0.0;
  for (int r = 0; r < dims.regions; ++r) {
    const int cell = gene * dims.regions + r;
    if (cell + 1 < static_cast<int>(prob.size()) && cell != target) {
      total += prob[1 + cell];
    }
  }
  return total;
}

double ConfigPosterior::log_complement(int entry) const {
  std::vector<double> rest;
  rest.reserve(log_weight.size() - 1);
  for (std::size_t i = 0; i < log_weight.size(); ++i) {
    if (static_cast<int>(i) != entry) rest.push_back(log_weight[i]);
  }
  return log_sum_exp(rest) - log_norm;
}

ConfigPosterior model_config_posterior(int target_cell, int transition,
                                       const ModelState& state,
                                       const PriorConfig& prior) {
  const int cells = state.data->dims.cells();
  ConfigPosterior cp;
  cp.target = target_cell;
  cp.cells = cells;
  cp.log_weight.assign(cells + 1, -std::numeric_limits<double>::infinity());
  const double log_prior = -std::log(static_cast<double>(cells));
  const CollapsedContext ctx = context_excluding(
      *state.coeffs, *state.model, prior, transition, target_cell);
  cp.log_weight[0] =
      log_prior + null_marginal_loglik(target_cell, transition, state);
  for (int s = 0; s < cells; ++s) {
    if (s == target_cell) continue;
    const PairStats ps = build_pair_stats(*state.data, transition, target_cell, s);
    cp.log_weight[1 + s] =
        log_prior +
        evaluate_collapsed(ps, *state.params, prior, ctx, false).log_marginal;
  }
  cp.log_norm = log_sum_exp(cp.log_weight);
  cp.prob.assign(cells + 1, 0.0);
  for (int i = 0; i <= cells; ++i) {
    cp.prob[i] = std::isfinite(cp.log_weight[i])
                     ? std::exp(cp.log_weight[i] - cp.log_norm)
                     : 0.0;
  }
  return cp;
}

CoeffMhResult coeff_mh_step_cached(int target_cell, int transition,
                                   const PairStats& ps,
                                   RegulationCoefficients& coeffs,
                                   CoeffTotals& totals,
                                   const GlobalParams& params,
                                   const PriorConfig& prior, Rng& rng,
                                   double step_a, double step_b) {
  Coef cur = coeffs.at(transition, target_cell);
  const Coef original = cur;
  const double c_minus = std::max(totals.quad - pair_quad(cur, prior), 0.0);
  const double dof = prior.v + 2.0 * totals.n_beta - 1.0;
  const double four_vl = 4.0 * prior.v * prior.lambda;
  const double vb2 = prior.slope_prior_scale();
  const double s2 = params.sigma2_sq;
  CoeffMhResult res;

  {
    const double db = cur.b - prior.alpha_b;
    const double a_factor = db * db / vb2 + four_vl + c_minus;
    const ScaledStudentT pr{dof, prior.alpha_a,
                            std::sqrt(a_factor * prior.v_a / dof)};
    auto logp = [&](double a) {
      double lp = pr.log_pdf(a);
      if (ps.n > 0.0) {
        const double m = (ps.sum_inc - cur.b * ps.sum_prev) / ps.n;
        lp += log_normal_pdf(a, m, s2 / ps.n);
      }
      return lp;
    };
    const double prop = cur.a + step_a * rng.normal(0.0, 1.0);
    const double log_ratio = logp(prop) - logp(cur.a);
    if (std::log(rng.uniform()) < log_ratio) {
      cur.a = prop;
      res.accepted_a = true;
    }
  }
  {
    const double da = cur.a - prior.alpha_a;
    const double b_factor = da * da / prior.v_a + four_vl + c_minus;
    const ScaledStudentT pr{dof, prior.alpha_b, std::sqrt(b_factor * vb2 / dof)};
    auto logp = [&](double b) {
      double lp = pr.log_pdf(b);
      if (ps.sumsq_prev > 0.0) {
        const double m = (ps.cross - cur.a * ps.sum_prev) / ps.sumsq_prev;
        lp += log_normal_pdf(b, m, s2 / ps.sumsq_prev);
      }
      return lp;
    };
    const double prop = cur.b + step_b * rng.normal(0.0, 1.0);
    const double log_ratio = logp(prop) - logp(cur.b);
    if (std::log(rng.uniform()) < log_ratio) {
      cur.b = prop;
      res.accepted_b = true;
    }
  }
  if (res.accepted_a || res.accepted_b) {
    totals.quad += pair_quad(cur, prior) - pair_quad(original, prior);
    coeffs.set(transition, target_cell, cur);
  }
  return res;
}

CoeffMhResult coeff_mh_step(int target_cell, int transition,
                            const ExpressionDataset& data,
                            const RegulatoryModel& model,
                            RegulationCoefficients& coeffs,
                            const GlobalParams& params,
                            const PriorConfig& prior, Rng& rng,
                            double step_a, double step_b) {
  if (!model.is_regulated(transition, target_cell)) {
    throw std::invalid_argument("coeff_mh_step: target is not regulated");
  }
  const int src = model.source(transition, target_cell);
  const PairStats ps = build_pair_stats(data, transition, target_cell, src);
  CoeffTotals totals = CoeffTotals::from(coeffs, model, prior);
  return coeff_mh_step_cached(target_cell, transition, ps, coeffs, totals,
                              params, prior, rng, step_a, step_b);
}

}  // namespace stagenet
