#include "stagenet/posteriors.hpp"

#include <stdexcept>

namespace stagenet {

namespace {

void check_state(const ModelState& s) {
  if (!s.data || !s.model || !s.coeffs || !s.params) {
    throw std::invalid_argument("ModelState: null component");
  }
}

}  // namespace

double expected_increment(int person, int cell, int transition,
                          const ModelState& state) {
  const int src = state.model->source(transition, cell);
  if (src == RegulatoryModel::kNotRegulated) return state.params->mu2;
  const Coef& c = state.coeffs->at(transition, cell);
  return c.a + c.b * state.data->value(person, transition, src);
}

GaussianPosterior missing_stage1_posterior(int person, int cell,
                                           const ModelState& state) {
  check_state(state);
  const auto& ds = *state.data;
  const auto& p = ds.persons[person];
  if (p.death_stage < 2) {
    throw std::invalid_argument("missing_stage1_posterior: needs death stage >= 2");
  }
  const double s1 = state.params->sigma1_sq;
  const double s2 = state.params->sigma2_sq;
  const int cells = ds.dims.cells();
  constexpr int tr = 0;  // transition from stage 1 to stage 2

  // own increment: D_2 - D_1 has mean E(inc), contributing precision 1/s2
  double dep_sq = 1.0;
  double num2 = ds.value(person, 1, cell) - expected_increment(person, cell, tr, state);
  // cells regulated by this one over the first transition
  for (int m = 0; m < cells; ++m) {
    if (m == cell || state.model->source(tr, m) != cell) continue;
    const Coef& c = state.coeffs->at(tr, m);
    const double inc = ds.value(person, 1, m) - ds.value(person, 0, m);
    dep_sq += c.b * c.b;
    num2 += c.b * (inc - c.a);
  }
  const double tau_sq = 1.0 / s1 + dep_sq / s2;
  const double mu_miss = state.params->mu[cell] / s1 + num2 / s2;
  return {mu_miss / tau_sq, 1.0 / tau_sq};
}

GaussianPosterior missing_interior_posterior(int person, int cell, int stage0,
                                             const ModelState& state) {
  check_state(state);
  const auto& ds = *state.data;
  const auto& p = ds.persons[person];
  const int death0 = p.death_stage - 1;
  if (stage0 < 1 || stage0 > death0 - 1) {
    throw std::invalid_argument("missing_interior_posterior: stage out of range");
  }
  const double s2 = state.params->sigma2_sq;
  const int cells = ds.dims.cells();
  const int tr_in = stage0 - 1;  // transition into this layer
  const int tr_out = stage0;     // transition out of this layer

  double eta = 2.0;
  double mu_miss =
      (ds.value(person, stage0 - 1, cell) +
       expected_increment(person, cell, tr_in, state)) +
      (ds.value(person, stage0 + 1, cell) -
       expected_increment(person, cell, tr_out, state));
  for (int m = 0; m < cells; ++m) {
    if (m == cell || state.model->source(tr_out, m) != cell) continue;
    const Coef& c = state.coeffs->at(tr_out, m);
    const double inc = ds.value(person, stage0 + 1, m) - ds.value(person, stage0, m);
    eta += c.b * c.b;
    mu_miss += c.b * (inc - c.a);
  }
  return {mu_miss / eta, s2 / eta};
}

GaussianPosterior missing_terminal_posterior(int person, int cell,
                                             const ModelState& state) {
  check_state(state);
  const auto& ds = *state.data;
  const auto& p = ds.persons[person];
  const int death0 = p.death_stage - 1;
  if (death0 == 0) {
    return {state.params->mu[cell], state.params->sigma1_sq};
  }
  const double mean = ds.value(person, death0 - 1, cell) +
                      expected_increment(person, cell, death0 - 1, state);
  return {mean, state.params->sigma2_sq};
}

GaussianPosterior mu_gr_posterior(int cell, const ModelState& state,
                                  const PriorConfig& prior) {
  check_state(state);
  const auto& ds = *state.data;
  const double s1 = state.params->sigma1_sq;
  double sum = 0.0;
  int n = 0;
  for (int e = 0; e < static_cast<int>(ds.persons.size()); ++e) {
    sum += ds.value(e, 0, cell);
    ++n;
  }
  const double tau_sq = n / s1 + 1.0 / prior.d[cell];
  const double m = sum / s1 + prior.c[cell] / prior.d[cell];
  return {m / tau_sq, 1.0 / tau_sq};
}

InverseGammaPosterior sigma1_posterior(const ModelState& state,
                                       const PriorConfig& prior) {
  check_state(state);
  const auto& ds = *state.data;
  const int cells = ds.dims.cells();
  double rss = 0.0;
  long n = 0;
  for (int e = 0; e < static_cast<int>(ds.persons.size()); ++e) {
    for (int cell = 0; cell < cells; ++cell) {
      const double d = ds.value(e, 0, cell) - state.params->mu[cell];
      rss += d * d;
      ++n;
    }
  }
  return {0.5 * n + prior.p1, 0.5 * rss + prior.q1};
}

GaussianPosterior mu2_posterior(const ModelState& state,
                                const PriorConfig& prior) {
  check_state(state);
  const auto& ds = *state.data;
  const int cells = ds.dims.cells();
  const double s2 = state.params->sigma2_sq;
  double sum = 0.0;
  long count = 0;
  for (int e = 0; e < static_cast<int>(ds.persons.size()); ++e) {
    const int death0 = ds.persons[e].death_stage - 1;
    for (int s = 1; s <= death0; ++s) {
      const int tr = s - 1;
      for (int cell = 0; cell < cells; ++cell) {
        if (state.model->is_regulated(tr, cell)) continue;
        sum += ds.value(e, s, cell) - ds.value(e, s - 1, cell);
        ++count;
      }
    }
  }
  const double tau_sq = count / s2 + 1.0 / prior.d2;
  const double m = sum / s2 + prior.c2 / prior.d2;
  return {m / tau_sq, 1.0 / tau_sq};
}

InverseGammaPosterior sigma2_posterior(const ModelState& state,
                                       const PriorConfig& prior) {
  check_state(state);
  const auto& ds = *state.data;
  const int cells = ds.dims.cells();
  double rss = 0.0;
  long count = 0;
  for (int e = 0; e < static_cast<int>(ds.persons.size()); ++e) {
    const int death0 = ds.persons[e].death_stage - 1;
    for (int s = 1; s <= death0; ++s) {
      const int tr = s - 1;
      for (int cell = 0; cell < cells; ++cell) {
        const double inc = ds.value(e, s, cell) - ds.value(e, s - 1, cell);
        const double d = inc - expected_increment(e, cell, tr, state);
        rss += d * d;
        ++count;
      }
    }
  }
  return {0.5 * count + prior.p2, 0.5 * rss + prior.q2};
}

}  // namespace stagenet
