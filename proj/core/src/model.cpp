#include "stagenet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace stagenet {

std::vector<std::string> validate_model(const RegulatoryModel& model,
                                        const Dims& dims) {
  std::vector<std::string> violations;
  if (model.transitions() != dims.transitions() || model.cells() != dims.cells()) {
    violations.push_back("model dimensions do not match");
    return violations;
  }
  for (int tr = 0; tr < model.transitions(); ++tr) {
    for (int cell = 0; cell < model.cells(); ++cell) {
      const int src = model.source(tr, cell);
      if (src == RegulatoryModel::kNotRegulated) continue;
      if (src < 0 || src >= dims.cells()) {
        violations.push_back("transition " + std::to_string(tr + 2) + " cell " +
                             std::to_string(cell) + ": source out of range");
        continue;
      }
      if (src == cell) {
        const TargetId t = target_from_cell(dims, cell);
        violations.push_back("transition " + std::to_string(tr + 2) + " target (" +
                             std::to_string(t.gene + 1) + "," +
                             std::to_string(t.region + 1) + "): self-regulation");
      }
    }
  }
  return violations;
}

RegulatoryModel generate_network(Rng& rng, const Dims& dims, double density) {
  dims.validate();
  if (!(density >= 0.0 && density <= 1.0)) {
    throw std::invalid_argument("generate_network: density must be in [0,1]");
  }
  RegulatoryModel model(dims);
  const int cells = dims.cells();
  if (cells < 2 && density > 0.0) {
    // single cell has no admissible source
    return model;
  }
  for (int tr = 0; tr < dims.transitions(); ++tr) {
    for (int cell = 0; cell < cells; ++cell) {
      if (rng.uniform() < density) {
        int src = rng.uniform_int(cells - 1);
        if (src >= cell) ++src;  // skip self
        model.set_source(tr, cell, src);
      }
    }
  }
  return model;
}

RegulationCoefficients generate_coefficients(Rng& rng,
                                             const RegulatoryModel& model,
                                             const PriorConfig& prior) {
  RegulationCoefficients coeffs(model.dims());
  const double sigma_sq = rng.inv_gamma(0.5 * prior.v, 2.0 * prior.v * prior.lambda);
  const double sd_a = std::sqrt(sigma_sq * prior.v_a);
  const double sd_b = std::sqrt(sigma_sq * prior.slope_prior_scale());
  for (int tr = 0; tr < model.transitions(); ++tr) {
    for (int cell = 0; cell < model.cells(); ++cell) {
      if (!model.is_regulated(tr, cell)) continue;
      coeffs.set(tr, cell,
                 Coef{rng.normal(prior.alpha_a, sd_a), rng.normal(prior.alpha_b, sd_b)});
    }
  }
  return coeffs;
}

GlobalParams generate_global_params(Rng& rng, const Dims& dims,
                                    const PriorConfig& prior) {
  GlobalParams params;
  params.mu.resize(dims.cells());
  for (int cell = 0; cell < dims.cells(); ++cell) {
    params.mu[cell] = rng.normal(prior.c[cell], std::sqrt(prior.d[cell]));
  }
  params.sigma1_sq = rng.inv_gamma(prior.p1, prior.q1);
  params.mu2 = rng.normal(prior.c2, std::sqrt(prior.d2));
  params.sigma2_sq = rng.inv_gamma(prior.p2, prior.q2);
  return params;
}

ExpressionDataset simulate_dataset(const RegulatoryModel& model,
                                   const RegulationCoefficients& coeffs,
                                   const GlobalParams& params, const Dims& dims,
                                   Rng& rng) {
  dims.validate();
  params.validate(dims);
  if (!validate_model(model, dims).empty()) {
    throw std::invalid_argument("simulate_dataset: invalid model");
  }
  const int cells = dims.cells();
  const double sd1 = std::sqrt(params.sigma1_sq);
  const double sd2 = std::sqrt(params.sigma2_sq);

  ExpressionDataset ds;
  ds.dims = dims;
  int next_id = 1;
  for (int stage = 1; stage <= dims.stages; ++stage) {
    for (int e = 0; e < dims.persons_per_stage[stage - 1]; ++e) {
      Person p;
      p.id = next_id++;
      p.death_stage = stage;
      p.values.assign(static_cast<std::size_t>(stage) * cells, 0.0);
      p.observed.assign(p.values.size(), 0);
      for (int cell = 0; cell < cells; ++cell) {
        p.values[cell] = rng.normal(params.mu[cell], sd1);
      }
      for (int s = 1; s < stage; ++s) {
        const int tr = s - 1;  // transition from stage s to s+1 (1-based)
        for (int cell = 0; cell < cells; ++cell) {
          const double prev = p.values[static_cast<std::size_t>(s - 1) * cells + cell];
          double inc_mean = params.mu2;
          const int src = model.source(tr, cell);
          if (src != RegulatoryModel::kNotRegulated) {
            const Coef& c = coeffs.at(tr, cell);
            inc_mean = c.a + c.b * p.values[static_cast<std::size_t>(s - 1) * cells + src];
          }
          p.values[static_cast<std::size_t>(s) * cells + cell] =
              prev + rng.normal(inc_mean, sd2);
        }
      }
      // only the death-stage layer is observed
      for (int cell = 0; cell < cells; ++cell) {
        p.observed[static_cast<std::size_t>(stage - 1) * cells + cell] = 1;
      }
      ds.persons.push_back(std::move(p));
    }
  }
  ds.finalize();
  return ds;
}

}  // namespace stagenet
