#include <doctest.h>

#include <cmath>

#include "stagenet/model.hpp"
#include "stagenet/posteriors.hpp"
#include "stagenet/stats.hpp"
#include "testing/oracles.hpp"

using namespace stagenet;

namespace {

// hand-built two-cell instance used by the worked examples:
// cells 0 and 1, T = 2, one person who died at stage 2
struct TinyFixture {
  Dims dims;
  PriorConfig prior;
  GlobalParams params;
  RegulatoryModel model;
  RegulationCoefficients coeffs;
  ExpressionDataset data;

  TinyFixture() {
    dims.stages = 2;
    dims.genes = 2;
    dims.regions = 1;
    dims.persons_per_stage = {0, 1};
    prior = PriorConfig::defaults(dims);
    params.mu.assign(2, 0.0);
    params.sigma1_sq = 1.0;
    params.mu2 = 0.0;
    params.sigma2_sq = 1.0;
    model = RegulatoryModel(dims);
    coeffs = RegulationCoefficients(dims);
    Person p;
    p.id = 1;
    p.death_stage = 2;
    p.values = {0.0, 0.0, 2.0, 1.0};  // stage-1 layer, stage-2 layer
    p.observed = {0, 0, 1, 1};
    data.dims = dims;
    data.persons = {p};
    data.finalize();
  }
  ModelState state() const { return {&data, &model, &coeffs, &params}; }
};

struct RandomInstance {
  Dims dims;
  PriorConfig prior;
  GlobalParams params;
  RegulatoryModel model;
  RegulationCoefficients coeffs;
  ExpressionDataset data;
};

RandomInstance make_instance(std::uint64_t seed, double density = 0.45) {
  RandomInstance in;
  in.dims.stages = 3;
  in.dims.genes = 2;
  in.dims.regions = 2;
  in.dims.persons_per_stage = {1, 2, 2};
  in.prior = PriorConfig::defaults(in.dims);
  Rng rng(seed);
  in.params = generate_global_params(rng, in.dims, in.prior);
  in.model = generate_network(rng, in.dims, density);
  in.coeffs = generate_coefficients(rng, in.model, in.prior);
  in.data = simulate_dataset(in.model, in.coeffs, in.params, in.dims, rng);
  return in;
}

}  // namespace

TEST_CASE("stage-1 conditional: worked examples") {
  TinyFixture f;
  // unregulated, no dependents, D_2 = 2: precision-weighted fusion
  auto post = missing_stage1_posterior(0, 0, f.state());
  CHECK(post.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-12));

  // prior and increment agree at 5
  TinyFixture g;
  g.params.mu.assign(2, 5.0);
  g.data.set_value(0, 1, 0, 5.0);
  post = missing_stage1_posterior(0, 0, g.state());
  CHECK(post.mean == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-12));

  // one dependent with a=0, b=0.5 and dependent increment 1
  TinyFixture h;
  h.model.set_source(0, 1, 0);  // cell 1 regulated by cell 0
  h.coeffs.set(0, 1, Coef{0.0, 0.5});
  h.data.set_value(0, 1, 1, 1.0);  // dependent increment = 1 - 0
  post = missing_stage1_posterior(0, 0, h.state());
  CHECK(post.mean == doctest::Approx(2.5 / 2.25).epsilon(1e-10));
  CHECK(post.variance == doctest::Approx(1.0 / 2.25).epsilon(1e-10));
}

TEST_CASE("interior conditional: worked examples") {
  // one person dying at stage 3, T = 3, single-gene pair of cells
  Dims dims;
  dims.stages = 3;
  dims.genes = 2;
  dims.regions = 1;
  dims.persons_per_stage = {0, 0, 1};
  GlobalParams params;
  params.mu.assign(2, 0.0);
  params.sigma1_sq = 1.0;
  params.mu2 = 0.0;
  params.sigma2_sq = 1.0;
  RegulatoryModel model(dims);
  RegulationCoefficients coeffs(dims);
  ExpressionDataset data;
  data.dims = dims;
  Person p;
  p.id = 1;
  p.death_stage = 3;
  p.values = {1.0, 0.0, 9.9, 0.0, 3.0, 2.0};  // layers for stages 1..3
  p.observed = {0, 0, 0, 0, 1, 1};
  data.persons = {p};
  data.finalize();
  const ModelState state{&data, &model, &coeffs, &params};

  // midpoint of neighbors (1, 3)
  auto post = missing_interior_posterior(0, 0, 1, state);
  CHECK(post.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-12));

  // symmetric neighbors both equal to d
  data.set_value(0, 0, 0, 4.4);
  data.set_value(0, 2, 0, 4.4);
  post = missing_interior_posterior(0, 0, 1, state);
  CHECK(post.mean == doctest::Approx(4.4).epsilon(1e-12));

  // one dependent with b=1, a=0, dependent increment 2, neighbors (1, 3)
  data.set_value(0, 0, 0, 1.0);
  data.set_value(0, 2, 0, 3.0);
  model.set_source(1, 1, 0);  // cell 1 regulated by cell 0 over (2,3)
  coeffs.set(1, 1, Coef{0.0, 1.0});
  data.set_value(0, 1, 1, 0.0);
  data.set_value(0, 2, 1, 2.0);
  post = missing_interior_posterior(0, 0, 1, state);
  CHECK(post.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(post.variance <= params.sigma2_sq / 2.0);
}

TEST_CASE("terminal conditional: worked examples") {
  TinyFixture f;
  f.params.mu2 = 0.5;
  f.data.persons[0].observed[2] = 0;  // death-stage value of cell 0 missing
  f.data.set_value(0, 0, 0, 2.0);
  auto post = missing_terminal_posterior(0, 0, f.state());
  CHECK(post.mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(1.0).epsilon(1e-12));

  // regulated: substitution of the increment mean
  f.model.set_source(0, 0, 1);
  f.coeffs.set(0, 0, Coef{1.0, 2.0});
  f.data.set_value(0, 0, 1, 0.5);
  post = missing_terminal_posterior(0, 0, f.state());
  CHECK(post.mean == doctest::Approx(2.0 + 1.0 + 2.0 * 0.5).epsilon(1e-12));

  // death at stage 1 falls back to the stage-1 prior
  Dims dims = f.dims;
  dims.persons_per_stage = {1, 0};
  ExpressionDataset solo;
  solo.dims = dims;
  Person q;
  q.id = 1;
  q.death_stage = 1;
  q.values = {0.0, 0.0};
  q.observed = {0, 1};
  solo.persons = {q};
  solo.finalize();
  GlobalParams params = f.params;
  params.mu = {3.0, 0.0};
  params.sigma1_sq = 1.7;
  RegulatoryModel model(dims);
  RegulationCoefficients coeffs(dims);
  const ModelState state{&solo, &model, &coeffs, &params};
  post = missing_terminal_posterior(0, 0, state);
  CHECK(post.mean == doctest::Approx(3.0));
  CHECK(post.variance == doctest::Approx(1.7));
}

TEST_CASE("mu posterior: worked examples") {
  // all stage-1 data equal to the prior mean: posterior stays put
  Dims dims;
  dims.stages = 2;
  dims.genes = 1;
  dims.regions = 1;
  dims.persons_per_stage = {2, 0};
  PriorConfig prior = PriorConfig::defaults(dims);
  GlobalParams params;
  params.mu = {5.0};
  params.sigma1_sq = 1.0;
  params.mu2 = 0.0;
  params.sigma2_sq = 1.0;
  RegulatoryModel model(dims);
  RegulationCoefficients coeffs(dims);
  ExpressionDataset data;
  data.dims = dims;
  for (int i = 0; i < 2; ++i) {
    Person p;
    p.id = i + 1;
    p.death_stage = 1;
    p.values = {5.0};
    p.observed = {1};
    data.persons.push_back(p);
  }
  data.finalize();
  ModelState state{&data, &model, &coeffs, &params};
  auto post = mu_gr_posterior(0, state, prior);
  CHECK(post.mean == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.25).epsilon(1e-12));

  // values {4, 6, 8} with sigma1^2 = 2
  Person extra;
  extra.id = 3;
  extra.death_stage = 1;
  extra.values = {8.0};
  extra.observed = {1};
  data.persons.push_back(extra);
  data.finalize();
  data.set_value(0, 0, 0, 4.0);
  data.set_value(1, 0, 0, 6.0);
  params.sigma1_sq = 2.0;
  post = mu_gr_posterior(0, state, prior);
  CHECK(post.mean == doctest::Approx(19.0 / 3.5).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(1.0 / 3.5).epsilon(1e-12));

  // single value, equal precision fusion
  data.persons.resize(1);
  data.finalize();
  data.set_value(0, 0, 0, 2.0);
  params.sigma1_sq = 1.0;
  PriorConfig unit = prior;
  unit.c = {7.0};
  unit.d = {1.0};
  post = mu_gr_posterior(0, state, unit);
  CHECK(post.mean == doctest::Approx((2.0 + 7.0) / 2.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sigma posteriors: worked examples") {
  RandomInstance in = make_instance(4);
  const ModelState state{&in.data, &in.model, &in.coeffs, &in.params};

  // sigma1: zero residuals over 8 entries -> IG(7, 2)
  {
    Dims dims;
    dims.stages = 2;
    dims.genes = 2;
    dims.regions = 2;
    dims.persons_per_stage = {2, 0};
    PriorConfig prior = PriorConfig::defaults(dims);
    GlobalParams params;
    params.mu.assign(4, 1.5);
    params.sigma1_sq = 1.0;
    params.mu2 = 0.0;
    params.sigma2_sq = 1.0;
    RegulatoryModel model(dims);
    RegulationCoefficients coeffs(dims);
    ExpressionDataset data;
    data.dims = dims;
    for (int i = 0; i < 2; ++i) {
      Person p;
      p.id = i + 1;
      p.death_stage = 1;
      p.values.assign(4, 1.5);
      p.observed.assign(4, 1);
      data.persons.push_back(p);
    }
    data.finalize();
    const ModelState s{&data, &model, &coeffs, &params};
    auto post = sigma1_posterior(s, prior);
    CHECK(post.shape == doctest::Approx(7.0));
    CHECK(post.scale == doctest::Approx(2.0));

    // residuals {1, -1} over two entries
    Dims d1;
    d1.stages = 2;
    d1.genes = 1;
    d1.regions = 1;
    d1.persons_per_stage = {2, 0};
    PriorConfig pr1 = PriorConfig::defaults(d1);
    GlobalParams pm;
    pm.mu = {0.0};
    pm.sigma1_sq = 1.0;
    pm.mu2 = 0.0;
    pm.sigma2_sq = 1.0;
    RegulatoryModel m1(d1);
    RegulationCoefficients c1(d1);
    ExpressionDataset ds;
    ds.dims = d1;
    for (int i = 0; i < 2; ++i) {
      Person p;
      p.id = i + 1;
      p.death_stage = 1;
      p.values = {i == 0 ? 1.0 : -1.0};
      p.observed = {1};
      ds.persons.push_back(p);
    }
    ds.finalize();
    const ModelState s1{&ds, &m1, &c1, &pm};
    post = sigma1_posterior(s1, pr1);
    CHECK(post.shape == doctest::Approx(4.0));
    CHECK(post.scale == doctest::Approx(3.0));
  }

  // sigma2: zero residuals over M = 4 increments -> IG(5, 2);
  // a regulated increment with residual 2 contributes 2 to the scale
  {
    Dims dims;
    dims.stages = 3;
    dims.genes = 2;
    dims.regions = 1;
    dims.persons_per_stage = {0, 0, 1};
    PriorConfig prior = PriorConfig::defaults(dims);
    GlobalParams params;
    params.mu.assign(2, 0.0);
    params.sigma1_sq = 1.0;
    params.mu2 = 0.5;
    params.sigma2_sq = 1.0;
    RegulatoryModel model(dims);
    RegulationCoefficients coeffs(dims);
    ExpressionDataset data;
    data.dims = dims;
    Person p;
    p.id = 1;
    p.death_stage = 3;
    // both cells climb by mu2 = 0.5 each transition: zero residuals, M = 4
    p.values = {1.0, 2.0, 1.5, 2.5, 2.0, 3.0};
    p.observed = {0, 0, 0, 0, 1, 1};
    data.persons = {p};
    data.finalize();
    const ModelState s{&data, &model, &coeffs, &params};
    auto post = sigma2_posterior(s, prior);
    CHECK(post.shape == doctest::Approx(5.0));
    CHECK(post.scale == doctest::Approx(2.0));

    // regulate cell 0 over the first transition (a=0, b=1, source value 2:
    // expected increment 2) and move its stage-2 value to 5 so the observed
    // increment is 4: a regulated residual of exactly 2 adds 2 to the scale.
    // Moving the value also shifts the (2,3) increment of cell 0 to -3,
    // residual -3.5 against mu2, adding 6.125.
    model.set_source(0, 0, 1);
    coeffs.set(0, 0, Coef{0.0, 1.0});
    data.set_value(0, 1, 0, 5.0);
    post = sigma2_posterior(s, prior);
    CHECK(post.shape == doctest::Approx(5.0));
    CHECK(post.scale == doctest::Approx(2.0 + 2.0 + 0.5 * 3.5 * 3.5));
  }
}

TEST_CASE("mu2 posterior: worked examples") {
  // no unregulated increments: posterior equals the prior N(0, 0.5)
  Dims dims;
  dims.stages = 2;
  dims.genes = 1;
  dims.regions = 2;
  dims.persons_per_stage = {0, 1};
  PriorConfig prior = PriorConfig::defaults(dims);
  GlobalParams params;
  params.mu.assign(2, 0.0);
  params.sigma1_sq = 1.0;
  params.mu2 = 0.0;
  params.sigma2_sq = 1.0;
  RegulatoryModel model(dims);
  model.set_source(0, 0, 1);
  model.set_source(0, 1, 0);
  RegulationCoefficients coeffs(dims);
  coeffs.set(0, 0, Coef{0.0, 1.0});
  coeffs.set(0, 1, Coef{0.0, 1.0});
  ExpressionDataset data;
  data.dims = dims;
  Person p;
  p.id = 1;
  p.death_stage = 2;
  p.values = {1.0, 2.0, 2.0, 3.0};
  p.observed = {0, 0, 1, 1};
  data.persons = {p};
  data.finalize();
  const ModelState state{&data, &model, &coeffs, &params};
  auto post = mu2_posterior(state, prior);
  CHECK(post.mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.5).epsilon(1e-12));

  // two unregulated increments both equal to 1
  model.clear(0, 0);
  model.clear(0, 1);
  coeffs.erase(0, 0);
  coeffs.erase(0, 1);
  post = mu2_posterior(state, prior);
  CHECK(post.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.variance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("conditional posteriors match grid-normalized full conditionals") {
  // criterion: mean and variance within 1e-3 on randomized small instances
  int checked_interior = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomInstance in = make_instance(seed);
    const ModelState state{&in.data, &in.model, &in.coeffs, &in.params};
    const int cells = in.dims.cells();

    auto value_oracle = [&](int person, int stage0, int cell) {
      return testing::grid_conditional_moments(
          [&](double x) {
            return testing::log_joint_terms_for_value(
                in.data, in.model, in.coeffs, in.params, person, stage0, cell, x);
          },
          -60.0, 70.0);
    };

    // stage-1 conditional: first person with death stage >= 2
    for (int e = 0; e < static_cast<int>(in.data.persons.size()); ++e) {
      if (in.data.persons[e].death_stage < 2) continue;
      const int cell = static_cast<int>(seed) % cells;
      const auto post = missing_stage1_posterior(e, cell, state);
      const auto grid = value_oracle(e, 0, cell);
      CHECK(std::fabs(post.mean - grid.mean) < 1e-3);
      CHECK(std::fabs(post.variance - grid.variance) < 1e-3);
      break;
    }
    // interior conditional: person with death stage 3
    for (int e = 0; e < static_cast<int>(in.data.persons.size()); ++e) {
      if (in.data.persons[e].death_stage != 3) continue;
      const int cell = static_cast<int>(seed * 7) % cells;
      const auto post = missing_interior_posterior(e, cell, 1, state);
      const auto grid = value_oracle(e, 1, cell);
      CHECK(std::fabs(post.mean - grid.mean) < 1e-3);
      CHECK(std::fabs(post.variance - grid.variance) < 1e-3);
      ++checked_interior;
      break;
    }
    // terminal conditional: flag one death-stage entry unobserved
    {
      const int cell = static_cast<int>(seed * 3) % cells;
      const int e = 0;
      const int death0 = in.data.persons[e].death_stage - 1;
      const auto post = missing_terminal_posterior(e, cell, state);
      const auto grid = value_oracle(e, death0, cell);
      CHECK(std::fabs(post.mean - grid.mean) < 1e-3);
      CHECK(std::fabs(post.variance - grid.variance) < 1e-3);
    }
    // mu_gr conditional
    {
      const int cell = static_cast<int>(seed * 5) % cells;
      const auto post = mu_gr_posterior(cell, state, in.prior);
      const auto grid = testing::grid_conditional_moments(
          [&](double m) {
            double lp = log_normal_pdf(m, in.prior.c[cell], in.prior.d[cell]);
            for (int e = 0; e < static_cast<int>(in.data.persons.size()); ++e) {
              lp += log_normal_pdf(in.data.value(e, 0, cell), m,
                                   in.params.sigma1_sq);
            }
            return lp;
          },
          -60.0, 70.0);
      CHECK(std::fabs(post.mean - grid.mean) < 1e-3);
      CHECK(std::fabs(post.variance - grid.variance) < 1e-3);
    }
    // mu2 conditional
    {
      const auto post = mu2_posterior(state, in.prior);
      const auto grid = testing::grid_conditional_moments(
          [&](double m) {
            double lp = log_normal_pdf(m, in.prior.c2, in.prior.d2);
            for (int e = 0; e < static_cast<int>(in.data.persons.size()); ++e) {
              const int death0 = in.data.persons[e].death_stage - 1;
              for (int s = 1; s <= death0; ++s) {
                for (int c = 0; c < cells; ++c) {
                  if (in.model.is_regulated(s - 1, c)) continue;
                  const double inc =
                      in.data.value(e, s, c) - in.data.value(e, s - 1, c);
                  lp += log_normal_pdf(inc, m, in.params.sigma2_sq);
                }
              }
            }
            return lp;
          },
          -60.0, 70.0);
      CHECK(std::fabs(post.mean - grid.mean) < 1e-3);
      CHECK(std::fabs(post.variance - grid.variance) < 1e-3);
    }
  }
  CHECK(checked_interior > 0);
}

TEST_CASE("inverse-gamma posterior sampling moment check") {
  // IG(4, 3) has mean 1; the sample mean over 1e4 draws lands within 5%
  Rng rng(123);
  InverseGammaPosterior post{4.0, 3.0};
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += post.sample(rng);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.05));
}
