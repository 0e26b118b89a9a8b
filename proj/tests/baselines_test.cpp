#include <doctest.h>

#include <cmath>

#include "stagenet/baselines.hpp"
#include "stagenet/model.hpp"

using namespace stagenet;

namespace {

ExpressionDataset two_cohort_dataset() {
  // one cell, two stages, two persons per stage; stage-2 values {2, 4}
  Dims dims;
  dims.stages = 2;
  dims.genes = 1;
  dims.regions = 1;
  dims.persons_per_stage = {2, 2};
  ExpressionDataset ds;
  ds.dims = dims;
  int id = 1;
  for (double v : {1.0, 3.0}) {
    Person p;
    p.id = id++;
    p.death_stage = 1;
    p.values = {v};
    p.observed = {1};
    ds.persons.push_back(p);
  }
  for (double v : {2.0, 4.0}) {
    Person p;
    p.id = id++;
    p.death_stage = 2;
    p.values = {0.0, v};
    p.observed = {0, 1};
    ds.persons.push_back(p);
  }
  ds.finalize();
  return ds;
}

}  // namespace

TEST_CASE("impute_mean fills with cohort means and keeps observations") {
  ExpressionDataset ds = two_cohort_dataset();
  const ImputedTensor t = impute_mean(ds);
  // stage-2 observations are {2, 4}: every imputed stage-2 entry is 3
  CHECK(t.value(0, 1, 0) == doctest::Approx(3.0));
  CHECK(t.value(1, 1, 0) == doctest::Approx(3.0));
  // observed entries pass through bit-exact
  CHECK(t.value(2, 1, 0) == 2.0);
  CHECK(t.value(3, 1, 0) == 4.0);
  CHECK(t.observed[2][1] == 1);
  // stage-1 entries of stage-2 persons get the stage-1 cohort mean 2
  CHECK(t.value(2, 0, 0) == doctest::Approx(2.0));
  // imputed values are constant across persons for a fixed (cell, stage)
  CHECK(t.value(2, 0, 0) == t.value(3, 0, 0));
}

TEST_CASE("impute_mean requires at least one observation per cell-stage") {
  ExpressionDataset ds = two_cohort_dataset();
  ds.persons[2].observed[1] = 0;
  ds.persons[3].observed[1] = 0;
  CHECK_THROWS_AS(impute_mean(ds), DataError);
}

TEST_CASE("random-forest imputation beats the mean on a linear signal") {
  // y = 2x exactly across two cells of the stage-1 layer; six persons have
  // the y cell masked at their death stage, so the forest can learn the
  // relation from the fully observed persons and apply it through the
  // observed x feature. Mean imputation ignores x entirely.
  Dims dims;
  dims.stages = 2;
  dims.genes = 2;
  dims.regions = 1;
  dims.persons_per_stage = {26, 2};
  ExpressionDataset ds;
  ds.dims = dims;
  int id = 1;
  std::vector<double> hidden_truth;
  for (int i = 0; i < 26; ++i) {
    const double x = 0.4 * i - 5.0;
    Person p;
    p.id = id++;
    p.death_stage = 1;
    p.values = {x, 2.0 * x};
    p.observed = {1, 1};
    if (i % 4 == 1) {  // mask the y cell for six persons
      p.observed[1] = 0;
      p.values[1] = 0.0;
      hidden_truth.push_back(2.0 * x);
    }
    ds.persons.push_back(p);
  }
  for (int i = 0; i < 2; ++i) {
    const double x = 0.7 * i - 0.3;
    Person p;
    p.id = id++;
    p.death_stage = 2;
    p.values = {0.0, 0.0, x, 2.0 * x};
    p.observed = {0, 0, 1, 1};
    ds.persons.push_back(p);
  }
  ds.finalize();

  const ImputedTensor mean_t = impute_mean(ds);
  Rng rng(3);
  const ImputedTensor rf_t = impute_random_forest(ds, 100, 5, rng);
  double rf_err = 0.0, mean_err = 0.0;
  int k = 0;
  for (int e = 0; e < 26; ++e) {
    if (ds.persons[e].observed[1]) continue;
    const double y_true = hidden_truth[k++];
    rf_err += std::pow(rf_t.value(e, 0, 1) - y_true, 2);
    mean_err += std::pow(mean_t.value(e, 0, 1) - y_true, 2);
  }
  REQUIRE(k == 6);
  CHECK(rf_err < mean_err);

  // observed entries pass through bit-exact; same seed, same imputation
  for (int e = 0; e < 26; ++e) {
    if (!ds.persons[e].observed[0]) continue;
    CHECK(rf_t.value(e, 0, 0) == ds.value(e, 0, 0));
  }
  Rng ra(9), rb(9);
  const ImputedTensor ta = impute_random_forest(ds, 30, 3, ra);
  const ImputedTensor tb = impute_random_forest(ds, 30, 3, rb);
  CHECK(ta.values == tb.values);
}

TEST_CASE("pearson decision rule") {
  // imputed tensor with a dominant cross-cell correlation at stage 2
  Dims dims;
  dims.stages = 2;
  dims.genes = 3;
  dims.regions = 1;
  dims.persons_per_stage = {0, 8};
  ImputedTensor t;
  t.dims = dims;
  for (int e = 0; e < 8; ++e) {
    const double x = e - 3.5;
    // cell 1 tracks cell 0 exactly at stage 2; cell 2 is noise-free constant
    t.values.push_back({0.0, 0.0, 0.0, x, x, (e % 2) ? 0.8 : -0.8});
    t.observed.push_back({0, 0, 0, 1, 1, 1});
  }
  const RegulatoryModel m = pearson_network_imputed(t);
  CHECK(m.source(0, 1) == 0);  // perfectly correlated source selected
  CHECK(m.source(0, 0) == 1);
  // alternating cell 2 is uncorrelated with the ramp: not regulated
  CHECK(m.source(0, 2) == RegulatoryModel::kNotRegulated);
}

TEST_CASE("pearson on raw observations pairs cohorts by person order") {
  ExpressionDataset ds = two_cohort_dataset();
  // single cell: only the self-lag correlation exists; cohorts {1,3}, {2,4}
  // correlate perfectly, and the self pair cannot become a source
  const RegulatoryModel m = pearson_network_observed(ds);
  CHECK(m.source(0, 0) == RegulatoryModel::kNotRegulated);
}

TEST_CASE("pearson network is invariant to person order after imputation") {
  Dims dims;
  dims.stages = 3;
  dims.genes = 2;
  dims.regions = 2;
  dims.persons_per_stage = {4, 4, 4};
  PriorConfig prior = PriorConfig::defaults(dims);
  Rng rng(11);
  const GlobalParams params = generate_global_params(rng, dims, prior);
  const RegulatoryModel truth = generate_network(rng, dims, 0.4);
  const RegulationCoefficients coeffs = generate_coefficients(rng, truth, prior);
  ExpressionDataset ds = simulate_dataset(truth, coeffs, params, dims, rng);

  const RegulatoryModel m1 = pearson_network_imputed(impute_mean(ds));
  ExpressionDataset shuffled = ds;
  std::swap(shuffled.persons[0], shuffled.persons[7]);
  std::swap(shuffled.persons[2], shuffled.persons[10]);
  shuffled.finalize();
  const RegulatoryModel m2 = pearson_network_imputed(impute_mean(shuffled));
  CHECK(m1 == m2);
}
