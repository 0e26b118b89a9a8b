#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stagenet/rng.hpp"
#include "stagenet/stats.hpp"

using namespace stagenet;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal(0, 1) == b.normal(0, 1));
    CHECK(a.gamma(2.0, 1.5) == b.gamma(2.0, 1.5));
  }
  CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(1, 1));
  CHECK(Rng::derive_seed(1, 0) == Rng::derive_seed(1, 0));
}

TEST_CASE("sampler moments") {
  Rng rng(7);
  const int n = 200000;
  std::vector<double> xs(n);

  for (auto& x : xs) x = rng.normal(2.0, 3.0);
  CHECK(mean(xs) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(variance(xs) == doctest::Approx(9.0).epsilon(0.03));

  for (auto& x : xs) x = rng.gamma(3.0, 2.0);  // mean 6, var 12
  CHECK(mean(xs) == doctest::Approx(6.0).epsilon(0.02));
  CHECK(variance(xs) == doctest::Approx(12.0).epsilon(0.05));

  for (auto& x : xs) x = rng.gamma(0.5, 1.0);  // shape < 1 branch
  CHECK(mean(xs) == doctest::Approx(0.5).epsilon(0.03));

  for (auto& x : xs) x = rng.chi_square(4.0);
  CHECK(mean(xs) == doctest::Approx(4.0).epsilon(0.02));

  // IG(3, 2) has mean 1, variance 1
  for (auto& x : xs) x = rng.inv_gamma(3.0, 2.0);
  CHECK(mean(xs) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("categorical respects weights") {
  Rng rng(11);
  const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
  std::vector<long> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[rng.categorical(w)]++;
  CHECK(counts[1] == 0);
  CHECK(static_cast<double>(counts[2]) / n == doctest::Approx(0.6).epsilon(0.03));
  const std::vector<double> lw{std::log(0.25), std::log(0.75)};
  long one = 0;
  for (int i = 0; i < n; ++i) one += rng.categorical_log(lw);
  CHECK(static_cast<double>(one) / n == doctest::Approx(0.75).epsilon(0.02));
  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(rng.categorical(zero), std::invalid_argument);
}

TEST_CASE("uniform_int covers its range evenly") {
  Rng rng(3);
  std::vector<long> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[rng.uniform_int(5)]++;
  for (long c : counts) {
    CHECK(static_cast<double>(c) / 50000 == doctest::Approx(0.2).epsilon(0.05));
  }
}
