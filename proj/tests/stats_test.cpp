#include <doctest.h>

#include <cmath>

#include "stagenet/stats.hpp"

using namespace stagenet;

TEST_CASE("log densities against hand values") {
  CHECK(log_normal_pdf(0.0, 0.0, 1.0) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(log_normal_pdf(1.0, 3.0, 4.0) ==
        doctest::Approx(-0.5 * std::log(2 * M_PI * 4.0) - 0.5).epsilon(1e-14));
  // IG(2, 3) at x = 1.5: 2*ln3 - ln Gamma(2) - 3*ln1.5 - 2
  CHECK(log_inv_gamma_pdf(1.5, 2.0, 3.0) ==
        doctest::Approx(2.0 * std::log(3.0) - 3.0 * std::log(1.5) - 2.0)
            .epsilon(1e-14));
  // t_3 at 0 equals Gamma(2)/(Gamma(1.5) sqrt(3 pi))
  CHECK(log_student_t_pdf(0.0, 3.0, 0.0, 1.0) ==
        doctest::Approx(std::log(1.0 / (std::tgamma(1.5) * std::sqrt(3.0 * M_PI))))
            .epsilon(1e-12));
  // scale/location transform
  CHECK(log_student_t_pdf(2.0, 5.0, 2.0, 0.5) ==
        doctest::Approx(log_student_t_pdf(0.0, 5.0, 0.0, 1.0) - std::log(0.5)));
}

TEST_CASE("bivariate t integrates to one") {
  const double dof = 4.0;
  const double s00 = 1.3, s01 = 0.4, s11 = 0.8;
  double sum = 0.0;
  const int n = 400;
  const double lo = -30.0, hi = 30.0;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      double w = std::exp(
          log_bivariate_t_pdf(lo + i * h, lo + j * h, dof, 0.2, -0.1, s00, s01, s11));
      if (i == 0 || i == n) w *= 0.5;
      if (j == 0 || j == n) w *= 0.5;
      sum += w * h * h;
    }
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("log_sum_exp") {
  const double terms[] = {std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(terms) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  const double huge[] = {1000.0, 1000.0};
  CHECK(log_sum_exp(huge) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("pearson correlation") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
  const std::vector<double> yn{-2, -4, -6, -8};
  CHECK(pearson_correlation(x, yn) == doctest::Approx(-1.0));
  const std::vector<double> c{5, 5, 5, 5};
  CHECK(pearson_correlation(x, c) == 0.0);  // zero variance
  // symmetry
  const std::vector<double> u{0.3, -1.2, 2.0, 0.9};
  CHECK(pearson_correlation(u, x) == doctest::Approx(pearson_correlation(x, u)));
}

TEST_CASE("incomplete beta and t distribution against reference values") {
  // scipy.special.betainc(2, 3, 0.4) = 0.5248
  CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-10));
  // scipy.stats.t.cdf(1.0, 5) = 0.8183912661754387
  CHECK(student_t_cdf(1.0, 5.0) ==
        doctest::Approx(0.8183912661754387).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(student_t_cdf(-1.0, 5.0) ==
        doctest::Approx(1.0 - 0.8183912661754387).epsilon(1e-12));
}

TEST_CASE("chi-square survival against reference values") {
  // scipy.stats.chi2.sf(3.0, 2) = exp(-1.5)
  CHECK(chi_square_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  // scipy.stats.chi2.sf(10, 4) = 0.040427681994512805
  CHECK(chi_square_sf(10.0, 4.0) ==
        doctest::Approx(0.040427681994512805).epsilon(1e-10));
}

TEST_CASE("welch test against reference values") {
  // scipy.stats.ttest_ind([1,2,3,4,5],[2,4,6,8,10], equal_var=False)
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 4, 6, 8, 10};
  CHECK(welch_t_test_pvalue(a, b) ==
        doctest::Approx(0.10753119493062718).epsilon(1e-8));
  CHECK(welch_t_test_pvalue(a, a) == doctest::Approx(1.0));
}

TEST_CASE("Gauss-Legendre log integration") {
  const auto& rule = GaussLegendre::rule16();
  // integral of exp(-x^2/2) over R is sqrt(2 pi)
  const double val =
      rule.log_integrate([](double x) { return -0.5 * x * x; }, -10.0, 10.0, 8);
  CHECK(val == doctest::Approx(0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
  // nodes are symmetric and weights positive
  for (double w : rule.weights()) CHECK(w > 0.0);
}
