#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace stagenet {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

double log_normal_pdf(double x, double mean, double variance);
double log_inv_gamma_pdf(double x, double shape, double scale);

// Density of X where (X - location)/scale is standard Student-t with `dof`
// degrees of freedom.
double log_student_t_pdf(double x, double dof, double location, double scale);

// Bivariate Student-t with symmetric 2x2 scale matrix [[s00,s01],[s01,s11]].
double log_bivariate_t_pdf(double x0, double x1, double dof, double loc0,
                           double loc1, double s00, double s01, double s11);

double log_sum_exp(std::span<const double> log_terms);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased, needs n >= 2

// Pearson correlation of paired samples; 0 when either side has zero
// variance or fewer than two pairs.
double pearson_correlation(std::span<const double> xs,
                           std::span<const double> ys);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double student_t_cdf(double t, double dof);
double chi_square_sf(double x, double dof);

// Two-sided Welch two-sample t-test p-value. Returns 1 when either sample
// has fewer than two points or both variances vanish.
double welch_t_test_pvalue(std::span<const double> xs,
                           std::span<const double> ys);

// Nodes/weights for composite 16-point Gauss-Legendre quadrature of
// exp(log_f) over [lo, hi] split into `panels` panels; returns the log of
// the integral. log_f may return -inf.
class GaussLegendre {
 public:
  static const GaussLegendre& rule16();
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  template <typename F>
  double log_integrate(F&& log_f, double lo, double hi, int panels) const {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(panels) * nodes_.size());
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * width;
      const double mid = a + 0.5 * width;
      const double half = 0.5 * width;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double x = mid + half * nodes_[i];
        terms.push_back(log_f(x) + std::log(weights_[i] * half));
      }
    }
    return log_sum_exp(terms);
  }

 private:
  GaussLegendre();
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace stagenet
