#pragma once

#include <cstddef>
#include <span>

namespace n1sleep::stats {

struct TestResult {
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p = 1.0;   // two-sided
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double mean_diff = 0.0;  // mean_b - mean_a
  // Both samples constant with different means: t is infinite, p is 0 and df falls
  // back to n_a + n_b - 2.
  bool degenerate_variance = false;
};

// Welch's unequal-variance t-test, t = (mean_b - mean_a) / sqrt(var_a/n_a + var_b/n_b)
// with n-1 sample variances. Throws InsufficientData when either sample has fewer than 2
// values. Two zero-variance samples yield t = 0, p = 1 when the means agree and a
// degenerate_variance result otherwise.
TestResult welch_t(std::span<const double> a, std::span<const double> b);

// Student t CDF via the incomplete beta function. Throws DomainError for df <= 0.
double student_t_cdf(double t, double df);

// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
// Throws DomainError outside x in [0,1], a > 0, b > 0.
double reg_inc_beta(double x, double a, double b);

// Bonferroni-adjusted p-value, min(1, p * comparisons).
double bonferroni(double p, std::size_t comparisons) noexcept;

}  // namespace n1sleep::stats
