#pragma once

#include <span>

namespace trendflow {

double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance; 0 for fewer than two samples.
double sample_variance(std::span<const double> xs);
// Linear-interpolation quantile (R type 7) of an unsorted sample, q in [0, 1].
double quantile(std::span<const double> xs, double q);

// Two-sided p-value of a Student t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
};

// Unequal-variance two-sample t-test. Needs at least two samples per side.
// With zero variance on both sides p is 0 when the means differ and 1 otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_p_value = 1.0;  // two-sided, H0: slope = 0
    std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x. Needs >= 3 points and a
// non-constant x.
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace trendflow
