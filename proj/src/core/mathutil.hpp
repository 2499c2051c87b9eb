#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ogtt {

double mean(std::span<const double> x);

// Unbiased sample variance (divides by n-1); requires n >= 2.
double sample_variance(std::span<const double> x);

// Composite Simpson over a uniform grid of an odd number of points.
double simpson_uniform(std::span<const double> y, double h);

double normal_cdf(double x);

// Inverse standard normal CDF, |error| ~ machine epsilon after refinement.
double normal_quantile(double p);

// Linear-interpolation quantile of a sample (copies and sorts); q in [0,1].
double sample_quantile(std::span<const double> x, double q);

// Anderson-Darling A^2 against a fully specified N(0,1).
// 1% critical value for this case is 3.857.
double anderson_darling_normal(std::span<const double> z);

}  // namespace ogtt
