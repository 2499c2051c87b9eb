#pragma once

#include "core/model.hpp"
#include "core/rng.hpp"

namespace ogtt {

// Patient-parameter prior:
//   theta0, theta1 ~ Gamma(shape 2, scale 1)
//   theta2         ~ Gamma(shape 10, scale 1/20), truncated to theta2 > 0.16
//   g0             ~ Normal(80, sd 10), truncated to [30, 400]
// The truncations keep the stomach-emptying time away from the stiff limit
// and fasting glucose inside a physiological range.

inline constexpr double kTheta2Min = 0.16;
inline constexpr double kG0Min = 30.0;
inline constexpr double kG0Max = 400.0;

// Measurement noise (mg/dl), fixed across the whole study.
inline constexpr double kNoiseSd = 5.0;

// Normalized log densities of the untruncated building blocks.
double log_gamma_pdf(double x, double shape, double scale);
double log_normal_pdf(double x, double mean, double sd);

bool prior_in_support(const PatientParams& p);

// Log prior density up to the (constant) truncation normalizers;
// -infinity outside the support.
double log_prior(const PatientParams& p);

// Draw from the prior; truncations by rejection.
PatientParams sample_prior(RngStream& rng);

// Untruncated prior means, the standard chain start for observed data.
PatientParams prior_mean_start();

}  // namespace ogtt
