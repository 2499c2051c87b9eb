#pragma once

#include <span>
#include <vector>

#include "core/model.hpp"

namespace ogtt {

// Utility = negative integrated squared error of the glucose curve over a
// 3-hour horizon, even though measurements live in [0,2] h: a design is
// judged on the quality of the whole extrapolated curve.
inline constexpr double kUtilityHorizonHours = 3.0;
// Composite Simpson on a fixed 1-minute grid (odd point count).
inline constexpr int kCurveGridPoints = 181;

// Glucose curve sampled on the 1-minute utility grid.
std::vector<double> curve_on_utility_grid(const PatientParams& p,
                                          const ModelConstants& mc);

// Simpson integral of (a-b)^2 over the utility grid.
double ise_between_curves(std::span<const double> a, std::span<const double> b);

// ISE between the curves of two parameter sets, (mg/dl)^2 * hours.
double integrated_squared_error(const PatientParams& true_params,
                                const PatientParams& fitted_params,
                                const ModelConstants& mc);

// u_hat = -(1/T2) * sum_j ISE(truth, draw_j): the inner average of the
// nested estimator.  inner_se2 (optional) receives sample_var(losses)/T2.
double estimate_u(const PatientParams& true_params,
                  std::span<const PatientParams> posterior_draws,
                  const ModelConstants& mc, double* inner_se2 = nullptr);

}  // namespace ogtt
