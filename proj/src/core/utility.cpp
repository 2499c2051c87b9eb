#include "core/utility.hpp"

#include "core/errors.hpp"
#include "core/mathutil.hpp"

namespace ogtt {

std::vector<double> curve_on_utility_grid(const PatientParams& p,
                                          const ModelConstants& mc) {
  const Trajectory tr = solve_forward(p, mc, kUtilityHorizonHours);
  std::vector<double> g(kCurveGridPoints);
  const double dt = kUtilityHorizonHours / (kCurveGridPoints - 1);
  for (int i = 0; i < kCurveGridPoints; ++i)
    g[i] = tr.glucose(static_cast<double>(i) * dt);
  return g;
}

double ise_between_curves(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != static_cast<size_t>(kCurveGridPoints) || a.size() != b.size())
    throw InputError("ise_between_curves: expected utility-grid curves");
  std::vector<double> sq(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq[i] = d * d;
  }
  const double dt = kUtilityHorizonHours / (kCurveGridPoints - 1);
  return simpson_uniform(sq, dt);
}

double integrated_squared_error(const PatientParams& true_params,
                                const PatientParams& fitted_params,
                                const ModelConstants& mc) {
  const auto ca = curve_on_utility_grid(true_params, mc);
  const auto cb = curve_on_utility_grid(fitted_params, mc);
  return ise_between_curves(ca, cb);
}

double estimate_u(const PatientParams& true_params,
                  std::span<const PatientParams> posterior_draws,
                  const ModelConstants& mc, double* inner_se2) {
  if (posterior_draws.empty())
    throw InputError("estimate_u: posterior sample is empty");
  const auto truth_curve = curve_on_utility_grid(true_params, mc);
  std::vector<double> losses(posterior_draws.size());
  for (size_t j = 0; j < posterior_draws.size(); ++j) {
    const auto cj = curve_on_utility_grid(posterior_draws[j], mc);
    losses[j] = ise_between_curves(truth_curve, cj);
  }
  if (inner_se2 != nullptr) {
    *inner_se2 = losses.size() > 1
                     ? sample_variance(losses) /
                           static_cast<double>(losses.size())
                     : 0.0;
  }
  return -mean(losses);
}

}  // namespace ogtt
