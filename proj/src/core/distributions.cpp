#include "core/distributions.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ogtt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma_pdf(double x, double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0))
    throw InputError("log_gamma_pdf: shape and scale must be positive");
  if (!(x > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
         shape * std::log(scale);
}

double log_normal_pdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) throw InputError("log_normal_pdf: sd must be positive");
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

bool prior_in_support(const PatientParams& p) {
  return std::isfinite(p.theta0) && p.theta0 > 0.0 &&
         std::isfinite(p.theta1) && p.theta1 > 0.0 &&
         std::isfinite(p.theta2) && p.theta2 > kTheta2Min &&
         std::isfinite(p.g0) && p.g0 >= kG0Min && p.g0 <= kG0Max;
}

double log_prior(const PatientParams& p) {
  if (!prior_in_support(p)) return kNegInf;
  return log_gamma_pdf(p.theta0, 2.0, 1.0) + log_gamma_pdf(p.theta1, 2.0, 1.0) +
         log_gamma_pdf(p.theta2, 10.0, 0.05) + log_normal_pdf(p.g0, 80.0, 10.0);
}

PatientParams sample_prior(RngStream& rng) {
  PatientParams p;
  p.theta0 = rng.gamma(2.0, 1.0);
  p.theta1 = rng.gamma(2.0, 1.0);
  do {
    p.theta2 = rng.gamma(10.0, 0.05);
  } while (p.theta2 <= kTheta2Min);
  do {
    p.g0 = 80.0 + 10.0 * rng.normal();
  } while (p.g0 < kG0Min || p.g0 > kG0Max);
  return p;
}

PatientParams prior_mean_start() { return PatientParams{2.0, 2.0, 0.5, 80.0}; }

}  // namespace ogtt
