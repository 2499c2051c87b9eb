#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "core/rng.hpp"

using namespace ogtt;

namespace {

// Quadrature oracle: Simpson integral of f over [lo, hi] on n+1 points
// (n even), written without the library's helpers.
template <typename F>
double simpson_oracle(F f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("gamma log pdf matches hand values") {
  // Gamma(2,1) density x e^{-x}: at x=1 the log is exactly -1.
  CHECK(std::abs(log_gamma_pdf(1.0, 2.0, 1.0) - (-1.0)) < 1e-12);
  // Ratio at 2 vs 1: log(2 e^{-2}) - log(e^{-1}) = log 2 - 1.
  const double ratio =
      log_gamma_pdf(2.0, 2.0, 1.0) - log_gamma_pdf(1.0, 2.0, 1.0);
  CHECK(std::abs(ratio - (std::log(2.0) - 1.0)) < 1e-12);
  // General case against the textbook formula.
  const double shape = 10.0, scale = 0.05, x = 0.37;
  const double expected = (shape - 1.0) * std::log(x) - x / scale -
                          shape * std::log(scale) - std::lgamma(shape);
  CHECK(std::abs(log_gamma_pdf(x, shape, scale) - expected) < 1e-12);

  CHECK(std::isinf(log_gamma_pdf(0.0, 2.0, 1.0)));
  CHECK(std::isinf(log_gamma_pdf(-1.0, 2.0, 1.0)));
  CHECK_THROWS_AS(log_gamma_pdf(1.0, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(log_gamma_pdf(1.0, 2.0, -1.0), InputError);
}

TEST_CASE("normal log pdf matches hand values") {
  CHECK(std::abs(log_normal_pdf(80.0, 80.0, 10.0) -
                 (-std::log(10.0 * std::sqrt(2.0 * M_PI)))) < 1e-12);
  // Half a standard deviation out: density drops by exp(-1/8).
  const double ratio =
      log_normal_pdf(85.0, 80.0, 10.0) - log_normal_pdf(80.0, 80.0, 10.0);
  CHECK(std::abs(ratio - (-0.125)) < 1e-12);
  CHECK_THROWS_AS(log_normal_pdf(0.0, 0.0, 0.0), InputError);
}

TEST_CASE("pdfs are normalized (quadrature oracle)") {
  const double ig = simpson_oracle(
      [](double x) { return std::exp(log_gamma_pdf(x, 10.0, 0.05)); }, 1e-9,
      3.0, 60000);
  CHECK(std::abs(ig - 1.0) < 1e-6);

  const double in = simpson_oracle(
      [](double x) { return std::exp(log_normal_pdf(x, 80.0, 10.0)); }, 30.0,
      130.0, 20000);
  CHECK(std::abs(in - (normal_cdf(5.0) - normal_cdf(-5.0))) < 1e-9);
}

TEST_CASE("prior support boundaries") {
  const PatientParams ok{2.0, 2.0, 0.5, 80.0};
  CHECK(prior_in_support(ok));

  PatientParams p = ok;
  p.theta2 = kTheta2Min;  // boundary excluded: the truncation is strict
  CHECK_FALSE(prior_in_support(p));
  p.theta2 = kTheta2Min + 1e-9;
  CHECK(prior_in_support(p));

  p = ok;
  p.g0 = kG0Min;  // interval ends included
  CHECK(prior_in_support(p));
  p.g0 = kG0Max;
  CHECK(prior_in_support(p));
  p.g0 = kG0Min - 1e-9;
  CHECK_FALSE(prior_in_support(p));
  p.g0 = kG0Max + 1e-9;
  CHECK_FALSE(prior_in_support(p));

  p = ok;
  p.theta0 = 0.0;
  CHECK_FALSE(prior_in_support(p));
  p = ok;
  p.theta1 = -1.0;
  CHECK_FALSE(prior_in_support(p));
}

TEST_CASE("log prior is the sum of its factors inside the support") {
  const PatientParams p{1.3, 0.7, 0.45, 92.0};
  const double expected =
      log_gamma_pdf(p.theta0, 2.0, 1.0) + log_gamma_pdf(p.theta1, 2.0, 1.0) +
      log_gamma_pdf(p.theta2, 10.0, 0.05) + log_normal_pdf(p.g0, 80.0, 10.0);
  CHECK(std::abs(log_prior(p) - expected) < 1e-12);

  PatientParams out = p;
  out.theta2 = 0.1;
  CHECK(std::isinf(log_prior(out)));
  out = p;
  out.g0 = 500.0;
  CHECK(std::isinf(log_prior(out)));
}

TEST_CASE("prior sampling matches quadrature-oracle moments") {
  RngStream rng(2024);
  const int n = 200000;
  double s0 = 0, s0sq = 0, s1 = 0, s2 = 0, sg = 0;
  for (int i = 0; i < n; ++i) {
    const PatientParams p = sample_prior(rng);
    REQUIRE(prior_in_support(p));
    s0 += p.theta0;
    s0sq += p.theta0 * p.theta0;
    s1 += p.theta1;
    s2 += p.theta2;
    sg += p.g0;
  }
  const double m0 = s0 / n, m1 = s1 / n, m2 = s2 / n, mg = sg / n;
  const double v0 = s0sq / n - m0 * m0;

  // theta0, theta1 ~ Gamma(2,1): mean 2, variance 2; SE(mean) ~ sqrt(2/n).
  const double se_g21 = std::sqrt(2.0 / n);
  CHECK(std::abs(m0 - 2.0) < 3.0 * se_g21);
  CHECK(std::abs(m1 - 2.0) < 3.0 * se_g21);
  CHECK(std::abs(v0 - 2.0) < 0.06);

  // theta2: truncated Gamma(10, 1/20) mean from a quadrature oracle.
  auto pdf2 = [](double x) { return std::exp(log_gamma_pdf(x, 10.0, 0.05)); };
  const double mass = simpson_oracle(pdf2, kTheta2Min, 3.0, 60000);
  const double first = simpson_oracle(
      [&](double x) { return x * pdf2(x); }, kTheta2Min, 3.0, 60000);
  const double second = simpson_oracle(
      [&](double x) { return x * x * pdf2(x); }, kTheta2Min, 3.0, 60000);
  const double mean_trunc = first / mass;
  const double sd_trunc = std::sqrt(second / mass - mean_trunc * mean_trunc);
  CHECK(std::abs(m2 - mean_trunc) < 3.0 * sd_trunc / std::sqrt(1.0 * n));

  // g0: the [30,400] truncation of N(80,10) moves the mean by < 1e-5.
  CHECK(std::abs(mg - 80.0) < 3.0 * 10.0 / std::sqrt(1.0 * n) + 1e-4);
}

TEST_CASE("prior mean start") {
  const PatientParams s = prior_mean_start();
  CHECK(s.theta0 == 2.0);
  CHECK(s.theta1 == 2.0);
  CHECK(s.theta2 == 0.5);
  CHECK(s.g0 == 80.0);
  CHECK(prior_in_support(s));
}

}  // TEST_SUITE
