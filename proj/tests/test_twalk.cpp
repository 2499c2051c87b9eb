#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "core/twalk.hpp"
#include "support/conjugate_toy.hpp"

using namespace ogtt;

namespace {

// Thin a chain: row burn + (s+1)*stride for s = 0,1,...
std::vector<std::vector<double>> thin(
    const std::vector<std::vector<double>>& chain, int burn, int stride) {
  std::vector<std::vector<double>> out;
  for (size_t i = burn + stride; i < chain.size();
       i += static_cast<size_t>(stride))
    out.push_back(chain[i]);
  return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows,
                           size_t j) {
  std::vector<double> c;
  c.reserve(rows.size());
  for (const auto& r : rows) c.push_back(r[j]);
  return c;
}

TwalkTarget gaussian2d(double mx, double my, double vx, double vy) {
  return TwalkTarget{
      [=](std::span<const double> v) {
        const double dx = v[0] - mx, dy = v[1] - my;
        return -0.5 * (dx * dx / vx + dy * dy / vy);
      },
      [](std::span<const double>) { return true; }};
}

}  // namespace

TEST_SUITE("twalk") {

TEST_CASE("2-D Gaussian target: marginal moments within 3 MC SE") {
  const double mx = 1.0, my = -2.0, vx = 4.0, vy = 0.25;
  const TwalkTarget target = gaussian2d(mx, my, vx, vy);
  RngStream rng(77);
  const TwalkResult res =
      twalk(target, {0.0, 0.0}, {0.1, 0.1}, 60000, rng);
  CHECK(res.acceptance_rate > 0.1);
  CHECK(res.acceptance_rate < 0.8);

  // Stride 25 leaves the draws near-independent, so sd/sqrt(n) is an
  // honest MC standard error.
  const auto draws = thin(res.chain, 500, 25);
  const auto xs = column(draws, 0);
  const auto ys = column(draws, 1);
  const double n = static_cast<double>(xs.size());
  REQUIRE(xs.size() > 2000);

  CHECK(std::abs(mean(xs) - mx) < 3.0 * std::sqrt(vx / n));
  CHECK(std::abs(mean(ys) - my) < 3.0 * std::sqrt(vy / n));
  // SE of a sample variance of a normal is var * sqrt(2/(n-1)).
  CHECK(std::abs(sample_variance(xs) - vx) <
        3.0 * vx * std::sqrt(2.0 / (n - 1.0)));
  CHECK(std::abs(sample_variance(ys) - vy) <
        3.0 * vy * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("1-D truncated normal matches the closed-form moments") {
  // N(100, 10^2) restricted to [85, 120].
  const double mu = 100.0, sd = 10.0, lo = 85.0, hi = 120.0;
  const TwalkTarget target{
      [=](std::span<const double> v) {
        const double z = (v[0] - mu) / sd;
        return -0.5 * z * z;
      },
      [=](std::span<const double> v) { return v[0] >= lo && v[0] <= hi; }};
  RngStream rng(31);
  const TwalkResult res = twalk(target, {95.0}, {95.3}, 45000, rng);
  const auto xs = column(thin(res.chain, 500, 15), 0);
  const double n = static_cast<double>(xs.size());

  const toy::TruncatedNormal tn = toy::truncated_normal_moments(mu, sd, lo, hi);
  CHECK(std::abs(mean(xs) - tn.mean) < 3.0 * std::sqrt(tn.var / n));
  CHECK(std::abs(sample_variance(xs) - tn.var) <
        4.0 * tn.var * std::sqrt(2.0 / (n - 1.0)));
  for (double x : xs) {
    REQUIRE(x >= lo);
    REQUIRE(x <= hi);
  }
}

TEST_CASE("1-D gamma target on the positive half-line") {
  // Gamma(2, 1): mean 2, variance 2.
  const TwalkTarget target{
      [](std::span<const double> v) { return std::log(v[0]) - v[0]; },
      [](std::span<const double> v) { return v[0] > 0.0; }};
  RngStream rng(5150);
  const TwalkResult res = twalk(target, {2.0}, {2.1}, 45000, rng);
  const auto xs = column(thin(res.chain, 500, 15), 0);
  const double n = static_cast<double>(xs.size());
  CHECK(std::abs(mean(xs) - 2.0) < 3.0 * std::sqrt(2.0 / n));
  // Gamma(2,1) has variance 2 and fourth central moment 33, so
  // var(sample var) ~ (mu4 - var^2) / n = 29 / n.
  CHECK(std::abs(sample_variance(xs) - 2.0) < 3.0 * std::sqrt(29.0 / n));
}

TEST_CASE("same seed reproduces the chain bitwise; another seed differs") {
  const TwalkTarget target = gaussian2d(0.0, 0.0, 1.0, 1.0);
  RngStream a(9), b(9), c(10);
  const TwalkResult ra = twalk(target, {0.5, 0.5}, {0.6, 0.4}, 500, a);
  const TwalkResult rb = twalk(target, {0.5, 0.5}, {0.6, 0.4}, 500, b);
  const TwalkResult rc = twalk(target, {0.5, 0.5}, {0.6, 0.4}, 500, c);
  REQUIRE(ra.chain.size() == rb.chain.size());
  bool same = true, same_c = true;
  for (size_t i = 0; i < ra.chain.size(); ++i) {
    if (ra.chain[i] != rb.chain[i]) same = false;
    if (ra.chain[i] != rc.chain[i]) same_c = false;
  }
  CHECK(same);
  CHECK_FALSE(same_c);
  CHECK(ra.acceptance_rate == rb.acceptance_rate);
}

TEST_CASE("chain records the first point every iteration, row 0 the start") {
  const TwalkTarget target = gaussian2d(0.0, 0.0, 1.0, 1.0);
  RngStream rng(4);
  const TwalkResult res = twalk(target, {0.25, -0.5}, {0.3, -0.45}, 120, rng);
  REQUIRE(res.chain.size() == 121);
  CHECK(res.chain[0][0] == 0.25);
  CHECK(res.chain[0][1] == -0.5);
  CHECK(res.log_density.size() == res.chain.size());
}

TEST_CASE("a throwing log density is a rejection, counted") {
  // Standard normal that refuses to evaluate beyond |x| = 2: the chain
  // must keep running and must stay where evaluation succeeded.
  const TwalkTarget target{
      [](std::span<const double> v) {
        if (std::abs(v[0]) > 2.0) throw std::runtime_error("no");
        return -0.5 * v[0] * v[0];
      },
      [](std::span<const double>) { return true; }};
  RngStream rng(21);
  const TwalkResult res = twalk(target, {0.0}, {0.2}, 30000, rng);
  CHECK(res.failed_evals > 0);
  CHECK(res.acceptance_rate > 0.0);
  for (const auto& row : res.chain) REQUIRE(std::abs(row[0]) <= 2.0);

  const auto xs = column(thin(res.chain, 500, 15), 0);
  const toy::TruncatedNormal tn =
      toy::truncated_normal_moments(0.0, 1.0, -2.0, 2.0);
  CHECK(std::abs(mean(xs) - tn.mean) <
        4.0 * std::sqrt(tn.var / static_cast<double>(xs.size())));
}

TEST_CASE("unusable starting points are rejected up front") {
  const TwalkTarget target = gaussian2d(0.0, 0.0, 1.0, 1.0);
  RngStream rng(3);
  // Dimension mismatch.
  CHECK_THROWS_AS(twalk(target, {0.0, 0.0}, {0.1}, 10, rng), SamplerError);
  // Equal in one coordinate.
  CHECK_THROWS_AS(twalk(target, {0.0, 0.0}, {0.0, 0.1}, 10, rng),
                  SamplerError);
  // Outside the support.
  const TwalkTarget pos{
      [](std::span<const double> v) { return -v[0]; },
      [](std::span<const double> v) { return v[0] > 0.0; }};
  CHECK_THROWS_AS(twalk(pos, {-1.0}, {1.0}, 10, rng), SamplerError);
  // No iterations requested.
  CHECK_THROWS_AS(twalk(target, {0.0, 0.0}, {0.1, 0.1}, 0, rng),
                  SamplerError);
  // Start with a non-finite density.
  const TwalkTarget hole{
      [](std::span<const double>) {
        return -std::numeric_limits<double>::infinity();
      },
      [](std::span<const double>) { return true; }};
  CHECK_THROWS_AS(twalk(hole, {0.0}, {0.1}, 10, rng), SamplerError);
}

TEST_CASE("companion start nudges every coordinate and respects the support") {
  const TwalkTarget box{
      [](std::span<const double>) { return 0.0; },
      [](std::span<const double> v) {
        return v[0] >= 0.0 && v[0] <= 1.0 && v[1] >= -5.0 && v[1] <= 5.0;
      }};
  const std::vector<double> x{1.0, 0.0};  // at the upper edge in coord 0
  const std::vector<double> xp = twalk_companion(box, x);
  REQUIRE(xp.size() == 2);
  // Relative 1e-3 nudge, flipped inward at the boundary.
  CHECK(xp[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-9));
  // Zero coordinate gets an absolute nudge.
  CHECK(std::abs(xp[1]) == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(box.in_support(xp));
  for (size_t j = 0; j < x.size(); ++j) REQUIRE(xp[j] != x[j]);
}

TEST_CASE("all proposals rejected leaves acceptance at zero") {
  // Support is only a pair of isolated points, so every proposal misses it.
  const std::vector<double> a{1.0}, b{2.0};
  const TwalkTarget isolate{
      [](std::span<const double>) { return 0.0; },
      [&](std::span<const double> v) { return v[0] == 1.0 || v[0] == 2.0; }};
  RngStream rng(8);
  const TwalkResult res = twalk(isolate, a, b, 200, rng);
  CHECK(res.acceptance_rate == 0.0);
  for (const auto& row : res.chain) REQUIRE(row[0] == 1.0);
}

}  // TEST_SUITE
