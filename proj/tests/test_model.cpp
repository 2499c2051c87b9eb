#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/model.hpp"
#include "support/oracles.hpp"

using namespace ogtt;

namespace {

// 1-minute grid over [0, 3] h; 181 points keeps Simpson happy.
std::vector<double> minute_grid() {
  std::vector<double> ts(181);
  for (int i = 0; i < 181; ++i) ts[i] = static_cast<double>(i) / 60.0;
  return ts;
}

// RK4 step that divides the minute grid exactly (about 1e-4 h).
constexpr double kRk4Step = 1.0 / (60.0 * 167.0);

}  // namespace

TEST_SUITE("model") {

TEST_CASE("no ingestion and no regulation leaves glucose flat at g0") {
  PatientParams p{0.0, 0.0, 0.5, 113.0};
  ModelConstants mc;
  mc.v0 = 0.0;
  const Trajectory tr = solve_forward(p, mc, 3.0);
  for (double t : {0.0, 0.5, 1.7, 3.0}) {
    const GlucoseState s = tr.at(t);
    CHECK(s.g == doctest::Approx(113.0).epsilon(1e-12));
    CHECK(std::abs(s.i) < 1e-9);
    CHECK(std::abs(s.l) < 1e-9);
    CHECK(std::abs(s.d) < 1e-9);
    CHECK(std::abs(s.v) < 1e-9);
  }
}

TEST_CASE("V matches its closed form for every reference patient") {
  const ModelConstants mc;
  for (const auto& p : {oracle::healthy(), oracle::diabetic(),
                        oracle::oscillating(), oracle::extreme()}) {
    const Trajectory tr = solve_forward(p, mc, 3.0);
    for (double t : minute_grid()) {
      const double vex = oracle::v_closed(t, mc);
      CHECK(std::abs(tr.at(t).v - vex) <= 1e-6 * std::max(vex, 1.0));
    }
  }
}

TEST_CASE("D matches its two-exponential closed form") {
  const ModelConstants mc;
  for (const auto& p : {oracle::healthy(), oracle::diabetic()}) {
    const Trajectory tr = solve_forward(p, mc, 3.0);
    for (double t : minute_grid()) {
      const double dex = oracle::d_closed(t, p, mc);
      CHECK(std::abs(tr.at(t).d - dex) <= 1e-6 * std::max(dex, 1.0));
    }
  }
}

TEST_CASE("adaptive glucose agrees with fine fixed-step RK4 to 1e-5") {
  const ModelConstants mc;
  const auto ts = minute_grid();
  for (const auto& p : {oracle::healthy(), oracle::diabetic(),
                        oracle::oscillating(), oracle::extreme()}) {
    const auto ref = oracle::rk4_at_times(p, mc, ts, kRk4Step);
    const Trajectory tr = solve_forward(p, mc, 3.0);
    for (size_t i = 0; i < ts.size(); ++i) {
      const double g_ref = ref[i][0];
      CHECK(std::abs(tr.glucose(ts[i]) - g_ref) <= 1e-5 * std::abs(g_ref));
    }
  }
}

TEST_CASE("mass balance: load ends up flowing through the gut") {
  // d(V+D)/dt = -D/theta2, so v0 = V(T) + D(T) + integral of D/theta2.
  const ModelConstants mc;
  const PatientParams p = oracle::healthy();
  const Trajectory tr = solve_forward(p, mc, 3.0);
  const auto ts = minute_grid();
  std::vector<double> flux(ts.size());
  for (size_t i = 0; i < ts.size(); ++i)
    flux[i] = tr.at(ts[i]).d / p.theta2;
  const double absorbed =
      [&] {
        double h = ts[1] - ts[0];
        double odd = 0, even = 0;
        for (size_t i = 1; i + 1 < flux.size(); i += 2) odd += flux[i];
        for (size_t i = 2; i + 1 < flux.size(); i += 2) even += flux[i];
        return h / 3.0 * (flux.front() + 4 * odd + 2 * even + flux.back());
      }();
  const GlucoseState end = tr.at(3.0);
  CHECK(std::abs(end.v + end.d + absorbed - mc.v0) < 1e-3 * mc.v0);
}

TEST_CASE("V and D stay nonnegative and V is nonincreasing at the knots") {
  const ModelConstants mc;
  const Trajectory tr = solve_forward(oracle::oscillating(), mc, 3.0);
  double prev_v = mc.v0 + 1e-12;
  for (const GlucoseState& s : tr.states()) {
    CHECK(s.v >= -1e-9);
    CHECK(s.d >= -1e-9);
    CHECK(s.v <= prev_v + 1e-9);
    prev_v = s.v;
  }
  CHECK(tr.times().front() == 0.0);
  CHECK(tr.times().back() == doctest::Approx(3.0));
}

TEST_CASE("dense output agrees with stored knot states") {
  const ModelConstants mc;
  const Trajectory tr = solve_forward(oracle::healthy(), mc, 2.0);
  const auto& ts = tr.times();
  const auto& ys = tr.states();
  for (size_t i = 0; i < ts.size(); i += 3) {
    const GlucoseState s = tr.at(ts[i]);
    CHECK(s.g == doctest::Approx(ys[i].g).epsilon(1e-10));
    CHECK(s.v == doctest::Approx(ys[i].v).epsilon(1e-8));
  }
}

TEST_CASE("glucose_at_times matches the dense trajectory and handles order") {
  const ModelConstants mc;
  const PatientParams p = oracle::diabetic();
  const std::vector<double> times{2.0, 0.0, 0.75, 1.25, 0.75};
  const auto g = glucose_at_times(p, mc, times);
  const Trajectory tr = solve_forward(p, mc, 2.0);
  for (size_t i = 0; i < times.size(); ++i)
    CHECK(g[i] == doctest::Approx(tr.glucose(times[i])).epsilon(1e-10));
  CHECK(g[1] == doctest::Approx(p.g0));
  CHECK(g[2] == doctest::Approx(g[4]));

  std::vector<double> out(2);
  const std::vector<double> unsorted{1.0, 0.5};
  CHECK_THROWS_AS(glucose_at_sorted_times(p, mc, unsorted, out), InputError);
}

TEST_CASE("repeat solves are bit-identical") {
  const ModelConstants mc;
  const Trajectory a = solve_forward(oracle::oscillating(), mc, 3.0);
  const Trajectory b = solve_forward(oracle::oscillating(), mc, 3.0);
  REQUIRE(a.times().size() == b.times().size());
  for (size_t i = 0; i < a.times().size(); ++i) {
    CHECK(a.times()[i] == b.times()[i]);
    CHECK(a.states()[i].g == b.states()[i].g);
  }
}

TEST_CASE("domain errors are rejected up front") {
  const ModelConstants mc;
  PatientParams p = oracle::healthy();
  p.theta2 = 0.0;
  CHECK_THROWS_AS(solve_forward(p, mc, 3.0), InputError);
  p = oracle::healthy();
  p.theta0 = -1.0;
  CHECK_THROWS_AS(solve_forward(p, mc, 3.0), InputError);
  ModelConstants bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(solve_forward(oracle::healthy(), bad, 3.0), InputError);
  CHECK_THROWS_AS(solve_forward(oracle::healthy(), mc, 0.0), InputError);
  const Trajectory tr = solve_forward(oracle::healthy(), mc, 1.0);
  CHECK_THROWS_AS(tr.at(1.5), InputError);
  CHECK_THROWS_AS(tr.at(-0.1), InputError);
}

TEST_CASE("pathological stiffness surfaces as IntegrationError") {
  const ModelConstants mc;
  PatientParams p = oracle::healthy();
  p.theta0 = 1e300;  // forces overflow, then step-size underflow
  CHECK_THROWS_AS(solve_forward(p, mc, 3.0), IntegrationError);
}

}  // TEST_SUITE
