#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "core/compare.hpp"
#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "support/conjugate_toy.hpp"

using namespace ogtt;

namespace {

// An estimate with prescribed statistics; compare() trusts the stored
// moments, so this drives the test arithmetic exactly.
DesignUtilityEstimate handmade(const Design& d, double mean_u, double var_u,
                               int n = 30) {
  DesignUtilityEstimate e;
  e.design = d;
  e.scope = estimate_scope(d, "A");
  e.t2 = 1;
  e.samples.resize(n);
  e.mean = mean_u;
  e.variance_of_mean = var_u;
  return e;
}

bool prefix_identical(const DesignUtilityEstimate& a,
                      const DesignUtilityEstimate& b, int n) {
  for (int i = 0; i < n; ++i) {
    const UtilitySample &x = a.samples[i], &y = b.samples[i];
    if (x.seed != y.seed || x.u_hat != y.u_hat || x.salt != y.salt ||
        x.excluded != y.excluded)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("compare") {

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::kABetter) == "A-better");
  CHECK(verdict_name(Verdict::kBBetter) == "B-better");
  CHECK(verdict_name(Verdict::kInconclusive) == "inconclusive");
}

TEST_CASE("z statistic and thresholds by hand") {
  const Design da = Design::of({0, 60});
  const Design db = Design::of({0, 90});
  const DesignUtilityEstimate a = handmade(da, -10.0, 1.0);
  const DesignUtilityEstimate b = handmade(db, -13.0, 1.0);

  // z = ((-10) - (-13)) / sqrt(1 + 1), identical arithmetic to the library.
  const double z_expected = 3.0 / std::sqrt(2.0);

  const ComparisonResult r = compare(a, b, 0.05);
  CHECK(r.z == z_expected);
  CHECK(r.verdict == Verdict::kABetter);  // 2.121 > 1.960
  CHECK(r.design_a == da);
  CHECK(r.design_b == db);
  CHECK(r.t1_a == 30);
  CHECK(r.t1_b == 30);
  CHECK(r.u_a == -10.0);
  CHECK(r.u_b == -13.0);
  CHECK(r.var_a == 1.0);
  CHECK(r.var_b == 1.0);
  CHECK(r.alpha == 0.05);

  // Swapping the arms flips the sign and the verdict.
  const ComparisonResult rs = compare(b, a, 0.05);
  CHECK(rs.z == -z_expected);
  CHECK(rs.verdict == Verdict::kBBetter);

  // A stricter level turns the same evidence inconclusive: 2.121 < 2.576.
  CHECK(compare(a, b, 0.01).verdict == Verdict::kInconclusive);
}

TEST_CASE("compare rejects bad levels and small samples") {
  const DesignUtilityEstimate a = handmade(Design::of({0, 60}), -1.0, 1.0);
  const DesignUtilityEstimate b = handmade(Design::of({0, 90}), -2.0, 1.0);
  CHECK_THROWS_AS(compare(a, b, 0.0), InputError);
  CHECK_THROWS_AS(compare(a, b, 1.0), InputError);
  CHECK_THROWS_AS(compare(a, b, -0.3), InputError);

  DesignUtilityEstimate small = handmade(Design::of({0, 60}), -1.0, 1.0, 29);
  CHECK_THROWS_AS(compare(small, b, 0.05), InputError);
  // 30 attempted but one excluded is still below the floor.
  DesignUtilityEstimate gap = handmade(Design::of({0, 60}), -1.0, 1.0, 30);
  gap.samples[7].excluded = true;
  CHECK_THROWS_AS(compare(gap, b, 0.05), InputError);
}

TEST_CASE("degenerate zero-variance comparisons") {
  const Design da = Design::of({0, 60});
  const Design db = Design::of({0, 90});
  const ComparisonResult tie =
      compare(handmade(da, -5.0, 0.0), handmade(db, -5.0, 0.0), 0.05);
  CHECK(tie.z == 0.0);
  CHECK(tie.verdict == Verdict::kInconclusive);

  const ComparisonResult ahead =
      compare(handmade(da, -4.0, 0.0), handmade(db, -5.0, 0.0), 0.05);
  CHECK(std::isinf(ahead.z));
  CHECK(ahead.z > 0.0);
  CHECK(ahead.verdict == Verdict::kABetter);

  const ComparisonResult behind =
      compare(handmade(da, -6.0, 0.0), handmade(db, -5.0, 0.0), 0.05);
  CHECK(behind.z < 0.0);
  CHECK(behind.verdict == Verdict::kBBetter);
}

TEST_CASE("planned looks mirror the doubling schedule") {
  CHECK(planned_looks(GrowthSchedule{}) == 3);  // 150, 300, 600
  CHECK(planned_looks(GrowthSchedule{150, 150, 2, 0.05}) == 1);
  CHECK(planned_looks(GrowthSchedule{100, 1000, 3, 0.05}) == 4);
  CHECK(planned_looks(GrowthSchedule{100, 150, 2, 0.05}) == 2);  // capped
  CHECK_THROWS_AS(planned_looks(GrowthSchedule{1, 600, 2, 0.05}), InputError);
  CHECK_THROWS_AS(planned_looks(GrowthSchedule{600, 150, 2, 0.05}),
                  InputError);
  CHECK_THROWS_AS(planned_looks(GrowthSchedule{150, 600, 1, 0.05}),
                  InputError);
}

TEST_CASE("growth stops at the first look when the gap is wide") {
  const Design da = Design::of({0, 45, 90});
  const Design db = Design::of({0, 120});
  const toy::InjectedUtility problem(
      [&](const Design& d) { return d == da ? -5.0 : -10.0; }, 0.5);

  const GrowthComparison g = compare_with_growth(
      problem, da, db, /*t2=*/1, /*root_seed=*/21, GrowthSchedule{});
  CHECK(g.result.verdict == Verdict::kABetter);
  CHECK(g.looks.size() == 1);
  CHECK(g.result.alpha == 0.05 / 3.0);
  CHECK(g.result.t1_a == 150);
  CHECK(g.result.t1_b == 150);
  CHECK(g.est_a.t1() == 150);
  CHECK(g.est_b.t1() == 150);
  CHECK(g.samples_computed == 300);
  CHECK(g.samples_reused_a == 0);
  CHECK(g.samples_reused_b == 0);
  CHECK(g.result.z > 0.0);
}

TEST_CASE("growth doubles to the cap and reuses its own prefix") {
  const Design da = Design::of({0, 60});
  const Design db = Design::of({0, 90});
  // Identical true utilities: with high probability every look stays
  // inside the Bonferroni band and the comparison exhausts its budget.
  const toy::InjectedUtility problem([](const Design&) { return -7.0; }, 1.0);

  const GrowthComparison g = compare_with_growth(problem, da, db, 1, 8,
                                                 GrowthSchedule{});
  CHECK(g.result.verdict == Verdict::kInconclusive);
  REQUIRE(g.looks.size() == 3);
  CHECK(g.looks[0].t1_a == 150);
  CHECK(g.looks[1].t1_a == 300);
  CHECK(g.looks[2].t1_a == 600);
  for (const ComparisonResult& look : g.looks)
    CHECK(look.alpha == 0.05 / 3.0);
  CHECK(g.est_a.t1() == 600);
  CHECK(g.est_b.t1() == 600);
  CHECK(g.samples_computed == 1200);

  // The grown arm contains the look-1 estimate verbatim: replicates are
  // keyed by index, not by when they were computed.
  const DesignUtilityEstimate fresh =
      estimate_utility(problem, da, 150, 1, 8, "A");
  CHECK(prefix_identical(g.est_a, fresh, 150));
}

TEST_CASE("base estimates ride along without recomputation") {
  const Design da = Design::of({0, 60});
  const Design db = Design::of({0, 90});
  const Design dc = Design::of({0, 30, 60, 90, 120});
  const toy::InjectedUtility flat([](const Design&) { return -7.0; }, 1.0);

  // First bout: equal utilities, both arms end at 600 replicates.
  const GrowthComparison first =
      compare_with_growth(flat, da, db, 1, 8, GrowthSchedule{});
  REQUIRE(first.est_a.t1() == 600);

  // Second bout: a clearly better challenger against the grown incumbent.
  const toy::InjectedUtility tilted(
      [&](const Design& d) { return d == dc ? -3.0 : -7.0; }, 0.5);
  const GrowthComparison second =
      compare_with_growth(tilted, dc, da, 1, 8, GrowthSchedule{}, "C", "A",
                          nullptr, &first.est_a);
  CHECK(second.result.verdict == Verdict::kABetter);
  CHECK(second.samples_reused_b == 600);
  CHECK(second.samples_reused_a == 0);
  // Only the challenger's 150 replicates were computed; the incumbent's
  // samples are byte-identical to what it arrived with.
  CHECK(second.samples_computed == 150);
  CHECK(second.est_b.t1() == 600);
  CHECK(prefix_identical(second.est_b, first.est_a, 600));
  CHECK(second.est_a.t1() == 150);
}

TEST_CASE("conjugate toy: growth comparison finds the truly better design") {
  // Five measurements vs two: U gap 6*(v_2 - v_5) is large against the
  // replicate noise, so the verdict must be A-better well within the cap.
  const toy::ConjugateToy problem;
  const Design five = proposed_design();
  const Design two = Design::of({0, 120});
  const GrowthComparison g =
      compare_with_growth(problem, five, two, 40, 3, GrowthSchedule{});
  CHECK(g.result.verdict == Verdict::kABetter);
  CHECK(g.result.u_a > g.result.u_b);
  CHECK(g.est_a.t1() <= 600);
}

}  // TEST_SUITE
