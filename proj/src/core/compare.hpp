#pragma once

#include <string>
#include <vector>

#include "core/estimator.hpp"

namespace ogtt {

enum class Verdict { kABetter, kBBetter, kInconclusive };

std::string verdict_name(Verdict v);

struct ComparisonResult {
  Design design_a, design_b;
  double z = 0.0;        // sign convention: U(a) - U(b)
  double alpha = 0.05;   // level applied at this look
  Verdict verdict = Verdict::kInconclusive;
  int t1_a = 0, t1_b = 0;
  double u_a = 0.0, u_b = 0.0;
  double var_a = 0.0, var_b = 0.0;  // variance_of_mean values
};

// Single-look z-test at level alpha: A-better iff z exceeds the upper
// alpha/2 normal quantile.  Estimates must be independent (disjoint seed
// scopes) and have at least 30 replicates each.
ComparisonResult compare(const DesignUtilityEstimate& a,
                         const DesignUtilityEstimate& b, double alpha);

struct GrowthSchedule {
  int t1_initial = 150;
  int t1_max = 600;
  int growth_factor = 2;
  double alpha = 0.05;  // total error budget, split across planned looks
};

// Number of looks the schedule will take: T1 = initial, then *= factor,
// capped at max.
int planned_looks(const GrowthSchedule& g);

struct GrowthComparison {
  ComparisonResult result;           // outcome of the final look
  std::vector<ComparisonResult> looks;
  DesignUtilityEstimate est_a, est_b;  // final estimates, reusable onward
  int samples_reused_a = 0, samples_reused_b = 0;  // brought in via base_*
  int samples_computed = 0;
};

// Estimate both designs at T1_initial, test, and keep doubling T1 while the
// test is inconclusive, reusing all prior samples.  Each look is tested at
// alpha / planned_looks (a Bonferroni spend, so the total error stays at
// most alpha).  base_a/base_b seed the arms with existing samples (e.g. a
// tournament champion's), which are never recomputed.
GrowthComparison compare_with_growth(
    const NestedMcProblem& problem, const Design& a, const Design& b, int t2,
    uint64_t root_seed, const GrowthSchedule& schedule,
    std::string_view arm_a = "A", std::string_view arm_b = "B",
    const DesignUtilityEstimate* base_a = nullptr,
    const DesignUtilityEstimate* base_b = nullptr, int workers = 1);

}  // namespace ogtt
