#include "core/compare.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/mathutil.hpp"

namespace ogtt {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kABetter:
      return "A-better";
    case Verdict::kBBetter:
      return "B-better";
    default:
      return "inconclusive";
  }
}

ComparisonResult compare(const DesignUtilityEstimate& a,
                         const DesignUtilityEstimate& b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputError("compare: alpha must be in (0,1)");
  if (a.included() < 30 || b.included() < 30)
    throw InputError("compare: need T1 >= 30 per arm for the normal test");

  ComparisonResult r;
  r.design_a = a.design;
  r.design_b = b.design;
  r.alpha = alpha;
  r.t1_a = a.t1();
  r.t1_b = b.t1();
  r.u_a = a.mean;
  r.u_b = b.mean;
  r.var_a = a.variance_of_mean;
  r.var_b = b.variance_of_mean;

  const double diff = a.mean - b.mean;
  const double denom = a.variance_of_mean + b.variance_of_mean;
  if (denom <= 0.0) {
    // Degenerate: identical means are inconclusive, otherwise the sign wins.
    if (diff == 0.0) {
      r.z = 0.0;
      r.verdict = Verdict::kInconclusive;
    } else {
      r.z = diff > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
      r.verdict = diff > 0.0 ? Verdict::kABetter : Verdict::kBBetter;
    }
    return r;
  }
  r.z = diff / std::sqrt(denom);
  const double q = normal_quantile(1.0 - alpha / 2.0);
  if (r.z > q)
    r.verdict = Verdict::kABetter;
  else if (r.z < -q)
    r.verdict = Verdict::kBBetter;
  else
    r.verdict = Verdict::kInconclusive;
  return r;
}

int planned_looks(const GrowthSchedule& g) {
  if (g.t1_initial < 2 || g.t1_initial > g.t1_max || g.growth_factor < 2)
    throw InputError("growth schedule: need 2 <= T1_initial <= T1_max, factor >= 2");
  int looks = 1;
  long t1 = g.t1_initial;
  while (t1 < g.t1_max) {
    t1 = std::min<long>(t1 * g.growth_factor, g.t1_max);
    ++looks;
  }
  return looks;
}

GrowthComparison compare_with_growth(
    const NestedMcProblem& problem, const Design& a, const Design& b, int t2,
    uint64_t root_seed, const GrowthSchedule& schedule, std::string_view arm_a,
    std::string_view arm_b, const DesignUtilityEstimate* base_a,
    const DesignUtilityEstimate* base_b, int workers) {
  const int looks = planned_looks(schedule);
  const double alpha_look = schedule.alpha / static_cast<double>(looks);

  GrowthComparison out;

  // Bring each arm up to `target` replicates, reusing whatever it has.
  auto ensure = [&](DesignUtilityEstimate& est, const Design& d,
                    std::string_view arm, int target, int& computed) {
    if (est.samples.empty()) {
      est = estimate_utility(problem, d, target, t2, root_seed, arm, workers);
      computed += target;
    } else if (est.t1() < target) {
      const int add = target - est.t1();
      est = extend_estimate(problem, est, add, workers);
      computed += add;
    }
  };

  if (base_a != nullptr) {
    out.est_a = *base_a;
    out.samples_reused_a = out.est_a.t1();
  }
  if (base_b != nullptr) {
    out.est_b = *base_b;
    out.samples_reused_b = out.est_b.t1();
  }

  int t1 = schedule.t1_initial;
  for (;;) {
    ensure(out.est_a, a, arm_a, t1, out.samples_computed);
    ensure(out.est_b, b, arm_b, t1, out.samples_computed);
    out.result = compare(out.est_a, out.est_b, alpha_look);
    out.looks.push_back(out.result);
    if (out.result.verdict != Verdict::kInconclusive || t1 >= schedule.t1_max)
      return out;
    t1 = std::min(t1 * schedule.growth_factor, schedule.t1_max);
  }
}

}  // namespace ogtt
