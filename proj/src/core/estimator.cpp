#include "core/estimator.hpp"

#include <cmath>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "core/parallel.hpp"
#include "core/utility.hpp"

namespace ogtt {

void DesignPrior::validate() const {
  if (atoms.empty()) throw InputError("design prior: no atoms");
  for (const PatientParams& a : atoms) {
    if (!prior_in_support(a))
      throw InputError("design prior: atom outside the inference support");
  }
}

PatientParams DesignPrior::draw(RngStream& rng) const {
  return atoms[rng.uniform_index(atoms.size())];
}

DesignPrior default_design_prior() {
  return DesignPrior{{
      PatientParams{2.15, 1.3, 0.8, 80.0},    // healthy response
      PatientParams{0.2, 3.52, 0.3, 80.0},    // diabetic-like, slow return
      PatientParams{15.3, 31.35, 0.6, 80.0},  // strong regulation, dips
  }};
}

OgttProblem::OgttProblem(DesignPrior prior, ModelConstants mc, double sigma,
                         FitOptions inner_fit)
    : prior_(std::move(prior)), mc_(mc), sigma_(sigma), fit_(inner_fit) {
  prior_.validate();
  mc_.validate();
  if (!(sigma_ > 0.0)) throw InputError("problem: sigma must be positive");
}

ReplicateOutcome OgttProblem::replicate(const Design& d, int t2,
                                        RngStream& rng) const {
  if (t2 != thinned_draw_count(fit_))
    throw ContractError(
        "replicate: T2 does not match the chain thinning configuration");
  const PatientParams truth = prior_.draw(rng);

  const std::vector<double> ts = d.hours();
  std::vector<double> g(ts.size());
  glucose_at_sorted_times(truth, mc_, ts, g);
  std::vector<Observation> obs(ts.size());
  for (size_t i = 0; i < ts.size(); ++i)
    obs[i] = Observation{ts[i], g[i] + sigma_ * rng.normal()};

  const Posterior post(std::move(obs), mc_, sigma_);
  const FitResult fr = fit_posterior(post, truth, fit_, rng);

  ReplicateOutcome out;
  out.generating_params = truth;
  out.u_hat = estimate_u(truth, fr.draws, mc_, &out.inner_se2);
  return out;
}

int DesignUtilityEstimate::included() const {
  int n = 0;
  for (const UtilitySample& s : samples) n += s.excluded ? 0 : 1;
  return n;
}

int DesignUtilityEstimate::excluded() const {
  return t1() - included();
}

std::string estimate_scope(const Design& d, std::string_view arm) {
  return "u/" + d.key() + "/" + std::string(arm);
}

namespace {

// One replicate with the retry-once policy.
UtilitySample run_replicate(const NestedMcProblem& problem, const Design& d,
                            int t2, uint64_t root_seed,
                            const std::string& scope, int index) {
  UtilitySample s;
  s.index = index;
  for (int salt = 0; salt < 2; ++salt) {
    s.salt = salt;
    s.seed = derive_seed(root_seed, scope, static_cast<uint64_t>(index),
                         static_cast<uint64_t>(salt));
    RngStream rng(s.seed);
    try {
      const ReplicateOutcome out = problem.replicate(d, t2, rng);
      s.u_hat = out.u_hat;
      s.inner_se2 = out.inner_se2;
      s.generating_params = out.generating_params;
      s.excluded = false;
      return s;
    } catch (const IntegrationError&) {
    } catch (const SamplerError&) {
    }
  }
  s.excluded = true;
  return s;
}

}  // namespace

void recompute_statistics(DesignUtilityEstimate& est) {
  // Recompute over the full vector in index order, never incrementally:
  // grown and direct estimates must agree bit for bit.
  std::vector<double> u;
  u.reserve(est.samples.size());
  for (const UtilitySample& s : est.samples) {
    if (!s.excluded) u.push_back(s.u_hat);
  }
  const int attempted = est.t1();
  const int excluded = attempted - static_cast<int>(u.size());
  if (excluded > 0 &&
      static_cast<double>(excluded) > 0.01 * static_cast<double>(attempted))
    throw EstimationError("estimate: more than 1% of replicates failed");
  if (u.size() < 2)
    throw EstimationError("estimate: need at least 2 successful replicates");
  est.mean = mean(u);
  est.variance_of_mean = sample_variance(u) / static_cast<double>(u.size());
}

DesignUtilityEstimate estimate_utility(const NestedMcProblem& problem,
                                       const Design& d, int t1, int t2,
                                       uint64_t root_seed,
                                       std::string_view arm, int workers) {
  if (t1 < 2) throw InputError("estimate: T1 must be at least 2");
  if (t2 < 1) throw InputError("estimate: T2 must be at least 1");
  validate_design(d);
  DesignUtilityEstimate est;
  est.design = d;
  est.scope = estimate_scope(d, arm);
  est.root_seed = root_seed;
  est.t2 = t2;
  est.samples.resize(t1);
  parallel_for_indexed(0, t1, workers, [&](int i) {
    est.samples[i] = run_replicate(problem, d, t2, root_seed, est.scope, i);
  });
  recompute_statistics(est);
  return est;
}

DesignUtilityEstimate extend_estimate(const NestedMcProblem& problem,
                                      const DesignUtilityEstimate& existing,
                                      int additional_t1, int workers) {
  if (additional_t1 < 0)
    throw InputError("extend: additional T1 must be nonnegative");
  if (existing.t2 < 1 || existing.samples.empty())
    throw ContractError("extend: existing estimate is empty");
  DesignUtilityEstimate est = existing;
  if (additional_t1 == 0) return est;
  const int begin = est.t1();
  est.samples.resize(static_cast<size_t>(begin) + additional_t1);
  parallel_for_indexed(begin, begin + additional_t1, workers, [&](int i) {
    est.samples[i] =
        run_replicate(problem, est.design, est.t2, est.root_seed, est.scope, i);
  });
  recompute_statistics(est);
  return est;
}

}  // namespace ogtt
