#include "core/validation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/mathutil.hpp"
#include "core/parallel.hpp"
#include "core/search.hpp"
#include "core/utility.hpp"

namespace ogtt {

Histogram make_histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw InputError("histogram: need at least one bin");
  if (values.empty()) throw InputError("histogram: no values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) hi = lo + 1.0;  // all-equal sample: one unit-wide bin range
  Histogram h;
  h.edges.resize(bins + 1);
  const double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + w * i;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / w);
    b = std::clamp(b, 0, bins - 1);  // put v == hi in the last bin
    ++h.counts[b];
  }
  return h;
}

// ---------------------------------------------------------------------------
// Random-design study
// ---------------------------------------------------------------------------

double patient_design_utility(const PatientParams& patient, const Design& d,
                              const ModelConstants& mc, double sigma,
                              const FitOptions& fit, RngStream& rng,
                              double* se2) {
  const std::vector<double> ts = d.hours();
  std::vector<double> g(ts.size());
  glucose_at_sorted_times(patient, mc, ts, g);
  std::vector<Observation> obs(ts.size());
  for (size_t i = 0; i < ts.size(); ++i)
    obs[i] = Observation{ts[i], g[i] + sigma * rng.normal()};
  const Posterior post(std::move(obs), mc, sigma);
  const FitResult fr = fit_posterior(post, patient, fit, rng);
  return estimate_u(patient, fr.draws, mc, se2);
}

PairedTrial paired_utility_trial(const PatientParams& patient,
                                 const Design& proposed,
                                 const Design& random_design,
                                 const ValidationOptions& opt,
                                 RngStream& rng) {
  PairedTrial t;
  t.patient = patient;
  t.random_design = random_design;
  t.u_proposed = patient_design_utility(patient, proposed, opt.constants,
                                        opt.sigma, opt.fit, rng,
                                        &t.se2_proposed);
  t.u_random = patient_design_utility(patient, random_design, opt.constants,
                                      opt.sigma, opt.fit, rng, &t.se2_random);
  return t;
}

std::vector<RandomDesignSummary> random_design_study(
    const ValidationOptions& opt, std::span<const int> sizes,
    int trials_per_size) {
  if (sizes.empty()) throw InputError("random-design study: no sizes");
  if (trials_per_size < 2)
    throw InputError("random-design study: need at least 2 trials per size");
  const Design proposed = proposed_design();
  const std::vector<int> grid = default_search_grid();

  std::vector<RandomDesignSummary> out;
  for (int size : sizes) {
    const std::vector<Design> pool = enumerate_designs(size, grid);
    RandomDesignSummary s;
    s.size = size;
    s.trials.resize(trials_per_size);
    const std::string scope = "validate-random/k" + std::to_string(size);
    parallel_for_indexed(0, trials_per_size, opt.workers, [&](int i) {
      // A failed arm voids the trial; retry it on a fresh stream so every
      // slot ends up filled (failures are solver blow-ups, which the prior
      // support makes vanishingly rare).
      for (int salt = 0;; ++salt) {
        if (salt > 4)
          throw EstimationError("random-design study: trial " +
                                std::to_string(i) + " failed repeatedly");
        RngStream rng = derive_stream(opt.root_seed, scope,
                                      static_cast<uint64_t>(i),
                                      static_cast<uint64_t>(salt));
        try {
          const PatientParams patient = sample_prior(rng);
          const Design& rd = pool[rng.uniform_index(pool.size())];
          s.trials[i] = paired_utility_trial(patient, proposed, rd, opt, rng);
          return;
        } catch (const IntegrationError&) {
        } catch (const SamplerError&) {
        }
      }
    });

    std::vector<double> diffs;
    diffs.reserve(s.trials.size());
    double se2_acc = 0.0;
    for (const PairedTrial& t : s.trials) {
      diffs.push_back(t.difference());
      se2_acc += t.se2_proposed + t.se2_random;
    }
    s.mean_difference = mean(diffs);
    s.percentile_5 = sample_quantile(diffs, 0.05);
    s.pooled_se = std::sqrt(se2_acc / static_cast<double>(s.trials.size()));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surrogate utility
// ---------------------------------------------------------------------------

std::vector<SurrogatePatient> synthetic_cohort(int n,
                                               const ValidationOptions& opt) {
  if (n < 1) throw InputError("cohort: need at least one patient");
  const std::vector<double> ts = full_grid_design().hours();
  std::vector<SurrogatePatient> cohort(n);
  for (int i = 0; i < n; ++i) {
    RngStream rng = derive_stream(opt.root_seed, "validate-surrogate/cohort",
                                  static_cast<uint64_t>(i));
    SurrogatePatient& p = cohort[i];
    p.id = i;
    p.params = sample_prior(rng);
    std::vector<double> g(ts.size());
    glucose_at_sorted_times(p.params, opt.constants, ts, g);
    p.full_data.resize(ts.size());
    for (size_t j = 0; j < ts.size(); ++j)
      p.full_data[j] = Observation{ts[j], g[j] + opt.sigma * rng.normal()};
  }
  return cohort;
}

namespace {

// Subset of the record at exactly the design's times (matched in minutes).
std::vector<Observation> restrict_to_design(
    std::span<const Observation> full_data, const Design& d) {
  std::vector<Observation> obs;
  obs.reserve(d.minutes.size());
  for (int m : d.minutes) {
    const Observation* found = nullptr;
    for (const Observation& o : full_data) {
      if (std::lround(o.t_hours * 60.0) == m) {
        found = &o;
        break;
      }
    }
    if (found == nullptr)
      throw InputError("surrogate: design time " + std::to_string(m) +
                       " min is not among the record's measurement times");
    obs.push_back(*found);
  }
  return obs;
}

std::vector<std::vector<double>> curves_of(
    std::span<const PatientParams> draws, const ModelConstants& mc) {
  std::vector<std::vector<double>> curves;
  curves.reserve(draws.size());
  for (const PatientParams& p : draws)
    curves.push_back(curve_on_utility_grid(p, mc));
  return curves;
}

}  // namespace

std::vector<PatientParams> surrogate_outer_draws(
    std::span<const Observation> full_data, const ValidationOptions& opt,
    RngStream& rng) {
  if (full_data.empty()) throw InputError("surrogate: empty record");
  const Posterior post(std::vector<Observation>(full_data.begin(),
                                                full_data.end()),
                       opt.constants, opt.sigma);
  return fit_posterior(post, prior_mean_start(), opt.surrogate_fit, rng).draws;
}

double surrogate_utility_given_outer(std::span<const Observation> full_data,
                                     const Design& d,
                                     std::span<const PatientParams> outer,
                                     const ValidationOptions& opt,
                                     RngStream& rng) {
  if (outer.empty()) throw InputError("surrogate: no outer draws");
  const Posterior post(restrict_to_design(full_data, d), opt.constants,
                       opt.sigma);
  const FitResult fr =
      fit_posterior(post, prior_mean_start(), opt.surrogate_fit, rng);

  const auto outer_curves = curves_of(outer, opt.constants);
  const auto inner_curves = curves_of(fr.draws, opt.constants);
  double acc = 0.0;
  for (const auto& co : outer_curves)
    for (const auto& ci : inner_curves) acc += ise_between_curves(co, ci);
  return -acc / static_cast<double>(outer_curves.size() *
                                    inner_curves.size());
}

double surrogate_utility(std::span<const Observation> full_data,
                         const Design& d, const ValidationOptions& opt,
                         RngStream& rng) {
  const std::vector<PatientParams> outer =
      surrogate_outer_draws(full_data, opt, rng);
  return surrogate_utility_given_outer(full_data, d, outer, opt, rng);
}

SurrogateStudyReport surrogate_study(std::span<const SurrogatePatient> cohort,
                                     const ValidationOptions& opt) {
  if (cohort.empty()) throw InputError("surrogate study: empty cohort");
  SurrogateStudyReport rep;
  rep.comparisons.resize(cohort.size());
  parallel_for_indexed(0, static_cast<int>(cohort.size()), opt.workers,
                       [&](int i) {
    const SurrogatePatient& p = cohort[i];
    RngStream rng = derive_stream(opt.root_seed,
                                  "validate-surrogate/p" + std::to_string(p.id),
                                  0);
    const std::vector<PatientParams> outer =
        surrogate_outer_draws(p.full_data, opt, rng);
    SurrogateComparison& c = rep.comparisons[i];
    c.patient_id = p.id;
    c.u_proposed = surrogate_utility_given_outer(p.full_data,
                                                 proposed_design(), outer,
                                                 opt, rng);
    c.u_conventional = surrogate_utility_given_outer(p.full_data,
                                                     conventional_design(),
                                                     outer, opt, rng);
    c.quotient = c.u_conventional / c.u_proposed;
  });
  for (const SurrogateComparison& c : rep.comparisons)
    if (c.quotient > 1.0) ++rep.proposed_better;
  return rep;
}

// ---------------------------------------------------------------------------
// Robustness check
// ---------------------------------------------------------------------------

PatientParams extreme_patient() { return PatientParams{80.0, 1.0, 1.5, 80.0}; }

RobustnessReport robustness_check(const ValidationOptions& opt,
                                  int prior_draws) {
  if (prior_draws < 2)
    throw InputError("robustness: need at least 2 prior draws");
  RobustnessReport r;
  r.truth = extreme_patient();
  r.design = proposed_design();
  r.bad_design = Design::of({0, 15, 30});
  r.truth_curve = curve_on_utility_grid(r.truth, opt.constants);

  RngStream rng = derive_stream(opt.root_seed, "validate-robust", 0);

  // Proposed-design arm: one noisy record, truth-started fit; the same
  // draws feed both the ISE summary and the pointwise band.
  const std::vector<double> ts = r.design.hours();
  std::vector<double> g(ts.size());
  glucose_at_sorted_times(r.truth, opt.constants, ts, g);
  std::vector<Observation> obs(ts.size());
  for (size_t i = 0; i < ts.size(); ++i)
    obs[i] = Observation{ts[i], g[i] + opt.sigma * rng.normal()};
  const Posterior post(std::move(obs), opt.constants, opt.sigma);
  const FitResult fr = fit_posterior(post, r.truth, opt.fit, rng);
  r.posterior_mean_ise = -estimate_u(r.truth, fr.draws, opt.constants);

  const auto curves = curves_of(fr.draws, opt.constants);
  r.band_lo.resize(kCurveGridPoints);
  r.band_hi.resize(kCurveGridPoints);
  std::vector<double> col(curves.size());
  int covered = 0;
  for (int t = 0; t < kCurveGridPoints; ++t) {
    for (size_t j = 0; j < curves.size(); ++j) col[j] = curves[j][t];
    r.band_lo[t] = sample_quantile(col, 0.025);
    r.band_hi[t] = sample_quantile(col, 0.975);
    if (r.truth_curve[t] >= r.band_lo[t] && r.truth_curve[t] <= r.band_hi[t])
      ++covered;
  }
  r.coverage = static_cast<double>(covered) / kCurveGridPoints;

  // No-data baseline: expected ISE under the prior alone.
  std::vector<PatientParams> prior_sample(prior_draws);
  for (PatientParams& p : prior_sample) p = sample_prior(rng);
  r.prior_mean_ise = -estimate_u(r.truth, prior_sample, opt.constants);

  // Negative control: the same patient measured only in the first half hour.
  r.bad_design_ise = -patient_design_utility(r.truth, r.bad_design,
                                             opt.constants, opt.sigma,
                                             opt.fit, rng);
  return r;
}

}  // namespace ogtt
