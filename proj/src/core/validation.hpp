#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/design.hpp"
#include "core/inference.hpp"

namespace ogtt {

// Shared knobs for the three validation experiments.  `fit` is the
// truth-started chain used when the generating parameters are known
// (random-design trials, robustness check); `surrogate_fit` is the
// prior-mean-started, burned-in chain used when only data is available.
struct ValidationOptions {
  ModelConstants constants;
  double sigma = kNoiseSd;
  FitOptions fit{1500, 0, 15};
  FitOptions surrogate_fit{1800, 300, 15};
  uint64_t root_seed = 0;
  int workers = 1;
};

// Equal-width histogram over [min, max] of the values; the last bin is
// closed on the right, so counts always sum to the sample size.
struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<long> counts;   // one per bin
};
Histogram make_histogram(std::span<const double> values, int bins);

// ---------------------------------------------------------------------------
// Random-design study: paired utility differences, proposed minus random.
// ---------------------------------------------------------------------------

struct PairedTrial {
  PatientParams patient;
  Design random_design;
  double u_proposed = 0.0, u_random = 0.0;
  double se2_proposed = 0.0, se2_random = 0.0;  // inner-average variances
  double difference() const { return u_proposed - u_random; }
};

struct RandomDesignSummary {
  int size = 0;  // measurement count of the random designs
  std::vector<PairedTrial> trials;
  double mean_difference = 0.0;
  double percentile_5 = 0.0;  // 5th percentile of the differences
  // Monte Carlo scale of one paired difference: sqrt of the mean per-trial
  // variance se2_proposed + se2_random (arms are independent).
  double pooled_se = 0.0;
};

// Utility of a design for a known patient: simulate one noisy data set
// under the design, fit from the truth, and score the posterior draws
// against the patient's true curve.
double patient_design_utility(const PatientParams& patient, const Design& d,
                              const ModelConstants& mc, double sigma,
                              const FitOptions& fit, RngStream& rng,
                              double* se2 = nullptr);

// One paired trial: the same patient under both designs, independent noise.
PairedTrial paired_utility_trial(const PatientParams& patient,
                                 const Design& proposed,
                                 const Design& random_design,
                                 const ValidationOptions& opt, RngStream& rng);

// Per size: trials_per_size patients drawn from the prior, each scored
// under the proposed schedule and under a random grid design of that size
// (uniform over all valid designs containing t=0).  Differences should pile
// up at and to the right of zero.
std::vector<RandomDesignSummary> random_design_study(
    const ValidationOptions& opt, std::span<const int> sizes,
    int trials_per_size = 100);

// ---------------------------------------------------------------------------
// Surrogate utility on densely measured patients.
// ---------------------------------------------------------------------------

struct SurrogatePatient {
  int id = 0;
  PatientParams params;  // generating parameters (synthetic cohorts only)
  std::vector<Observation> full_data;  // every quarter hour over [0, 2] h
};

// n prior-drawn patients measured on the full design with fresh noise.
std::vector<SurrogatePatient> synthetic_cohort(int n,
                                               const ValidationOptions& opt);

// Full-data posterior draws (prior-mean start, burn-in per options):
// the outer average of the surrogate estimator.
std::vector<PatientParams> surrogate_outer_draws(
    std::span<const Observation> full_data, const ValidationOptions& opt,
    RngStream& rng);

// Surrogate utility of a design for one record: refit using only the
// design's subset of the data, then average the curve ISE between every
// (outer, inner) draw pair, negated.  The design must only use times
// present in the record.
double surrogate_utility_given_outer(std::span<const Observation> full_data,
                                     const Design& d,
                                     std::span<const PatientParams> outer,
                                     const ValidationOptions& opt,
                                     RngStream& rng);

// Convenience wrapper running both stages on one stream.
double surrogate_utility(std::span<const Observation> full_data,
                         const Design& d, const ValidationOptions& opt,
                         RngStream& rng);

struct SurrogateComparison {
  int patient_id = 0;
  double u_proposed = 0.0, u_conventional = 0.0;
  double quotient = 0.0;  // conventional / proposed; > 1 favors proposed
};

struct SurrogateStudyReport {
  std::vector<SurrogateComparison> comparisons;
  int proposed_better = 0;  // patients with quotient > 1
};

// Per patient: one outer fit shared by both designs, then the surrogate
// utility of the proposed and the conventional schedule.
SurrogateStudyReport surrogate_study(std::span<const SurrogatePatient> cohort,
                                     const ValidationOptions& opt);

// ---------------------------------------------------------------------------
// Robustness check on an extreme patient.
// ---------------------------------------------------------------------------

// Far outside the prior bulk: a violent insulin response with slow
// stomach emptying.
PatientParams extreme_patient();

struct RobustnessReport {
  PatientParams truth;
  Design design;      // proposed schedule
  Design bad_design;  // front-loaded schedule used as the negative control
  double coverage = 0.0;  // fraction of the 3 h grid inside the 95% band
  double posterior_mean_ise = 0.0;  // E[ISE vs truth] under the posterior
  double prior_mean_ise = 0.0;      // same under the prior (no-data baseline)
  double bad_design_ise = 0.0;      // posterior E[ISE] fit on bad_design data
  std::vector<double> truth_curve, band_lo, band_hi;  // 1-minute grid
};

// Simulate the extreme patient under the proposed design, fit, and report
// how well the posterior tracks the true curve; the same patient fit under
// bad_design and under no data at all provide the comparison points.
RobustnessReport robustness_check(const ValidationOptions& opt,
                                  int prior_draws = 200);

}  // namespace ogtt
