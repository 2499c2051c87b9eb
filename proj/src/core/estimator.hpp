#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/design.hpp"
#include "core/inference.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"

namespace ogtt {

// Design prior pi_D: the population a schedule is optimized for.  A finite
// list of equally weighted parameter atoms.
struct DesignPrior {
  std::vector<PatientParams> atoms;
  void validate() const;  // nonempty, every atom in the inference support
  PatientParams draw(RngStream& rng) const;
};

// Default atoms: three response archetypes (healthy, diabetic-like,
// low-insulin oscillating), all at basal fasting glucose.
DesignPrior default_design_prior();

// One outer replicate of the nested Monte Carlo estimator, abstracted so the
// same estimator/compare/search machinery runs on the real model and on the
// closed-form toy used to calibrate the statistics.  replicate() must be
// const-thread-safe: replicates share nothing but the problem object.
struct ReplicateOutcome {
  double u_hat;
  double inner_se2;  // sample variance of the inner losses / T2
  PatientParams generating_params;
};

class NestedMcProblem {
 public:
  virtual ~NestedMcProblem() = default;
  virtual ReplicateOutcome replicate(const Design& d, int t2,
                                     RngStream& rng) const = 0;
};

// The real thing: draw truth from pi_D, simulate noisy measurements under
// the design, fit the posterior with a truth-started chain, average ISE
// losses over the thinned draws.
class OgttProblem : public NestedMcProblem {
 public:
  OgttProblem(DesignPrior prior, ModelConstants mc, double sigma,
              FitOptions inner_fit);
  ReplicateOutcome replicate(const Design& d, int t2,
                             RngStream& rng) const override;

  const DesignPrior& prior() const { return prior_; }
  const ModelConstants& constants() const { return mc_; }
  double sigma() const { return sigma_; }
  const FitOptions& fit_options() const { return fit_; }

 private:
  DesignPrior prior_;
  ModelConstants mc_;
  double sigma_;
  FitOptions fit_;
};

struct UtilitySample {
  int index = 0;        // replicate index within the scope
  uint64_t seed = 0;    // derived stream seed actually used
  int salt = 0;         // 0 = first attempt, 1 = retry
  bool excluded = false;
  double u_hat = 0.0;
  double inner_se2 = 0.0;
  PatientParams generating_params;
};

struct DesignUtilityEstimate {
  Design design;
  std::string scope;   // seed scope; stable across extensions
  uint64_t root_seed = 0;
  int t2 = 0;
  std::vector<UtilitySample> samples;  // index order; size = attempted T1

  int t1() const { return static_cast<int>(samples.size()); }
  int included() const;
  int excluded() const;
  double mean = 0.0;             // over included samples
  double variance_of_mean = 0.0; // unbiased sample variance / included
};

// Canonical seed scope for a design's utility samples; `arm` separates
// streams that must stay independent (e.g. two arms of a comparison).
std::string estimate_scope(const Design& d, std::string_view arm);

// Run T1 outer replicates.  Failures (integration, sampler) are retried once
// with a fresh salt, then excluded; more than 1% exclusions raises
// EstimationError.  Statistics are recomputed over the full index-ordered
// sample vector, so any grow path yields bitwise-equal results.
DesignUtilityEstimate estimate_utility(const NestedMcProblem& problem,
                                       const Design& d, int t1, int t2,
                                       uint64_t root_seed,
                                       std::string_view arm = "A",
                                       int workers = 1);

// Append additional_t1 replicates (indices continue where samples end).
// The existing estimate's T2 is kept; the samples it already holds are
// reused untouched.
DesignUtilityEstimate extend_estimate(const NestedMcProblem& problem,
                                      const DesignUtilityEstimate& existing,
                                      int additional_t1, int workers = 1);

// Recompute mean / variance_of_mean from the samples (e.g. after loading a
// persisted sample store).  Same exclusion rules as a fresh estimate.
void recompute_statistics(DesignUtilityEstimate& est);

}  // namespace ogtt
