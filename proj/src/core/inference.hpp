#pragma once

#include <array>
#include <span>
#include <vector>

#include "core/distributions.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/twalk.hpp"

namespace ogtt {

struct Observation {
  double t_hours;
  double glucose;
};

// Gaussian measurement model: y = G(t) + eps, eps ~ N(0, sigma).
double log_likelihood(const PatientParams& p, const ModelConstants& mc,
                      std::span<const Observation> obs, double sigma);

// Posterior over (theta0, theta1, theta2, g0) given one patient's OGTT data.
// Callable target for the sampler; -infinity outside the prior support.
class Posterior {
 public:
  Posterior(std::vector<Observation> obs, ModelConstants mc,
            double sigma = kNoiseSd);

  double log_density(std::span<const double> v) const;
  bool in_support(std::span<const double> v) const;
  TwalkTarget target() const;

  static PatientParams unpack(std::span<const double> v);
  static std::array<double, 4> pack(const PatientParams& p);

  const std::vector<Observation>& observations() const { return obs_; }
  const ModelConstants& constants() const { return mc_; }
  double sigma() const { return sigma_; }

  // Parameter sets the solver failed on (each evaluated as density -inf).
  long integration_failures() const { return integration_failures_; }

 private:
  std::vector<Observation> obs_;  // sorted by time
  std::vector<double> times_;
  ModelConstants mc_;
  double sigma_;
  mutable std::vector<double> buf_;
  mutable long integration_failures_ = 0;
};

struct FitOptions {
  int raw_iterations = 1500;
  int burn_in = 0;     // 0 when started at the true parameters
  int stride = 15;     // thinning
};

struct FitResult {
  std::vector<PatientParams> draws;  // thinned, post burn-in
  // Raw chain including the starting point at row 0 (row index = iteration).
  std::vector<std::array<double, 4>> raw_chain;
  std::vector<double> raw_log_density;
  double acceptance_rate = 0.0;
  int failed_evals = 0;
};

// Run the sampler from `start` (companion point derived automatically) and
// thin: draw s is raw row burn_in + (s+1)*stride.  Throws SamplerError when
// the start is unusable, InputError when options cannot yield a draw.
FitResult fit_posterior(const Posterior& post, const PatientParams& start,
                        const FitOptions& opt, RngStream& rng);

// Number of thinned draws the options yield.
int thinned_draw_count(const FitOptions& opt);

}  // namespace ogtt
