#include "core/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ogtt {

double log_likelihood(const PatientParams& p, const ModelConstants& mc,
                      std::span<const Observation> obs, double sigma) {
  if (!(sigma > 0.0)) throw InputError("log_likelihood: sigma must be positive");
  if (obs.empty()) return 0.0;
  std::vector<Observation> sorted(obs.begin(), obs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Observation& a, const Observation& b) {
              return a.t_hours < b.t_hours;
            });
  std::vector<double> ts(sorted.size()), g(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) ts[i] = sorted[i].t_hours;
  glucose_at_sorted_times(p, mc, ts, g);
  // Additive constants dropped: zero residuals give exactly 0.
  double ll = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double z = (sorted[i].glucose - g[i]) / sigma;
    ll += -0.5 * z * z;
  }
  return ll;
}

Posterior::Posterior(std::vector<Observation> obs, ModelConstants mc,
                     double sigma)
    : obs_(std::move(obs)), mc_(mc), sigma_(sigma) {
  if (!(sigma_ > 0.0)) throw InputError("posterior: sigma must be positive");
  mc_.validate();
  std::sort(obs_.begin(), obs_.end(),
            [](const Observation& a, const Observation& b) {
              return a.t_hours < b.t_hours;
            });
  times_.reserve(obs_.size());
  for (const Observation& o : obs_) {
    if (!(std::isfinite(o.t_hours) && o.t_hours >= 0.0))
      throw InputError("posterior: observation times must be >= 0");
    if (!std::isfinite(o.glucose))
      throw InputError("posterior: observations must be finite");
    times_.push_back(o.t_hours);
  }
  buf_.resize(obs_.size());
}

PatientParams Posterior::unpack(std::span<const double> v) {
  if (v.size() != 4) throw InputError("posterior: state must have 4 entries");
  return PatientParams{v[0], v[1], v[2], v[3]};
}

std::array<double, 4> Posterior::pack(const PatientParams& p) {
  return {p.theta0, p.theta1, p.theta2, p.g0};
}

bool Posterior::in_support(std::span<const double> v) const {
  return v.size() == 4 && prior_in_support(unpack(v));
}

double Posterior::log_density(std::span<const double> v) const {
  const PatientParams p = unpack(v);
  const double lp = log_prior(p);
  if (!std::isfinite(lp)) return lp;
  if (obs_.empty()) return lp;
  try {
    glucose_at_sorted_times(p, mc_, times_, buf_);
  } catch (const IntegrationError&) {
    // A parameter set the solver cannot handle is simply an impossible
    // state for the chain, not a reason to abort it.
    ++integration_failures_;
    return -std::numeric_limits<double>::infinity();
  }
  double ll = 0.0;
  for (size_t i = 0; i < obs_.size(); ++i) {
    const double z = (obs_[i].glucose - buf_[i]) / sigma_;
    ll += -0.5 * z * z;
  }
  return lp + ll;
}

TwalkTarget Posterior::target() const {
  return TwalkTarget{
      [this](std::span<const double> v) { return log_density(v); },
      [this](std::span<const double> v) { return in_support(v); }};
}

int thinned_draw_count(const FitOptions& opt) {
  if (opt.raw_iterations <= 0 || opt.stride <= 0 || opt.burn_in < 0)
    throw InputError("fit options: iterations/stride/burn-in out of range");
  return (opt.raw_iterations - opt.burn_in) / opt.stride;
}

FitResult fit_posterior(const Posterior& post, const PatientParams& start,
                        const FitOptions& opt, RngStream& rng) {
  const int n_draws = thinned_draw_count(opt);
  if (n_draws <= 0)
    throw InputError("fit options: no draws left after burn-in and thinning");

  const TwalkTarget target = post.target();
  const std::array<double, 4> x0 = Posterior::pack(start);
  if (!target.in_support(x0))
    throw SamplerError("fit: starting point outside the prior support");
  std::vector<double> x0v(x0.begin(), x0.end());
  std::vector<double> xp0 = twalk_companion(target, x0v);

  const long fails_before = post.integration_failures();
  const TwalkResult tw =
      twalk(target, std::move(x0v), std::move(xp0), opt.raw_iterations, rng);
  if (tw.acceptance_rate == 0.0)
    throw SamplerError(
        "fit: degenerate chain, no proposal accepted over the full run");

  FitResult fr;
  fr.acceptance_rate = tw.acceptance_rate;
  fr.failed_evals =
      tw.failed_evals +
      static_cast<int>(post.integration_failures() - fails_before);
  fr.raw_chain.reserve(tw.chain.size());
  for (const auto& row : tw.chain)
    fr.raw_chain.push_back({row[0], row[1], row[2], row[3]});
  fr.raw_log_density = tw.log_density;
  fr.draws.reserve(n_draws);
  for (int s = 0; s < n_draws; ++s) {
    const size_t idx =
        static_cast<size_t>(opt.burn_in) +
        static_cast<size_t>(s + 1) * static_cast<size_t>(opt.stride);
    fr.draws.push_back(Posterior::unpack(tw.chain[idx]));
  }
  return fr;
}

}  // namespace ogtt
