#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace ogtt {

// General-purpose t-walk: a self-tuning MCMC kernel that evolves a pair of
// points and needs no step-size tuning, which is what lets us fit thousands
// of simulated patients unattended.

struct TwalkTarget {
  // Log density up to a constant.  May throw; a throwing proposal is treated
  // as rejected (the count is reported).  Never called outside the support.
  std::function<double(std::span<const double>)> log_density;
  std::function<bool(std::span<const double>)> in_support;
};

struct TwalkResult {
  // chain[0] is the initial point; one row per iteration follows, so the
  // row index equals the iteration number.
  std::vector<std::vector<double>> chain;
  std::vector<double> log_density;  // aligned with chain
  double acceptance_rate = 0.0;     // accepted proposals / iterations
  int failed_evals = 0;             // proposals whose log density threw
};

// Runs `iterations` kernel moves from the pair (x0, xp0).  Both points must
// be in the support and differ in every coordinate; only the first point of
// the pair is recorded.  Throws SamplerError on unusable starting points.
TwalkResult twalk(const TwalkTarget& target, std::vector<double> x0,
                  std::vector<double> xp0, int iterations, RngStream& rng);

// Conventional companion start: each coordinate nudged by a relative 1e-3
// (flipped to -1e-3 where the nudge would leave the support).
std::vector<double> twalk_companion(const TwalkTarget& target,
                                    std::span<const double> x0);

}  // namespace ogtt
