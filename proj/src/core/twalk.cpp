#include "core/twalk.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace ogtt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Kernel mixture and shape constants of the standard t-walk.
constexpr double kPWalk = 0.4918;
constexpr double kPTraverse = 0.4918;
constexpr double kPBlow = 0.0082;  // remainder is hop
constexpr double kAw = 1.5;        // walk stretch
constexpr double kAt = 6.0;        // traverse tail exponent

struct Move {
  std::vector<double> y;
  double log_hastings = 0.0;  // log q(x|y) - log q(y|x), zero when symmetric
  bool valid = true;          // false: degenerate proposal, auto-reject
};

class Kernel {
 public:
  Kernel(size_t n, RngStream& rng)
      : n_(n), pphi_(std::min<double>(4.0, static_cast<double>(n)) /
                     static_cast<double>(n)),
        rng_(rng), phi_(n) {}

  // phi marks the coordinates this move touches.
  int draw_phi() {
    int nphi = 0;
    for (size_t j = 0; j < n_; ++j) {
      phi_[j] = rng_.uniform() < pphi_;
      nphi += phi_[j] ? 1 : 0;
    }
    return nphi;
  }

  Move walk(const std::vector<double>& x, const std::vector<double>& xp) {
    Move m{x, 0.0, true};
    if (draw_phi() == 0) {
      m.valid = false;
      return m;
    }
    for (size_t j = 0; j < n_; ++j) {
      if (!phi_[j]) continue;
      const double u = rng_.uniform();
      const double z = (kAw / (1.0 + kAw)) * (kAw * u * u + 2.0 * u - 1.0);
      m.y[j] = x[j] + (x[j] - xp[j]) * z;
    }
    return m;
  }

  Move traverse(const std::vector<double>& x, const std::vector<double>& xp) {
    Move m{x, 0.0, true};
    const int nphi = draw_phi();
    if (nphi == 0) {
      m.valid = false;
      return m;
    }
    const double b = sim_beta();
    for (size_t j = 0; j < n_; ++j) {
      if (phi_[j]) m.y[j] = xp[j] + b * (xp[j] - x[j]);
    }
    m.log_hastings = (static_cast<double>(nphi) - 2.0) * std::log(b);
    return m;
  }

  Move blow(const std::vector<double>& x, const std::vector<double>& xp) {
    // Gaussian ball around the *other* point.
    Move m{x, 0.0, true};
    const int nphi = draw_phi();
    const double sigma = max_phi_dist(x, xp);
    if (nphi == 0 || sigma <= 0.0) {
      m.valid = false;
      return m;
    }
    for (size_t j = 0; j < n_; ++j) {
      if (phi_[j]) m.y[j] = xp[j] + sigma * rng_.normal();
    }
    const double fwd = gauss_energy(m.y, xp, sigma, nphi);
    const double sigma_rev = max_phi_dist(m.y, xp);
    if (sigma_rev <= 0.0) {
      m.valid = false;
      return m;
    }
    const double rev = gauss_energy(x, xp, sigma_rev, nphi);
    // log q(x|y) - log q(y|x) = fwd - rev in energy terms.
    m.log_hastings = fwd - rev;
    return m;
  }

  Move hop(const std::vector<double>& x, const std::vector<double>& xp) {
    // Small Gaussian ball around the point being moved.
    Move m{x, 0.0, true};
    const int nphi = draw_phi();
    const double sigma = max_phi_dist(x, xp) / 3.0;
    if (nphi == 0 || sigma <= 0.0) {
      m.valid = false;
      return m;
    }
    for (size_t j = 0; j < n_; ++j) {
      if (phi_[j]) m.y[j] = x[j] + sigma * rng_.normal();
    }
    const double fwd = gauss_energy(m.y, x, sigma, nphi);
    const double sigma_rev = max_phi_dist(m.y, xp) / 3.0;
    if (sigma_rev <= 0.0) {
      m.valid = false;
      return m;
    }
    const double rev = gauss_energy(x, m.y, sigma_rev, nphi);
    m.log_hastings = fwd - rev;
    return m;
  }

 private:
  double sim_beta() {
    if (rng_.uniform() < (kAt - 1.0) / (2.0 * kAt))
      return std::pow(rng_.uniform(), 1.0 / (kAt + 1.0));
    return std::pow(rng_.uniform(), 1.0 / (1.0 - kAt));
  }

  double max_phi_dist(const std::vector<double>& a,
                      const std::vector<double>& b) const {
    double s = 0.0;
    for (size_t j = 0; j < n_; ++j) {
      if (phi_[j]) s = std::max(s, std::abs(a[j] - b[j]));
    }
    return s;
  }

  // Negative log density of a diagonal Gaussian on the phi coordinates.
  double gauss_energy(const std::vector<double>& h,
                      const std::vector<double>& center, double sigma,
                      int nphi) const {
    double q = 0.0;
    for (size_t j = 0; j < n_; ++j) {
      if (!phi_[j]) continue;
      const double d = (h[j] - center[j]) / sigma;
      q += d * d;
    }
    return 0.5 * q + nphi * std::log(sigma) +
           0.5 * nphi * std::log(2.0 * M_PI);
  }

  size_t n_;
  double pphi_;
  RngStream& rng_;
  std::vector<char> phi_;
};

}  // namespace

std::vector<double> twalk_companion(const TwalkTarget& target,
                                    std::span<const double> x0) {
  std::vector<double> xp(x0.begin(), x0.end());
  for (size_t j = 0; j < xp.size(); ++j) {
    const double step = (xp[j] != 0.0) ? std::abs(xp[j]) * 1e-3 : 1e-3;
    xp[j] = x0[j] + step;
    if (!target.in_support(xp)) xp[j] = x0[j] - step;
    if (!target.in_support(xp))
      throw SamplerError("twalk: cannot place companion start in support");
  }
  return xp;
}

TwalkResult twalk(const TwalkTarget& target, std::vector<double> x0,
                  std::vector<double> xp0, int iterations, RngStream& rng) {
  const size_t n = x0.size();
  if (n == 0 || xp0.size() != n)
    throw SamplerError("twalk: empty state or dimension mismatch");
  if (iterations <= 0) throw SamplerError("twalk: iterations must be positive");
  if (!target.in_support(x0) || !target.in_support(xp0))
    throw SamplerError("twalk: starting points must lie in the support");
  for (size_t j = 0; j < n; ++j) {
    if (x0[j] == xp0[j])
      throw SamplerError("twalk: starting points must differ everywhere");
  }

  TwalkResult res;
  res.chain.reserve(static_cast<size_t>(iterations) + 1);
  res.log_density.reserve(static_cast<size_t>(iterations) + 1);

  double lx, lxp;
  try {
    lx = target.log_density(x0);
    lxp = target.log_density(xp0);
  } catch (const std::exception& e) {
    throw SamplerError(std::string("twalk: starting density failed: ") +
                       e.what());
  }
  if (!std::isfinite(lx) || !std::isfinite(lxp))
    throw SamplerError("twalk: starting density is not finite");

  std::vector<double> x = std::move(x0), xp = std::move(xp0);
  res.chain.push_back(x);
  res.log_density.push_back(lx);

  Kernel kernel(n, rng);
  int accepted = 0;

  for (int it = 0; it < iterations; ++it) {
    const double ker = rng.uniform();
    const bool move_first = rng.uniform() < 0.5;
    std::vector<double>& cur = move_first ? x : xp;
    std::vector<double>& piv = move_first ? xp : x;
    double& lcur = move_first ? lx : lxp;

    Move mv;
    if (ker < kPWalk)
      mv = kernel.walk(cur, piv);
    else if (ker < kPWalk + kPTraverse)
      mv = kernel.traverse(cur, piv);
    else if (ker < kPWalk + kPTraverse + kPBlow)
      mv = kernel.blow(cur, piv);
    else
      mv = kernel.hop(cur, piv);

    bool accept = false;
    if (mv.valid && target.in_support(mv.y)) {
      bool distinct = true;
      for (size_t j = 0; j < n; ++j) {
        if (mv.y[j] == piv[j]) distinct = false;
      }
      if (distinct) {
        double ly = kNegInf;
        bool evaluated = true;
        try {
          ly = target.log_density(mv.y);
        } catch (const std::exception&) {
          evaluated = false;
          ++res.failed_evals;
        }
        if (evaluated && std::isfinite(ly)) {
          const double log_a = (ly - lcur) + mv.log_hastings;
          if (log_a >= 0.0 || std::log(rng.uniform()) < log_a) {
            cur = std::move(mv.y);
            lcur = ly;
            accept = true;
          }
        }
      }
    }
    if (accept) ++accepted;
    res.chain.push_back(x);
    res.log_density.push_back(lx);
  }
  res.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(iterations);
  return res;
}

}  // namespace ogtt
