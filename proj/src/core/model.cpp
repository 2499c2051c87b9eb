#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "core/errors.hpp"

namespace ogtt {
namespace {

using Y = std::array<double, 5>;                    // G, I, L, D, V
using Cont = std::array<std::array<double, 5>, 5>;  // dense coefficients

inline bool all_finite(const Y& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Model right-hand side.  Glucose above basal drives insulin action, below
// basal drives counter-regulation; the gut drains into blood at rate D/theta2
// and is fed by the remaining load V.
inline Y rhs(const Y& y, const PatientParams& p, const ModelConstants& mc) {
  const double above = std::max(y[0] - mc.g_b, 0.0);
  const double below = std::max(mc.g_b - y[0], 0.0);
  return Y{y[2] - y[1] + y[3] / p.theta2,
           p.theta0 * above - y[1] / mc.a,
           p.theta1 * below - y[2] / mc.b,
           -y[3] / p.theta2 + 2.0 * y[4] / mc.c,
           -2.0 * y[4] / mc.c};
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

constexpr double kAtol = 1e-8, kRtol = 1e-8;
constexpr int kMaxSteps = 500000;

inline double dense_eval(const Cont& r, int i, double th) {
  const double th1 = 1.0 - th;
  return r[0][i] +
         th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
}

double error_norm(const Y& y0, const Y& y1, const Y& err) {
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc =
        kAtol + kRtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = err[i] / sc;
    s += e * e;
  }
  return std::sqrt(s / 5.0);
}

double initial_step(const Y& y0, const Y& f0, const PatientParams& p,
                    const ModelConstants& mc, double t_end) {
  double d0 = 0.0, dd1 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc = kAtol + kRtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    dd1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / 5.0);
  dd1 = std::sqrt(dd1 / 5.0);
  double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
  h0 = std::min(h0, t_end);
  Y y1;
  for (int i = 0; i < 5; ++i) y1[i] = y0[i] + h0 * f0[i];
  const Y f1 = rhs(y1, p, mc);
  double dd2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double sc = kAtol + kRtol * std::abs(y0[i]);
    const double df = (f1[i] - f0[i]) / sc;
    dd2 += df * df;
  }
  dd2 = std::sqrt(dd2 / 5.0) / h0;
  const double dm = std::max(dd1, dd2);
  const double h1 =
      dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, t_end});
}

// Adaptive loop.  Sink gets start(y0), one step(t0, h, t1, y0, y1, cont) per
// accepted step, and finish(t_end, y_end).
template <class Sink>
void integrate(const PatientParams& p, const ModelConstants& mc, double t_end,
               Sink&& sink) {
  p.validate();
  mc.validate();
  if (!(std::isfinite(t_end) && t_end > 0.0))
    throw InputError("integrate: horizon must be positive and finite");

  Y y{p.g0, 0.0, 0.0, 0.0, mc.v0};
  Y k1 = rhs(y, p, mc);
  double h = initial_step(y, k1, p, mc, t_end);
  double t = 0.0;
  sink.start(y);

  int nstep = 0;
  while (t < t_end) {
    if (++nstep > kMaxSteps)
      throw IntegrationError("integrate: step budget exhausted", t);
    if (!(h > 1e-14 * std::max(1.0, t)))
      throw IntegrationError("integrate: step size underflow", t);
    bool last = (t + h >= t_end);
    if (last) h = t_end - t;

    Y k2, k3, k4, k5, k6, k7, yn, ye, w;
    for (int i = 0; i < 5; ++i) w[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(w, p, mc);
    for (int i = 0; i < 5; ++i)
      w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(w, p, mc);
    for (int i = 0; i < 5; ++i)
      w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(w, p, mc);
    for (int i = 0; i < 5; ++i)
      w[i] = y[i] +
             h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(w, p, mc);
    for (int i = 0; i < 5; ++i)
      w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                         a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(w, p, mc);
    for (int i = 0; i < 5; ++i)
      yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    k7 = rhs(yn, p, mc);
    for (int i = 0; i < 5; ++i)
      ye[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                   e6 * k6[i] + e7 * k7[i]);

    const bool finite = all_finite(yn) && all_finite(k7) && all_finite(ye);
    const double en =
        finite ? error_norm(y, yn, ye)
               : std::numeric_limits<double>::infinity();
    if (en <= 1.0) {
      Cont r;
      for (int i = 0; i < 5; ++i) {
        const double dy = yn[i] - y[i];
        const double bspl = h * k1[i] - dy;
        r[0][i] = y[i];
        r[1][i] = dy;
        r[2][i] = bspl;
        r[3][i] = dy - h * k7[i] - bspl;
        r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                       d6 * k6[i] + d7 * k7[i]);
      }
      const double t0 = t;
      t = last ? t_end : t + h;
      sink.step(t0, h, t, y, yn, r);
      y = yn;
      k1 = k7;  // first-same-as-last
      h *= std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 10.0);
    } else {
      const double fac =
          std::isfinite(en)
              ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 0.9)
              : 0.2;
      h *= fac;
    }
  }
  sink.finish(t_end, y);
}

GlucoseState to_state(const Y& y) {
  return GlucoseState{y[0], y[1], y[2], y[3], y[4]};
}

struct TimeProbe {
  std::span<const double> ts;  // sorted ascending
  std::span<double> out;
  size_t idx = 0;

  void start(const Y& y0) {
    while (idx < ts.size() && ts[idx] <= 0.0) out[idx++] = y0[0];
  }
  void step(double t0, double h, double t1, const Y&, const Y&,
            const Cont& r) {
    while (idx < ts.size() && ts[idx] <= t1 + 1e-12) {
      const double th = std::clamp((ts[idx] - t0) / h, 0.0, 1.0);
      out[idx++] = dense_eval(r, 0, th);
    }
  }
  void finish(double, const Y&) {}
};

}  // namespace

class TrajectoryBuilder {
 public:
  explicit TrajectoryBuilder(Trajectory& tr) : tr_(tr) {}
  void start(const Y& y0) {
    tr_.knot_times_.push_back(0.0);
    tr_.knot_states_.push_back(to_state(y0));
  }
  void step(double t0, double h, double t1, const Y&, const Y& y1,
            const Cont& r) {
    tr_.steps_.push_back(Trajectory::DenseStep{t0, h, r});
    tr_.knot_times_.push_back(t1);
    tr_.knot_states_.push_back(to_state(y1));
  }
  void finish(double t_end, const Y&) { tr_.t_end_ = t_end; }

 private:
  Trajectory& tr_;
};

void ModelConstants::validate() const {
  auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!pos(a) || !pos(b) || !pos(c) || !pos(g_b))
    throw InputError("model constants: a, b, c, g_b must be positive");
  if (!(std::isfinite(v0) && v0 >= 0.0))
    throw InputError("model constants: v0 must be nonnegative");
}

void PatientParams::validate() const {
  if (!(std::isfinite(theta0) && theta0 >= 0.0))
    throw InputError("patient params: theta0 must be nonnegative");
  if (!(std::isfinite(theta1) && theta1 >= 0.0))
    throw InputError("patient params: theta1 must be nonnegative");
  if (!(std::isfinite(theta2) && theta2 > 0.0))
    throw InputError("patient params: theta2 must be positive");
  if (!(std::isfinite(g0) && g0 > 0.0))
    throw InputError("patient params: g0 must be positive");
}

GlucoseState Trajectory::at(double t) const {
  if (steps_.empty()) throw InputError("trajectory: empty");
  if (!(t >= 0.0 && t <= t_end_ + 1e-12))
    throw InputError("trajectory: time outside [0, t_end]");
  t = std::min(t, t_end_);
  // Last step whose start is <= t.
  size_t lo = 0, hi = steps_.size();
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (steps_[mid].t0 <= t)
      lo = mid;
    else
      hi = mid;
  }
  const DenseStep& s = steps_[lo];
  const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
  return GlucoseState{dense_eval(s.r, 0, th), dense_eval(s.r, 1, th),
                      dense_eval(s.r, 2, th), dense_eval(s.r, 3, th),
                      dense_eval(s.r, 4, th)};
}

Trajectory solve_forward(const PatientParams& p, const ModelConstants& mc,
                         double t_end_hours) {
  Trajectory tr;
  TrajectoryBuilder builder(tr);
  integrate(p, mc, t_end_hours, builder);
  return tr;
}

void glucose_at_sorted_times(const PatientParams& p, const ModelConstants& mc,
                             std::span<const double> ts,
                             std::span<double> out) {
  if (ts.size() != out.size())
    throw InputError("glucose_at_sorted_times: size mismatch");
  if (ts.empty()) return;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (!(std::isfinite(ts[i]) && ts[i] >= 0.0))
      throw InputError("glucose_at_sorted_times: times must be >= 0");
    if (i > 0 && ts[i] < ts[i - 1])
      throw InputError("glucose_at_sorted_times: times must be sorted");
  }
  if (ts.back() <= 0.0) {
    p.validate();
    mc.validate();
    for (size_t i = 0; i < out.size(); ++i) out[i] = p.g0;
    return;
  }
  TimeProbe probe{ts, out};
  integrate(p, mc, ts.back(), probe);
  if (probe.idx != ts.size())
    throw ContractError("glucose_at_sorted_times: probe missed a time");
}

std::vector<double> glucose_at_times(const PatientParams& p,
                                     const ModelConstants& mc,
                                     std::span<const double> times) {
  std::vector<size_t> order(times.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return times[a] < times[b]; });
  std::vector<double> sorted(times.size()), val(times.size());
  for (size_t i = 0; i < order.size(); ++i) sorted[i] = times[order[i]];
  glucose_at_sorted_times(p, mc, sorted, val);
  std::vector<double> out(times.size());
  for (size_t i = 0; i < order.size(); ++i) out[order[i]] = val[i];
  return out;
}

}  // namespace ogtt
