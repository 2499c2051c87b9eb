#pragma once

#include <array>
#include <span>
#include <vector>

namespace ogtt {

// Fixed physiological constants of the glucose model.  Time unit is hours,
// glucose in mg/dl.
struct ModelConstants {
  double a = 0.5;     // insulin action decay time [h]
  double b = 0.5;     // counter-regulation (glucagon) decay time [h]
  double c = 0.2;     // gut transfer time [h]
  double g_b = 80.0;  // basal glucose [mg/dl]
  double v0 = 100.0;  // ingested glucose load, blood-concentration units

  void validate() const;  // throws InputError
};

// Patient parameters: theta0 insulin sensitivity, theta1 counter-regulation
// gain, theta2 stomach emptying time [h], g0 fasting glucose [mg/dl].
struct PatientParams {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.5;
  double g0 = 80.0;

  void validate() const;  // model-domain checks only (theta2 > 0, finite)
};

struct GlucoseState {
  double g;  // blood glucose
  double i;  // insulin action
  double l;  // counter-regulation action
  double d;  // glucose in gut
  double v;  // glucose still to be emptied into the gut
};

// Solution with dense output: evaluable at any t in [0, t_end].
class Trajectory {
 public:
  double t_end() const { return t_end_; }
  GlucoseState at(double t_hours) const;
  double glucose(double t_hours) const { return at(t_hours).g; }

  // Accepted integrator knots (first is 0) and states there.
  const std::vector<double>& times() const { return knot_times_; }
  const std::vector<GlucoseState>& states() const { return knot_states_; }

 private:
  friend class TrajectoryBuilder;
  struct DenseStep {
    double t0, h;
    std::array<std::array<double, 5>, 5> r;  // contd5 coefficients
  };
  std::vector<DenseStep> steps_;
  std::vector<double> knot_times_;
  std::vector<GlucoseState> knot_states_;
  double t_end_ = 0.0;
};

// Integrate the model over [0, t_end_hours] with the adaptive embedded 5(4)
// pair (atol = rtol = 1e-8).  Throws IntegrationError if the step size
// underflows or the step budget is exhausted.
Trajectory solve_forward(const PatientParams& p, const ModelConstants& mc,
                         double t_end_hours);

// Glucose at arbitrary times (hours, all >= 0).  Convenience wrapper.
std::vector<double> glucose_at_times(const PatientParams& p,
                                     const ModelConstants& mc,
                                     std::span<const double> times_hours);

// Hot path for the likelihood: times must be sorted ascending, out the same
// length.  Evaluates measurement times on the fly without storing the
// trajectory.
void glucose_at_sorted_times(const PatientParams& p, const ModelConstants& mc,
                             std::span<const double> sorted_times_hours,
                             std::span<double> out);

}  // namespace ogtt
