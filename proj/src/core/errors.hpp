#pragma once

#include <stdexcept>
#include <string>

namespace ogtt {

// Error categories map one-to-one onto C API status codes and CLI exit codes.
// InputError: caller handed us something malformed (bad design, bad config,
// parameters outside the model domain). ContractError: a cross-invocation
// contract was violated (e.g. extending an estimate with a different inner
// sample count). The others are runtime failures of the named stage.

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrationError : std::runtime_error {
  double t_fail;  // hours; time at which the integrator gave up
  IntegrationError(const std::string& msg, double t)
      : std::runtime_error(msg), t_fail(t) {}
};

}  // namespace ogtt
