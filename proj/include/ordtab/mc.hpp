#pragma once

#include <cstdint>
#include <stdexcept>

namespace ordtab {

// A Monte Carlo estimate with its standard error. Deterministic quantities
// (closed forms, exact enumerations) carry se = 0.
struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

inline McEstimate exact_value(double v) { return {v, 0.0}; }

// Sampling effort shared by all estimators. burnin < 0 means "use the
// default of one tenth of samples".
struct McConfig {
  long long samples = 100000;
  long long burnin = -1;
  std::uint64_t seed = 1;

  long long resolved_burnin() const {
    return burnin >= 0 ? burnin : samples / 10;
  }
  void validate() const {
    if (samples < 1) throw std::invalid_argument("mc: samples must be >= 1");
  }
};

// Thrown when a requested exact enumeration exceeds its term budget.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a ratio estimate cannot be formed (zero denominator estimate).
struct estimation_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid estimator configuration (e.g. training sizes exceeding trials).
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace ordtab
