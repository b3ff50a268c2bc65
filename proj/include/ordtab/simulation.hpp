#pragma once

#include <string>
#include <vector>

#include "ordtab/comparator.hpp"
#include "ordtab/io.hpp"

namespace ordtab {

// Cohen's effect size h for two proportions: |2 asin sqrt(p1) - 2 asin
// sqrt(p2)|. Both arguments must lie strictly inside (0,1).
double effect_size_h(double p1, double p2);

// Nearest canonical band: "S" (0.2), "M" (0.5), "L" (0.8), "XL" (>= 1).
std::string classify_effect_size(double h);

// One simulation scenario: equal per-row sample sizes and strictly
// decreasing true success probabilities (data generated under the
// constrained model).
struct SimScenario {
  std::string label;
  long long n_star = 0;
  std::vector<double> probs;

  int rows() const { return static_cast<int>(probs.size()); }
  void validate() const;
};

// Built-in scenarios: S1..XL3 for 2x2 tables and S1-3x2..XL3-3x2 for 3x2,
// with the conventional power-based sample sizes (392/63/25/13 and
// 441/71/28/15).
const std::vector<SimScenario>& builtin_scenarios();
SimScenario scenario_by_name(const std::string& name);

struct SimulationReport {
  SimScenario scenario;
  int replicates = 0;
  std::uint64_t seed = 0;
  long long samples = 0;
  long long burnin = 0;
  std::vector<double> q_values;
  std::vector<ModelSet> sets;
  // medians[qi][si] lists per-model medians across replicates.
  std::vector<std::vector<std::vector<ModelProbability>>> medians;
};

// Replicates fan out to a bounded worker pool; replicate k draws its table
// from stream (seed, data-role, k) and analyzes it with replicate-scoped
// estimator streams, so any schedule produces the same report. Aggregation
// is a per-cell median across replicates.
SimulationReport run_simulation(const SimScenario& scenario, const McConfig& mc,
                                const std::vector<double>& q_values,
                                int replicates,
                                const std::vector<ModelSet>& sets);

std::string emit_simulation_report(const SimulationReport& report,
                                   ReportFormat format);

}  // namespace ordtab
