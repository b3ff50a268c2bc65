#pragma once

#include <span>
#include <vector>

#include "ordtab/constraint.hpp"
#include "ordtab/mc.hpp"
#include "ordtab/rng.hpp"

namespace ordtab {

// A full r x c contingency table under joint multinomial sampling.
class MultinomialTable {
 public:
  MultinomialTable(int rows, int cols, std::vector<long long> counts_row_major);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  long long at(int i, int j) const { return counts_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::span<const long long> counts() const { return counts_; }
  std::span<const long long> row_sums() const { return row_sums_; }
  std::span<const long long> col_sums() const { return col_sums_; }
  long long total() const { return total_; }

 private:
  int rows_, cols_;
  std::vector<long long> counts_;
  std::vector<long long> row_sums_, col_sums_;
  long long total_ = 0;
};

// Dirichlet hyperparameters: a full r x c matrix for the encompassing cell
// probabilities and one vector per margin under the independence null.
struct MultinomialHyper {
  std::vector<double> a_cells;  // row-major, r*c
  std::vector<double> a_rows;   // r
  std::vector<double> a_cols;   // c

  static MultinomialHyper uniform(int rows, int cols);
  void validate(int rows, int cols) const;
  // True when every entry equals 1 (the case covered by the closed-form
  // Gamma-prefactor expression).
  bool all_unit() const;
};

// ln m(y | independence null), including the multinomial coefficient.
double log_marginal_null_mult(const MultinomialTable& table,
                              const MultinomialHyper& hyper);

// ln m(y | encompassing), same convention.
double log_marginal_encompassing_mult(const MultinomialTable& table,
                                      const MultinomialHyper& hyper);

// Default-prior Bayes factor (t = 0 case); the coefficient cancels.
double bf_default_e0_mult(const MultinomialTable& table,
                          const MultinomialHyper& hyper);

// Exact intrinsic BF under unit hyperparameters: Gamma prefactor times the
// sum over all r x c imaginary tables with grand total t. Throws
// budget_exceeded when C(t + rc - 1, rc - 1) > 1e6 and config_error for
// non-unit hyperparameters (those route through the Monte Carlo path).
double bf_intrinsic_e0_mult_exact(const MultinomialTable& table,
                                  const MultinomialHyper& hyper, long long t);

// Intrinsic BF estimate: t = 0 is exact for any hyperparameters; unit
// hyperparameters within the enumeration budget are exact as well; the rest
// is importance sampling with a Multinomial candidate at the smoothed
// frequencies (y_ij + 1) / (n + rc), which has full support even for empty
// cells.
McEstimate bf_intrinsic_e0_mult(const MultinomialTable& table,
                                const MultinomialHyper& hyper, long long t,
                                const McConfig& mc, RngStream rng);

// The raw importance sampler behind bf_intrinsic_e0_mult, without the exact
// short-circuits; public for validation against enumeration.
McEstimate bf_intrinsic_e0_mult_is(const MultinomialTable& table,
                                   const MultinomialHyper& hyper, long long t,
                                   const McConfig& mc, RngStream rng);

// Prior probability of the constraint under the intrinsic prior: margins
// from their null Dirichlets, product grid, imaginary table, then a
// pseudo-posterior Dirichlet draw. iid draws.
McEstimate prior_constraint_prob_mult(const MultinomialHyper& hyper, int rows,
                                      int cols, long long t,
                                      const ConstraintExpr& constraint,
                                      const McConfig& mc, RngStream rng);

// Posterior probability of the constraint: Metropolis-within-Gibbs over the
// imaginary table with an independence Multinomial proposal at the smoothed
// frequencies, acceptance ratio H(x'|t,y) q(x) / (H(x|t,y) q(x')), then a
// pseudo-posterior Dirichlet draw per kept state. se by batch means.
McEstimate posterior_constraint_prob_mult(const MultinomialTable& table,
                                          const MultinomialHyper& hyper,
                                          long long t,
                                          const ConstraintExpr& constraint,
                                          const McConfig& mc, RngStream rng);

// ln H(x | t, y) for an imaginary table x (row-major), the unnormalized
// intrinsic-posterior mixture weight. Exposed for enumeration oracles.
double log_h_weight_mult(const MultinomialTable& table,
                         const MultinomialHyper& hyper, long long t,
                         std::span<const long long> x);

// All compositions of t over r*c cells with their normalized weights.
struct HMixtureMult {
  std::vector<std::vector<long long>> components;  // row-major tables
  std::vector<double> weights;
};
HMixtureMult enumerate_h_mixture_mult(const MultinomialTable& table,
                                      const MultinomialHyper& hyper,
                                      long long t);

// Intrinsic-prior mixture: weights are the imaginary tables' marginal
// probabilities under the independence null.
HMixtureMult enumerate_prior_mixture_mult(const MultinomialHyper& hyper,
                                          int rows, int cols, long long t);

// Number of r x c composition tables of t, as a double (for budget checks).
double composition_count(long long t, int cells);

}  // namespace ordtab
