#pragma once

#include <span>
#include <vector>

namespace ordtab {

// Log-domain special functions. Everything downstream (marginal likelihoods,
// importance weights, Metropolis ratios) is carried on the natural-log scale;
// these are the only places a Gamma function is ever touched.

// ln B(a,b) = ln G(a) + ln G(b) - ln G(a+b).  Requires a, b > 0.
double log_beta(double a, double b);

// ln of the Dirichlet normalizing constant: sum ln G(a_k) - ln G(sum a_k).
// Requires length >= 2 and every component > 0.
double log_mvbeta(std::span<const double> alpha);

// ln C(n, k) for integer 0 <= k <= n.
double log_choose(long long n, long long k);

// ln of the multinomial coefficient total! / prod counts_k!.
// Requires counts nonnegative and summing to total.
double log_multinomial_coef(long long total, std::span<const long long> counts);

// ln P(X = k) for X ~ Binomial(n, p); handles p in {0, 1} exactly.
double log_binomial_pmf(long long k, long long n, double p);

// ln sum_i exp(v_i), stable; -inf for an empty list.
double log_sum_exp(std::span<const double> v);

}  // namespace ordtab
