#include "ordtab/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ordtab {

namespace {

// Stirling-series correction: ln G(z) = (z - 1/2) ln z - z + ln(2 pi)/2 + S(z).
double stirling_correction(double z) {
  const double z2 = z * z;
  const double inv = 1.0 / z;
  return inv * (1.0 / 12.0 +
                (-1.0 / 360.0 +
                 (1.0 / 1260.0 + (-1.0 / 1680.0 + (1.0 / 1188.0) / z2) / z2) /
                     z2) /
                    z2);
}

}  // namespace

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_beta: arguments must be strictly positive");
  }
  const double lo = std::min(a, b), hi = std::max(a, b);
  if (hi < 50.0) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  }
  // For a large argument the direct lgamma difference cancels away most of
  // the significant digits; combine the Stirling leading terms analytically:
  //   ln G(hi) - ln G(hi+lo) =
  //     -(hi - 1/2) log1p(lo/hi) - lo ln(hi+lo) + lo + S(hi) - S(hi+lo).
  return std::lgamma(lo) - (hi - 0.5) * std::log1p(lo / hi) -
         lo * std::log(hi + lo) + lo + stirling_correction(hi) -
         stirling_correction(hi + lo);
}

double log_mvbeta(std::span<const double> alpha) {
  if (alpha.size() < 2) {
    throw std::domain_error("log_mvbeta: need at least two components");
  }
  double sum = 0.0, acc = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) {
      throw std::domain_error("log_mvbeta: components must be strictly positive");
    }
    sum += a;
    acc += std::lgamma(a);
  }
  return acc - std::lgamma(sum);
}

double log_choose(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) {
    throw std::domain_error("log_choose: need 0 <= k <= n");
  }
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_multinomial_coef(long long total, std::span<const long long> counts) {
  long long sum = 0;
  double acc = std::lgamma(static_cast<double>(total) + 1.0);
  for (long long c : counts) {
    if (c < 0) throw std::domain_error("log_multinomial_coef: negative count");
    sum += c;
    acc -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  if (sum != total) {
    throw std::domain_error("log_multinomial_coef: counts do not sum to total");
  }
  return acc;
}

double log_binomial_pmf(long long k, long long n, double p) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (p < 0.0 || p > 1.0) {
    throw std::domain_error("log_binomial_pmf: p outside [0,1]");
  }
  double lp = log_choose(n, k);
  if (k > 0) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    lp += static_cast<double>(k) * std::log(p);
  }
  if (n - k > 0) {
    if (p == 1.0) return -std::numeric_limits<double>::infinity();
    lp += static_cast<double>(n - k) * std::log1p(-p);
  }
  return lp;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace ordtab
