#include "ordtab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ordtab {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed & 0xffffffffu),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream_id & 0xffffffffu),
      static_cast<std::uint32_t>(stream_id >> 32),
  };
  engine_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 is bounded away from 0 so the log is finite.
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost by one and scale back with u^(1/shape).
    double g = gamma(shape + 1.0);
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("beta: shapes must be positive");
  }
  double x = gamma(a);
  double y = gamma(b);
  double s = x + y;
  if (s <= 0.0) {
    // Both Gammas underflowed (only possible for extremely small shapes);
    // fall back on the marginal mean rather than returning NaN.
    return a / (a + b);
  }
  double z = x / s;
  if (z <= 0.0) z = std::nextafter(0.0, 1.0);
  if (z >= 1.0) z = std::nextafter(1.0, 0.0);
  return z;
}

std::vector<double> RngStream::dirichlet(std::span<const double> alpha) {
  if (alpha.size() < 2) {
    throw std::domain_error("dirichlet: need at least two components");
  }
  std::vector<double> g(alpha.size());
  double s = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0)) {
      throw std::domain_error("dirichlet: components must be positive");
    }
    g[k] = gamma(alpha[k]);
    s += g[k];
  }
  if (s <= 0.0) {
    double u = 1.0 / static_cast<double>(alpha.size());
    for (auto& v : g) v = u;
    return g;
  }
  for (auto& v : g) v /= s;
  return g;
}

long long RngStream::binomial(long long trials, double p) {
  if (trials < 0) throw std::domain_error("binomial: negative trial count");
  if (p < 0.0 || p > 1.0) throw std::domain_error("binomial: p outside [0,1]");
  long long count = 0;
  for (long long i = 0; i < trials; ++i) {
    if (uniform() < p) ++count;
  }
  return count;
}

std::vector<long long> RngStream::multinomial(long long total,
                                              std::span<const double> p) {
  if (total < 0) throw std::domain_error("multinomial: negative total");
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::domain_error("multinomial: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::domain_error("multinomial: probabilities do not sum to 1");
  }
  std::vector<long long> counts(p.size(), 0);
  long long remaining = total;
  double mass = 1.0;
  for (std::size_t k = 0; k + 1 < p.size() && remaining > 0; ++k) {
    double cond = p[k] / mass;
    if (cond > 1.0) cond = 1.0;
    if (cond < 0.0) cond = 0.0;
    counts[k] = binomial(remaining, cond);
    remaining -= counts[k];
    mass -= p[k];
    if (mass <= 0.0) mass = 0.0;
  }
  counts[p.size() - 1] = remaining;
  return counts;
}

std::uint64_t make_stream_id(std::size_t q_index, StreamRole role,
                             std::size_t replicate) {
  return (static_cast<std::uint64_t>(replicate) << 24) |
         (static_cast<std::uint64_t>(q_index) << 8) |
         static_cast<std::uint64_t>(role);
}

}  // namespace ordtab
