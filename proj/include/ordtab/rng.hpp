#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ordtab {

// Seedable random stream. One RngStream per independent Monte Carlo task;
// identical (seed, stream_id) reproduces the exact variate sequence across
// runs and platforms, so all variate transformations are implemented here
// by hand rather than delegated to the (implementation-defined)
// std::*_distribution classes. The engine itself (mt19937_64) is fully
// pinned down by the standard.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal (Box-Muller; second variate cached).
  double normal();

  // Gamma(shape, 1), shape > 0 (Marsaglia-Tsang squeeze).
  double gamma(double shape);

  // Beta(a, b), a, b > 0, via a pair of Gamma variates.
  double beta(double a, double b);

  // Dirichlet(alpha) as normalized Gammas; components sum to 1 exactly
  // up to rounding.
  std::vector<double> dirichlet(std::span<const double> alpha);

  // Binomial(trials, p) as a Bernoulli count: exact for all 0 <= p <= 1,
  // O(trials). Trial counts in this code base are at most a few thousand.
  long long binomial(long long trials, double p);

  // Multinomial(total, p) by conditional binomials. p must lie on the
  // simplex within 1e-9 (domain error otherwise).
  std::vector<long long> multinomial(long long total, std::span<const double> p);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Deterministic stream layout used by the orchestration layers: one stream
// per (q index, estimator role, replicate), independent of scheduling order.
enum class StreamRole : std::uint64_t {
  kBfE0 = 1,
  kPriorConstraint = 2,
  kPosteriorConstraint = 3,
  kSimulationData = 4,
};

std::uint64_t make_stream_id(std::size_t q_index, StreamRole role,
                             std::size_t replicate = 0);

}  // namespace ordtab
