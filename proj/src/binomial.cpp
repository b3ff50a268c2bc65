#include "ordtab/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "ordtab/special.hpp"

namespace ordtab {

namespace {

constexpr double kEnumerationBudget = 1e6;

// Standard error of a Markov-chain proportion by batch means.
double batch_means_se(std::span<const char> hits) {
  const std::size_t n = hits.size();
  const std::size_t batches = 100;
  if (n < 2 * batches) {
    double p = 0.0;
    for (char h : hits) p += h;
    p /= static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
  const std::size_t len = n / batches;
  double grand = 0.0;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) s += hits[k];
    means[b] = s / static_cast<double>(len);
    grand += means[b];
  }
  grand /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

double enumeration_terms(std::span<const long long> t) {
  double prod = 1.0;
  for (long long ti : t) prod *= static_cast<double>(ti + 1);
  return prod;
}

void check_training(const BinomialTable& table, std::span<const long long> t) {
  if (static_cast<int>(t.size()) != table.rows()) {
    throw config_error("training sizes: row count mismatch");
  }
  for (int i = 0; i < table.rows(); ++i) {
    if (t[i] < 0 || t[i] > table.n()[i]) {
      throw config_error("training size exceeds trials in a row");
    }
  }
}

}  // namespace

BinomialTable::BinomialTable(std::vector<long long> successes,
                             std::vector<long long> trials)
    : y_(std::move(successes)), n_(std::move(trials)) {
  if (y_.size() != n_.size()) {
    throw std::invalid_argument("binomial table: length mismatch");
  }
  if (y_.size() < 2) {
    throw std::invalid_argument("binomial table: need at least two rows");
  }
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (n_[i] < 0 || y_[i] < 0 || y_[i] > n_[i]) {
      throw std::invalid_argument("binomial table: need 0 <= y_i <= n_i");
    }
    s_y_ += y_[i];
    n_total_ += n_[i];
  }
}

BinomialHyper BinomialHyper::uniform(int rows) {
  BinomialHyper h;
  h.a1.assign(rows, 1.0);
  h.a2.assign(rows, 1.0);
  return h;
}

void BinomialHyper::validate(int rows) const {
  if (static_cast<int>(a1.size()) != rows || static_cast<int>(a2.size()) != rows) {
    throw std::invalid_argument("hyperparameters: row count mismatch");
  }
  for (int i = 0; i < rows; ++i) {
    if (!(a1[i] > 0.0) || !(a2[i] > 0.0)) {
      throw std::invalid_argument("hyperparameters must be strictly positive");
    }
  }
  if (!(a01 > 0.0) || !(a02 > 0.0)) {
    throw std::invalid_argument("null hyperparameters must be strictly positive");
  }
}

TrainingSpec TrainingSpec::fraction(double q) {
  if (!(q >= 0.0) || q > 1.0) {
    throw config_error("training fraction must lie in [0,1]");
  }
  TrainingSpec s;
  s.is_fraction_ = true;
  s.q_ = q;
  return s;
}

TrainingSpec TrainingSpec::sizes(std::vector<long long> t) {
  TrainingSpec s;
  s.sizes_ = std::move(t);
  return s;
}

std::vector<long long> TrainingSpec::resolve(const BinomialTable& table) const {
  std::vector<long long> t;
  if (is_fraction_) {
    t.reserve(table.rows());
    for (long long ni : table.n()) {
      // round half to even
      double v = q_ * static_cast<double>(ni);
      t.push_back(std::llrint(v));
    }
  } else {
    t = sizes_;
  }
  check_training(table, t);
  return t;
}

double log_marginal_null(const BinomialTable& table, const BinomialHyper& hyper) {
  hyper.validate(table.rows());
  double lk = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    lk += log_choose(table.n()[i], table.y()[i]);
  }
  const double sy = static_cast<double>(table.total_successes());
  const double nn = static_cast<double>(table.total_trials());
  return lk + log_beta(hyper.a01 + sy, hyper.a02 + nn - sy) -
         log_beta(hyper.a01, hyper.a02);
}

double log_marginal_encompassing(const BinomialTable& table,
                                 const BinomialHyper& hyper) {
  hyper.validate(table.rows());
  double acc = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    const double yi = static_cast<double>(table.y()[i]);
    const double ni = static_cast<double>(table.n()[i]);
    acc += log_choose(table.n()[i], table.y()[i]);
    acc += log_beta(hyper.a1[i] + yi, hyper.a2[i] + ni - yi) -
           log_beta(hyper.a1[i], hyper.a2[i]);
  }
  return acc;
}

double bf_default_e0(const BinomialTable& table, const BinomialHyper& hyper) {
  hyper.validate(table.rows());
  double acc = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    const double yi = static_cast<double>(table.y()[i]);
    const double ni = static_cast<double>(table.n()[i]);
    acc += log_beta(hyper.a1[i] + yi, hyper.a2[i] + ni - yi) -
           log_beta(hyper.a1[i], hyper.a2[i]);
  }
  const double sy = static_cast<double>(table.total_successes());
  const double nn = static_cast<double>(table.total_trials());
  acc -= log_beta(hyper.a01 + sy, hyper.a02 + nn - sy) -
         log_beta(hyper.a01, hyper.a02);
  return std::exp(acc);
}

double log_h_weight(const BinomialTable& table, const BinomialHyper& hyper,
                    std::span<const long long> t, std::span<const long long> x) {
  const long long t_total = [&] {
    long long s = 0;
    for (long long ti : t) s += ti;
    return s;
  }();
  long long s_x = 0;
  double acc = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    const double yi = static_cast<double>(table.y()[i]);
    const double ni = static_cast<double>(table.n()[i]);
    const double xi = static_cast<double>(x[i]);
    const double ti = static_cast<double>(t[i]);
    s_x += x[i];
    acc += log_choose(t[i], x[i]);
    acc += log_beta(hyper.a1[i] + xi + yi, hyper.a2[i] + (ti - xi) + (ni - yi)) -
           log_beta(hyper.a1[i] + xi, hyper.a2[i] + (ti - xi));
  }
  acc += log_beta(hyper.a01 + static_cast<double>(s_x),
                  hyper.a02 + static_cast<double>(t_total - s_x));
  return acc;
}

namespace {

// Visit every imaginary vector x with 0 <= x_i <= t_i.
void for_each_x(std::span<const long long> t,
                const std::function<void(std::span<const long long>)>& fn) {
  std::vector<long long> x(t.size(), 0);
  for (;;) {
    fn(x);
    std::size_t k = 0;
    while (k < x.size()) {
      if (x[k] < t[k]) {
        ++x[k];
        break;
      }
      x[k] = 0;
      ++k;
    }
    if (k == x.size()) return;
  }
}

}  // namespace

double bf_intrinsic_e0_exact(const BinomialTable& table,
                             const BinomialHyper& hyper,
                             std::span<const long long> t) {
  hyper.validate(table.rows());
  check_training(table, t);
  if (enumeration_terms(t) > kEnumerationBudget) {
    throw budget_exceeded(
        "intrinsic BF enumeration exceeds the term budget; use the Monte "
        "Carlo estimator");
  }
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(enumeration_terms(t)));
  for_each_x(t, [&](std::span<const long long> x) {
    terms.push_back(log_h_weight(table, hyper, t, x));
  });
  const double sy = static_cast<double>(table.total_successes());
  const double nn = static_cast<double>(table.total_trials());
  return std::exp(log_sum_exp(terms) -
                  log_beta(hyper.a01 + sy, hyper.a02 + nn - sy));
}

HMixture enumerate_h_mixture(const BinomialTable& table,
                             const BinomialHyper& hyper,
                             std::span<const long long> t) {
  hyper.validate(table.rows());
  check_training(table, t);
  if (enumeration_terms(t) > kEnumerationBudget) {
    throw budget_exceeded("H-mixture enumeration exceeds the term budget");
  }
  HMixture mix;
  std::vector<double> lw;
  for_each_x(t, [&](std::span<const long long> x) {
    mix.components.emplace_back(x.begin(), x.end());
    lw.push_back(log_h_weight(table, hyper, t, x));
  });
  const double lse = log_sum_exp(lw);
  mix.weights.reserve(lw.size());
  for (double v : lw) mix.weights.push_back(std::exp(v - lse));
  return mix;
}

HMixture enumerate_prior_mixture(const BinomialHyper& hyper,
                                 std::span<const long long> t) {
  const int r = static_cast<int>(t.size());
  hyper.validate(r);
  if (enumeration_terms(t) > kEnumerationBudget) {
    throw budget_exceeded("prior-mixture enumeration exceeds the term budget");
  }
  long long t_total = 0;
  for (long long ti : t) t_total += ti;
  HMixture mix;
  std::vector<double> lw;
  for_each_x(t, [&](std::span<const long long> x) {
    long long s_x = 0;
    double acc = 0.0;
    for (int i = 0; i < r; ++i) {
      acc += log_choose(t[i], x[i]);
      s_x += x[i];
    }
    acc += log_beta(hyper.a01 + static_cast<double>(s_x),
                    hyper.a02 + static_cast<double>(t_total - s_x)) -
           log_beta(hyper.a01, hyper.a02);
    mix.components.emplace_back(x.begin(), x.end());
    lw.push_back(acc);
  });
  const double lse = log_sum_exp(lw);
  mix.weights.reserve(lw.size());
  for (double v : lw) mix.weights.push_back(std::exp(v - lse));
  return mix;
}

McEstimate bf_intrinsic_e0(const BinomialTable& table, const BinomialHyper& hyper,
                           std::span<const long long> t, const McConfig& mc,
                           RngStream rng) {
  hyper.validate(table.rows());
  check_training(table, t);
  mc.validate();

  long long t_total = 0;
  for (long long ti : t) t_total += ti;
  if (t_total == 0) return exact_value(bf_default_e0(table, hyper));
  if (enumeration_terms(t) <= kEnumerationBudget) {
    return exact_value(bf_intrinsic_e0_exact(table, hyper, t));
  }
  return bf_intrinsic_e0_is(table, hyper, t, mc, std::move(rng));
}

McEstimate bf_intrinsic_e0_is(const BinomialTable& table,
                              const BinomialHyper& hyper,
                              std::span<const long long> t, const McConfig& mc,
                              RngStream rng) {
  hyper.validate(table.rows());
  check_training(table, t);
  mc.validate();

  long long t_total = 0;
  for (long long ti : t) t_total += ti;
  if (t_total == 0) return exact_value(bf_default_e0(table, hyper));

  const int r = table.rows();
  const double sy = static_cast<double>(table.total_successes());
  const double nn = static_cast<double>(table.total_trials());
  const long long S = mc.samples;

  std::vector<long long> x(r);
  std::vector<double> lw(static_cast<std::size_t>(S));
  for (long long s = 0; s < S; ++s) {
    const double pi = rng.beta(hyper.a01 + sy, hyper.a02 + nn - sy);
    long long s_x = 0;
    double acc = 0.0;
    for (int i = 0; i < r; ++i) {
      x[i] = rng.binomial(t[i], pi);
      s_x += x[i];
      const double yi = static_cast<double>(table.y()[i]);
      const double ni = static_cast<double>(table.n()[i]);
      const double xi = static_cast<double>(x[i]);
      const double ti = static_cast<double>(t[i]);
      acc += log_beta(hyper.a1[i] + xi + yi,
                      hyper.a2[i] + (ti - xi) + (ni - yi)) -
             log_beta(hyper.a1[i] + xi, hyper.a2[i] + (ti - xi));
    }
    const double sx = static_cast<double>(s_x);
    const double tt = static_cast<double>(t_total);
    acc -= log_beta(hyper.a01 + sx + sy, hyper.a02 + (tt - sx) + (nn - sy)) -
           log_beta(hyper.a01 + sx, hyper.a02 + (tt - sx));
    lw[static_cast<std::size_t>(s)] = acc;
  }

  // Shifted moments keep the weight scale inside double range.
  const double m = *std::max_element(lw.begin(), lw.end());
  double s1 = 0.0, s2 = 0.0;
  for (double v : lw) {
    const double e = std::exp(v - m);
    s1 += e;
    s2 += e * e;
  }
  const double mean_shift = s1 / static_cast<double>(S);
  const double var_shift =
      (s2 - s1 * s1 / static_cast<double>(S)) / static_cast<double>(S - 1);
  McEstimate out;
  out.value = std::exp(m) * mean_shift;
  out.se = std::exp(m) * std::sqrt(std::max(0.0, var_shift) / static_cast<double>(S));
  return out;
}

McEstimate prior_constraint_prob(const BinomialHyper& hyper,
                                 std::span<const long long> t,
                                 const ConstraintExpr& constraint,
                                 const McConfig& mc, RngStream rng) {
  const int r = static_cast<int>(t.size());
  hyper.validate(r);
  mc.validate();
  if (constraint.rows() != r || constraint.cols().has_value()) {
    throw std::invalid_argument("constraint does not match a row-probability model");
  }
  const long long S = mc.samples;
  std::vector<double> p(r);
  long long hits = 0;
  for (long long s = 0; s < S; ++s) {
    const double pi_star = rng.beta(hyper.a01, hyper.a02);
    for (int i = 0; i < r; ++i) {
      const long long xi = rng.binomial(t[i], pi_star);
      p[i] = rng.beta(hyper.a1[i] + static_cast<double>(xi),
                      hyper.a2[i] + static_cast<double>(t[i] - xi));
    }
    if (constraint.eval(p)) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(S);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(S))};
}

McEstimate posterior_constraint_prob(const BinomialTable& table,
                                     const BinomialHyper& hyper,
                                     std::span<const long long> t,
                                     const ConstraintExpr& constraint,
                                     const McConfig& mc, RngStream rng) {
  const int r = table.rows();
  hyper.validate(r);
  check_training(table, t);
  mc.validate();
  if (constraint.rows() != r || constraint.cols().has_value()) {
    throw std::invalid_argument("constraint does not match a row-probability model");
  }

  const long long S = mc.samples;
  const long long S1 = mc.resolved_burnin();

  // Independence proposal at pi_hat_i = (y_i + 1) / (s_y + r); in (0,1) by
  // construction.
  std::vector<double> pi_hat(r);
  for (int i = 0; i < r; ++i) {
    pi_hat[i] = (static_cast<double>(table.y()[i]) + 1.0) /
                (static_cast<double>(table.total_successes()) + r);
  }
  auto log_proposal = [&](std::span<const long long> x) {
    double acc = 0.0;
    for (int i = 0; i < r; ++i) acc += log_binomial_pmf(x[i], t[i], pi_hat[i]);
    return acc;
  };
  auto propose = [&](std::vector<long long>& x) {
    for (int i = 0; i < r; ++i) x[i] = rng.binomial(t[i], pi_hat[i]);
  };

  std::vector<long long> x(r), x_prop(r);
  propose(x);
  double log_w = log_h_weight(table, hyper, t, x) - log_proposal(x);

  std::vector<char> hits(static_cast<std::size_t>(S), 0);
  std::vector<double> p(r);
  for (long long s = 0; s < S1 + S; ++s) {
    propose(x_prop);
    const double log_w_prop =
        log_h_weight(table, hyper, t, x_prop) - log_proposal(x_prop);
    const double u = rng.uniform();
    if (std::log(u > 0.0 ? u : std::numeric_limits<double>::min()) <
        log_w_prop - log_w) {
      x = x_prop;
      log_w = log_w_prop;
    }
    if (s >= S1) {
      for (int i = 0; i < r; ++i) {
        p[i] = rng.beta(hyper.a1[i] + static_cast<double>(x[i]),
                        hyper.a2[i] + static_cast<double>(t[i] - x[i]));
      }
      hits[static_cast<std::size_t>(s - S1)] = constraint.eval(p) ? 1 : 0;
    }
  }
  double est = 0.0;
  for (char h : hits) est += h;
  est /= static_cast<double>(S);
  return {est, batch_means_se(hits)};
}

McEstimate bf_ce(const McEstimate& prior_prob, const McEstimate& posterior_prob) {
  if (!(prior_prob.value > 0.0)) {
    throw estimation_failure(
        "prior constraint probability estimated as zero; increase the sample "
        "count");
  }
  McEstimate out;
  out.value = posterior_prob.value / prior_prob.value;
  const double rel_post = posterior_prob.value > 0.0
                              ? posterior_prob.se / posterior_prob.value
                              : 0.0;
  const double rel_prior = prior_prob.se / prior_prob.value;
  if (posterior_prob.value > 0.0) {
    out.se = out.value * std::sqrt(rel_post * rel_post + rel_prior * rel_prior);
  } else {
    out.se = posterior_prob.se / prior_prob.value;
  }
  return out;
}

}  // namespace ordtab
