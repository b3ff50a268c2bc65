#include "ordtab/multinomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "ordtab/special.hpp"

namespace ordtab {

namespace {

constexpr double kEnumerationBudget = 1e6;

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

// Visit every composition of t over `cells` slots.
void for_each_composition(
    long long t, int cells,
    const std::function<void(std::span<const long long>)>& fn) {
  std::vector<long long> x(static_cast<std::size_t>(cells), 0);
  std::function<void(int, long long)> rec = [&](int k, long long remaining) {
    if (k == cells - 1) {
      x[static_cast<std::size_t>(k)] = remaining;
      fn(x);
      return;
    }
    for (long long v = 0; v <= remaining; ++v) {
      x[static_cast<std::size_t>(k)] = v;
      rec(k + 1, remaining - v);
    }
  };
  rec(0, t);
}

void margins_of(std::span<const long long> x, int rows, int cols,
                std::vector<double>& row_m, std::vector<double>& col_m) {
  row_m.assign(static_cast<std::size_t>(rows), 0.0);
  col_m.assign(static_cast<std::size_t>(cols), 0.0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = static_cast<double>(x[static_cast<std::size_t>(i) * cols + j]);
      row_m[static_cast<std::size_t>(i)] += v;
      col_m[static_cast<std::size_t>(j)] += v;
    }
  }
}

}  // namespace

MultinomialTable::MultinomialTable(int rows, int cols,
                                   std::vector<long long> counts_row_major)
    : rows_(rows), cols_(cols), counts_(std::move(counts_row_major)) {
  if (rows_ < 2 || cols_ < 2) {
    throw std::invalid_argument("multinomial table: need at least 2x2");
  }
  if (counts_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw std::invalid_argument("multinomial table: count grid size mismatch");
  }
  row_sums_.assign(static_cast<std::size_t>(rows_), 0);
  col_sums_.assign(static_cast<std::size_t>(cols_), 0);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      const long long v = at(i, j);
      if (v < 0) throw std::invalid_argument("multinomial table: negative count");
      row_sums_[static_cast<std::size_t>(i)] += v;
      col_sums_[static_cast<std::size_t>(j)] += v;
      total_ += v;
    }
  }
  if (total_ < 1) {
    throw std::invalid_argument("multinomial table: grand total must be >= 1");
  }
}

MultinomialHyper MultinomialHyper::uniform(int rows, int cols) {
  MultinomialHyper h;
  h.a_cells.assign(static_cast<std::size_t>(rows) * cols, 1.0);
  h.a_rows.assign(static_cast<std::size_t>(rows), 1.0);
  h.a_cols.assign(static_cast<std::size_t>(cols), 1.0);
  return h;
}

void MultinomialHyper::validate(int rows, int cols) const {
  if (a_cells.size() != static_cast<std::size_t>(rows) * cols ||
      a_rows.size() != static_cast<std::size_t>(rows) ||
      a_cols.size() != static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("hyperparameters: dimension mismatch");
  }
  auto positive = [](std::span<const double> v) {
    for (double a : v) {
      if (!(a > 0.0)) return false;
    }
    return true;
  };
  if (!positive(a_cells) || !positive(a_rows) || !positive(a_cols)) {
    throw std::invalid_argument("hyperparameters must be strictly positive");
  }
}

bool MultinomialHyper::all_unit() const {
  auto unit = [](std::span<const double> v) {
    for (double a : v) {
      if (a != 1.0) return false;
    }
    return true;
  };
  return unit(a_cells) && unit(a_rows) && unit(a_cols);
}

double log_marginal_null_mult(const MultinomialTable& table,
                              const MultinomialHyper& hyper) {
  hyper.validate(table.rows(), table.cols());
  std::vector<double> ar(hyper.a_rows), ac(hyper.a_cols);
  for (int i = 0; i < table.rows(); ++i) {
    ar[static_cast<std::size_t>(i)] += static_cast<double>(table.row_sums()[i]);
  }
  for (int j = 0; j < table.cols(); ++j) {
    ac[static_cast<std::size_t>(j)] += static_cast<double>(table.col_sums()[j]);
  }
  return log_multinomial_coef(table.total(), table.counts()) +
         log_mvbeta(ar) - log_mvbeta(hyper.a_rows) +
         log_mvbeta(ac) - log_mvbeta(hyper.a_cols);
}

double log_marginal_encompassing_mult(const MultinomialTable& table,
                                      const MultinomialHyper& hyper) {
  hyper.validate(table.rows(), table.cols());
  std::vector<double> a(hyper.a_cells);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] += static_cast<double>(table.counts()[k]);
  }
  return log_multinomial_coef(table.total(), table.counts()) +
         log_mvbeta(a) - log_mvbeta(hyper.a_cells);
}

double bf_default_e0_mult(const MultinomialTable& table,
                          const MultinomialHyper& hyper) {
  return std::exp(log_marginal_encompassing_mult(table, hyper) -
                  log_marginal_null_mult(table, hyper));
}

double composition_count(long long t, int cells) {
  return std::exp(log_choose(t + cells - 1, cells - 1));
}

double log_h_weight_mult(const MultinomialTable& table,
                         const MultinomialHyper& hyper, long long t,
                         std::span<const long long> x) {
  const int r = table.rows(), c = table.cols();
  std::vector<double> row_m, col_m;
  margins_of(x, r, c, row_m, col_m);
  for (int i = 0; i < r; ++i) row_m[static_cast<std::size_t>(i)] += hyper.a_rows[static_cast<std::size_t>(i)];
  for (int j = 0; j < c; ++j) col_m[static_cast<std::size_t>(j)] += hyper.a_cols[static_cast<std::size_t>(j)];
  std::vector<double> a_x(hyper.a_cells), a_xy(hyper.a_cells);
  for (std::size_t k = 0; k < a_x.size(); ++k) {
    a_x[k] += static_cast<double>(x[k]);
    a_xy[k] += static_cast<double>(x[k]) + static_cast<double>(table.counts()[k]);
  }
  return log_multinomial_coef(t, x) + log_mvbeta(row_m) + log_mvbeta(col_m) +
         log_mvbeta(a_xy) - log_mvbeta(a_x);
}

double bf_intrinsic_e0_mult_exact(const MultinomialTable& table,
                                  const MultinomialHyper& hyper, long long t) {
  hyper.validate(table.rows(), table.cols());
  if (t < 0) throw config_error("training total must be nonnegative");
  if (!hyper.all_unit()) {
    throw config_error(
        "closed-form intrinsic BF is defined for unit hyperparameters; use "
        "the Monte Carlo estimator");
  }
  const int r = table.rows(), c = table.cols(), cells = r * c;
  if (composition_count(t, cells) > kEnumerationBudget) {
    throw budget_exceeded(
        "intrinsic BF enumeration exceeds the term budget; use the Monte "
        "Carlo estimator");
  }
  const double n = static_cast<double>(table.total());
  const double td = static_cast<double>(t);
  double prefactor = std::lgamma(td + cells) + std::lgamma(n + r) +
                     std::lgamma(n + c) - std::lgamma(td + n + cells) -
                     std::lgamma(td + r) - std::lgamma(td + c);
  double log_y_margin_fact = 0.0;
  for (long long yr : table.row_sums()) log_y_margin_fact += std::lgamma(static_cast<double>(yr) + 1.0);
  for (long long yc : table.col_sums()) log_y_margin_fact += std::lgamma(static_cast<double>(yc) + 1.0);

  std::vector<double> terms;
  std::vector<double> row_m, col_m;
  for_each_composition(t, cells, [&](std::span<const long long> x) {
    margins_of(x, r, c, row_m, col_m);
    double lt = log_multinomial_coef(t, x) - log_y_margin_fact;
    for (double v : row_m) lt += std::lgamma(v + 1.0);
    for (double v : col_m) lt += std::lgamma(v + 1.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double xk = static_cast<double>(x[k]);
      const double yk = static_cast<double>(table.counts()[k]);
      lt += std::lgamma(xk + yk + 1.0) - std::lgamma(xk + 1.0);
    }
    terms.push_back(lt);
  });
  return std::exp(prefactor + log_sum_exp(terms));
}

HMixtureMult enumerate_h_mixture_mult(const MultinomialTable& table,
                                      const MultinomialHyper& hyper,
                                      long long t) {
  hyper.validate(table.rows(), table.cols());
  const int cells = table.rows() * table.cols();
  if (composition_count(t, cells) > kEnumerationBudget) {
    throw budget_exceeded("H-mixture enumeration exceeds the term budget");
  }
  HMixtureMult mix;
  std::vector<double> lw;
  for_each_composition(t, cells, [&](std::span<const long long> x) {
    mix.components.emplace_back(x.begin(), x.end());
    lw.push_back(log_h_weight_mult(table, hyper, t, x));
  });
  const double lse = log_sum_exp(lw);
  mix.weights.reserve(lw.size());
  for (double v : lw) mix.weights.push_back(std::exp(v - lse));
  return mix;
}

HMixtureMult enumerate_prior_mixture_mult(const MultinomialHyper& hyper,
                                          int rows, int cols, long long t) {
  hyper.validate(rows, cols);
  const int cells = rows * cols;
  if (composition_count(t, cells) > kEnumerationBudget) {
    throw budget_exceeded("prior-mixture enumeration exceeds the term budget");
  }
  HMixtureMult mix;
  std::vector<double> lw;
  std::vector<double> row_m, col_m;
  for_each_composition(t, cells, [&](std::span<const long long> x) {
    margins_of(x, rows, cols, row_m, col_m);
    for (int i = 0; i < rows; ++i) row_m[static_cast<std::size_t>(i)] += hyper.a_rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < cols; ++j) col_m[static_cast<std::size_t>(j)] += hyper.a_cols[static_cast<std::size_t>(j)];
    double acc = log_multinomial_coef(t, x) + log_mvbeta(row_m) +
                 log_mvbeta(col_m) - log_mvbeta(hyper.a_rows) -
                 log_mvbeta(hyper.a_cols);
    mix.components.emplace_back(x.begin(), x.end());
    lw.push_back(acc);
  });
  const double lse = log_sum_exp(lw);
  mix.weights.reserve(lw.size());
  for (double v : lw) mix.weights.push_back(std::exp(v - lse));
  return mix;
}

McEstimate bf_intrinsic_e0_mult(const MultinomialTable& table,
                                const MultinomialHyper& hyper, long long t,
                                const McConfig& mc, RngStream rng) {
  hyper.validate(table.rows(), table.cols());
  mc.validate();
  if (t < 0) throw config_error("training total must be nonnegative");
  if (t == 0) return exact_value(bf_default_e0_mult(table, hyper));
  if (hyper.all_unit() &&
      composition_count(t, table.rows() * table.cols()) <= kEnumerationBudget) {
    return exact_value(bf_intrinsic_e0_mult_exact(table, hyper, t));
  }
  return bf_intrinsic_e0_mult_is(table, hyper, t, mc, std::move(rng));
}

McEstimate bf_intrinsic_e0_mult_is(const MultinomialTable& table,
                                   const MultinomialHyper& hyper, long long t,
                                   const McConfig& mc, RngStream rng) {
  hyper.validate(table.rows(), table.cols());
  mc.validate();
  if (t < 0) throw config_error("training total must be nonnegative");
  if (t == 0) return exact_value(bf_default_e0_mult(table, hyper));
  const int r = table.rows(), c = table.cols(), cells = r * c;

  // Importance sampling against a Multinomial candidate at the smoothed
  // frequencies; the candidate's coefficient cancels the one in the summand.
  const double n = static_cast<double>(table.total());
  std::vector<double> pi_hat(static_cast<std::size_t>(cells));
  std::vector<double> log_pi_hat(static_cast<std::size_t>(cells));
  for (int k = 0; k < cells; ++k) {
    pi_hat[static_cast<std::size_t>(k)] =
        (static_cast<double>(table.counts()[k]) + 1.0) / (n + cells);
    log_pi_hat[static_cast<std::size_t>(k)] = std::log(pi_hat[static_cast<std::size_t>(k)]);
  }
  std::vector<double> ar(hyper.a_rows), ac(hyper.a_cols);
  for (int i = 0; i < r; ++i) ar[static_cast<std::size_t>(i)] += static_cast<double>(table.row_sums()[i]);
  for (int j = 0; j < c; ++j) ac[static_cast<std::size_t>(j)] += static_cast<double>(table.col_sums()[j]);
  const double log_denom = log_mvbeta(ar) + log_mvbeta(ac);

  const long long S = mc.samples;
  std::vector<double> lw(static_cast<std::size_t>(S));
  std::vector<double> row_m, col_m;
  std::vector<double> a_x(hyper.a_cells), a_xy(hyper.a_cells);
  for (long long s = 0; s < S; ++s) {
    const std::vector<long long> x = rng.multinomial(t, pi_hat);
    margins_of(x, r, c, row_m, col_m);
    for (int i = 0; i < r; ++i) row_m[static_cast<std::size_t>(i)] += hyper.a_rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < c; ++j) col_m[static_cast<std::size_t>(j)] += hyper.a_cols[static_cast<std::size_t>(j)];
    double acc = log_mvbeta(row_m) + log_mvbeta(col_m) - log_denom;
    for (std::size_t k = 0; k < a_x.size(); ++k) {
      a_x[k] = hyper.a_cells[k] + static_cast<double>(x[k]);
      a_xy[k] = a_x[k] + static_cast<double>(table.counts()[k]);
      acc -= static_cast<double>(x[k]) * log_pi_hat[k];
    }
    acc += log_mvbeta(a_xy) - log_mvbeta(a_x);
    lw[static_cast<std::size_t>(s)] = acc;
  }

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

McEstimate prior_constraint_prob_mult(const MultinomialHyper& hyper, int rows,
                                      int cols, long long t,
                                      const ConstraintExpr& constraint,
                                      const McConfig& mc, RngStream rng) {
  hyper.validate(rows, cols);
  mc.validate();
  if (t < 0) throw config_error("training total must be nonnegative");
  if (constraint.rows() != rows || !constraint.cols().has_value() ||
      *constraint.cols() != cols) {
    throw std::invalid_argument("constraint does not match the grid dimensions");
  }
  const int cells = rows * cols;
  const long long S = mc.samples;
  std::vector<double> grid(static_cast<std::size_t>(cells));
  std::vector<double> a_post(static_cast<std::size_t>(cells));
  long long hits = 0;
  for (long long s = 0; s < S; ++s) {
    const std::vector<double> pr = rng.dirichlet(hyper.a_rows);
    const std::vector<double> pc = rng.dirichlet(hyper.a_cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        grid[static_cast<std::size_t>(i) * cols + j] = pr[static_cast<std::size_t>(i)] * pc[static_cast<std::size_t>(j)];
      }
    }
    const std::vector<long long> x = rng.multinomial(t, grid);
    for (int k = 0; k < cells; ++k) {
      a_post[static_cast<std::size_t>(k)] =
          hyper.a_cells[static_cast<std::size_t>(k)] + static_cast<double>(x[static_cast<std::size_t>(k)]);
    }
    const std::vector<double> pi = rng.dirichlet(a_post);
    if (constraint.eval_grid(pi, rows, cols)) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(S);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(S))};
}

McEstimate posterior_constraint_prob_mult(const MultinomialTable& table,
                                          const MultinomialHyper& hyper,
                                          long long t,
                                          const ConstraintExpr& constraint,
                                          const McConfig& mc, RngStream rng) {
  const int r = table.rows(), c = table.cols(), cells = r * c;
  hyper.validate(r, c);
  mc.validate();
  if (t < 0) throw config_error("training total must be nonnegative");
  if (constraint.rows() != r || !constraint.cols().has_value() ||
      *constraint.cols() != c) {
    throw std::invalid_argument("constraint does not match the grid dimensions");
  }

  const long long S = mc.samples;
  const long long S1 = mc.resolved_burnin();

  const double n = static_cast<double>(table.total());
  std::vector<double> pi_hat(static_cast<std::size_t>(cells));
  std::vector<double> log_pi_hat(static_cast<std::size_t>(cells));
  for (int k = 0; k < cells; ++k) {
    pi_hat[static_cast<std::size_t>(k)] =
        (static_cast<double>(table.counts()[k]) + 1.0) / (n + cells);
    log_pi_hat[static_cast<std::size_t>(k)] = std::log(pi_hat[static_cast<std::size_t>(k)]);
  }
  auto log_proposal = [&](std::span<const long long> x) {
    double acc = log_multinomial_coef(t, x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      acc += static_cast<double>(x[k]) * log_pi_hat[k];
    }
    return acc;
  };

  std::vector<long long> x = rng.multinomial(t, pi_hat);
  double log_w = log_h_weight_mult(table, hyper, t, x) - log_proposal(x);

  std::vector<char> hits(static_cast<std::size_t>(S), 0);
  std::vector<double> a_post(static_cast<std::size_t>(cells));
  for (long long s = 0; s < S1 + S; ++s) {
    const std::vector<long long> x_prop = rng.multinomial(t, pi_hat);
    const double log_w_prop =
        log_h_weight_mult(table, hyper, t, x_prop) - log_proposal(x_prop);
    const double u = rng.uniform();
    if (std::log(u > 0.0 ? u : std::numeric_limits<double>::min()) <
        log_w_prop - log_w) {
      x = x_prop;
      log_w = log_w_prop;
    }
    if (s >= S1) {
      for (int k = 0; k < cells; ++k) {
        a_post[static_cast<std::size_t>(k)] =
            hyper.a_cells[static_cast<std::size_t>(k)] + static_cast<double>(x[static_cast<std::size_t>(k)]);
      }
      const std::vector<double> pi = rng.dirichlet(a_post);
      hits[static_cast<std::size_t>(s - S1)] = constraint.eval_grid(pi, r, c) ? 1 : 0;
    }
  }
  double est = 0.0;
  for (char h : hits) est += h;
  est /= static_cast<double>(S);
  return {est, batch_means_se(hits)};
}

}  // namespace ordtab
