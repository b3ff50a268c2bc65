#include "ordtab/comparator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace ordtab {

std::string ModelSet::label() const {
  std::string s = "M0";
  if (include_constrained) s += "-Mc";
  if (include_encompassing) s += "-Me";
  return s;
}

void ModelSet::validate() const {
  if (!include_constrained && !include_encompassing) {
    throw std::invalid_argument("model set needs at least one non-null member");
  }
  if ((include_constrained && !(odds_constrained > 0.0)) ||
      (include_encompassing && !(odds_encompassing > 0.0))) {
    throw std::invalid_argument("prior odds must be strictly positive");
  }
}

McEstimate compose_bf_c0(const McEstimate& bf_ce, const McEstimate& bf_e0) {
  if (!(bf_ce.value >= 0.0) || !(bf_e0.value >= 0.0)) {
    throw std::invalid_argument("Bayes factors must be nonnegative");
  }
  McEstimate out;
  out.value = bf_ce.value * bf_e0.value;
  out.se = std::sqrt(bf_ce.se * bf_ce.se * bf_e0.value * bf_e0.value +
                     bf_e0.se * bf_e0.se * bf_ce.value * bf_ce.value);
  return out;
}

std::vector<ModelProbability> posterior_model_probs(const ModelSet& set,
                                                    const McEstimate& bf_e0,
                                                    const McEstimate& bf_ce) {
  set.validate();
  const double e = bf_e0.value, c = bf_ce.value;
  const double pc = set.odds_constrained, pe = set.odds_encompassing;
  const bool has_c = set.include_constrained, has_e = set.include_encompassing;

  const double denom = 1.0 + (has_c ? pc * c * e : 0.0) + (has_e ? pe * e : 0.0);
  // Partials of the denominator with respect to the two independent
  // estimates (E = bf_e0, C = bf_ce).
  const double dD_dE = (has_c ? pc * c : 0.0) + (has_e ? pe : 0.0);
  const double dD_dC = has_c ? pc * e : 0.0;

  // P = odds * B / D; dP/dtheta = odds * (dB * D - B * dD) / D^2.
  auto se_of = [&](double B, double dB_dE, double dB_dC, double odds) {
    const double pE = odds * (dB_dE * denom - B * dD_dE) / (denom * denom);
    const double pC = odds * (dB_dC * denom - B * dD_dC) / (denom * denom);
    return std::sqrt(pE * pE * bf_e0.se * bf_e0.se + pC * pC * bf_ce.se * bf_ce.se);
  };

  std::vector<ModelProbability> out;
  {
    ModelProbability m0;
    m0.model = "M0";
    m0.value = 1.0 / denom;
    const double pE = -dD_dE / (denom * denom);
    const double pC = -dD_dC / (denom * denom);
    m0.se = std::sqrt(pE * pE * bf_e0.se * bf_e0.se + pC * pC * bf_ce.se * bf_ce.se);
    out.push_back(m0);
  }
  if (has_c) {
    ModelProbability mc_prob;
    mc_prob.model = "Mc";
    mc_prob.value = pc * c * e / denom;
    mc_prob.se = se_of(c * e, c, e, pc);
    out.push_back(mc_prob);
  }
  if (has_e) {
    ModelProbability me_prob;
    me_prob.model = "Me";
    me_prob.value = pe * e / denom;
    me_prob.se = se_of(e, 1.0, 0.0, pe);
    out.push_back(me_prob);
  }
  return out;
}

std::vector<ModelProbability> posterior_model_probs_generic(
    const std::vector<std::string>& labels, const std::vector<McEstimate>& bfs,
    const std::vector<double>& prior_odds) {
  if (labels.size() != bfs.size() || labels.size() != prior_odds.size()) {
    throw std::invalid_argument("posterior_model_probs: size mismatch");
  }
  double denom = 1.0;
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    if (!(prior_odds[k] > 0.0)) {
      throw std::invalid_argument("prior odds must be strictly positive");
    }
    denom += prior_odds[k] * bfs[k].value;
  }
  std::vector<ModelProbability> out;
  ModelProbability m0;
  m0.model = "M0";
  m0.value = 1.0 / denom;
  double acc0 = 0.0;
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    const double d = -prior_odds[k] / (denom * denom);
    acc0 += d * d * bfs[k].se * bfs[k].se;
  }
  m0.se = std::sqrt(acc0);
  out.push_back(m0);
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    ModelProbability m;
    m.model = labels[k];
    m.value = prior_odds[k] * bfs[k].value / denom;
    double acc = 0.0;
    for (std::size_t j = 0; j < bfs.size(); ++j) {
      double d;
      if (j == k) {
        d = prior_odds[k] * (denom - prior_odds[k] * bfs[k].value) / (denom * denom);
      } else {
        d = -prior_odds[k] * bfs[k].value * prior_odds[j] / (denom * denom);
      }
      acc += d * d * bfs[j].se * bfs[j].se;
    }
    m.se = std::sqrt(acc);
    out.push_back(m);
  }
  return out;
}

namespace {

void check_q_grid(const std::vector<double>& q_values) {
  if (q_values.empty()) {
    throw std::invalid_argument("q grid must not be empty");
  }
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    if (!(q_values[i] >= 0.0) || q_values[i] > 1.0) {
      throw std::invalid_argument("q values must lie in [0,1]");
    }
    for (std::size_t j = i + 1; j < q_values.size(); ++j) {
      if (q_values[i] == q_values[j]) {
        throw std::invalid_argument("q values must be distinct");
      }
    }
  }
}

void finish_row(QRowResult& row, const std::vector<ModelSet>& sets) {
  row.bf_ce = bf_ce(row.prior_prob, row.posterior_prob);
  row.bf_c0 = compose_bf_c0(row.bf_ce, row.bf_e0);
  row.set_probs.clear();
  row.set_probs.reserve(sets.size());
  for (const ModelSet& set : sets) {
    row.set_probs.push_back(posterior_model_probs(set, row.bf_e0, row.bf_ce));
  }
}

}  // namespace

ComparisonReport sweep_q(const BinomialTable& table, const BinomialHyper& hyper,
                         const ConstraintExpr& constraint,
                         const std::vector<double>& q_values, const McConfig& mc,
                         const std::vector<ModelSet>& sets,
                         std::uint64_t replicate) {
  check_q_grid(q_values);
  mc.validate();
  for (const ModelSet& s : sets) s.validate();

  ComparisonReport report;
  report.kind = "binomial";
  report.constraint = constraint.str();
  report.seed = mc.seed;
  report.samples = mc.samples;
  report.burnin = mc.resolved_burnin();
  report.model_sets = sets;
  report.rows.resize(q_values.size());

  std::vector<std::future<void>> tasks;
  tasks.reserve(q_values.size());
  for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
    tasks.push_back(std::async(std::launch::async, [&, qi] {
      QRowResult& row = report.rows[qi];
      row.q = q_values[qi];
      row.t = TrainingSpec::fraction(q_values[qi]).resolve(table);
      row.bf_e0 = bf_intrinsic_e0(
          table, hyper, row.t, mc,
          RngStream(mc.seed, make_stream_id(qi, StreamRole::kBfE0, replicate)));
      row.prior_prob = prior_constraint_prob(
          hyper, row.t, constraint, mc,
          RngStream(mc.seed,
                    make_stream_id(qi, StreamRole::kPriorConstraint, replicate)));
      row.posterior_prob = posterior_constraint_prob(
          table, hyper, row.t, constraint, mc,
          RngStream(mc.seed, make_stream_id(qi, StreamRole::kPosteriorConstraint,
                                            replicate)));
      finish_row(row, sets);
    }));
  }
  for (auto& f : tasks) f.get();
  return report;
}

ComparisonReport sweep_q(const MultinomialTable& table,
                         const MultinomialHyper& hyper,
                         const ConstraintExpr& constraint,
                         const std::vector<double>& q_values, const McConfig& mc,
                         const std::vector<ModelSet>& sets,
                         std::uint64_t replicate) {
  check_q_grid(q_values);
  mc.validate();
  for (const ModelSet& s : sets) s.validate();

  ComparisonReport report;
  report.kind = "multinomial";
  report.constraint = constraint.str();
  report.seed = mc.seed;
  report.samples = mc.samples;
  report.burnin = mc.resolved_burnin();
  report.model_sets = sets;
  report.rows.resize(q_values.size());

  std::vector<std::future<void>> tasks;
  tasks.reserve(q_values.size());
  for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
    tasks.push_back(std::async(std::launch::async, [&, qi] {
      QRowResult& row = report.rows[qi];
      row.q = q_values[qi];
      const long long t =
          std::llrint(q_values[qi] * static_cast<double>(table.total()));
      row.t = {t};
      row.bf_e0 = bf_intrinsic_e0_mult(
          table, hyper, t, mc,
          RngStream(mc.seed, make_stream_id(qi, StreamRole::kBfE0, replicate)));
      row.prior_prob = prior_constraint_prob_mult(
          hyper, table.rows(), table.cols(), t, constraint, mc,
          RngStream(mc.seed,
                    make_stream_id(qi, StreamRole::kPriorConstraint, replicate)));
      row.posterior_prob = posterior_constraint_prob_mult(
          table, hyper, t, constraint, mc,
          RngStream(mc.seed, make_stream_id(qi, StreamRole::kPosteriorConstraint,
                                            replicate)));
      finish_row(row, sets);
    }));
  }
  for (auto& f : tasks) f.get();
  return report;
}

}  // namespace ordtab
