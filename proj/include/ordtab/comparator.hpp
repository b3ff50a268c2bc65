#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordtab/binomial.hpp"
#include "ordtab/mc.hpp"
#include "ordtab/multinomial.hpp"

namespace ordtab {

// A model-comparison set. The null is always a member; the constrained and
// encompassing models are optional, each with prior odds against the null
// (default 1, i.e. a uniform prior on the set).
struct ModelSet {
  bool include_constrained = true;
  bool include_encompassing = true;
  double odds_constrained = 1.0;
  double odds_encompassing = 1.0;

  std::string label() const;
  void validate() const;
};

struct ModelProbability {
  std::string model;  // "M0", "Mc", "Me"
  double value = 0.0;
  double se = 0.0;
};

// Product of the two Bayes factors with a delta-method se (independent
// estimates by the stream layout).
McEstimate compose_bf_c0(const McEstimate& bf_ce, const McEstimate& bf_e0);

// Posterior model probabilities for one set given the two independent
// estimates (the constrained model's BF against the null is their product,
// so its correlation with the encompassing BF is handled in the delta
// method). Probabilities sum to one by construction.
std::vector<ModelProbability> posterior_model_probs(const ModelSet& set,
                                                    const McEstimate& bf_e0,
                                                    const McEstimate& bf_ce);

// Generic form over independent per-model BF estimates (BF of the null is
// implicitly 1). Used where no shared components exist.
std::vector<ModelProbability> posterior_model_probs_generic(
    const std::vector<std::string>& labels, const std::vector<McEstimate>& bfs,
    const std::vector<double>& prior_odds);

struct QRowResult {
  double q = 0.0;
  std::vector<long long> t;  // per-row sizes (binomial) or one total (multinomial)
  McEstimate bf_e0, bf_ce, bf_c0;
  McEstimate prior_prob, posterior_prob;
  std::vector<std::vector<ModelProbability>> set_probs;  // parallel to model_sets
};

struct ComparisonReport {
  std::string kind;        // "binomial" | "multinomial"
  std::string constraint;  // canonical text
  std::uint64_t seed = 0;
  long long samples = 0;
  long long burnin = 0;
  std::vector<ModelSet> model_sets;
  std::vector<QRowResult> rows;
};

// Full sensitivity sweep over a grid of training fractions. Each (q,
// estimator) task owns a disjoint stream, so the result is independent of
// scheduling; q = 0 entries carry an exact BF of encompassing vs null.
ComparisonReport sweep_q(const BinomialTable& table, const BinomialHyper& hyper,
                         const ConstraintExpr& constraint,
                         const std::vector<double>& q_values, const McConfig& mc,
                         const std::vector<ModelSet>& sets,
                         std::uint64_t replicate = 0);

ComparisonReport sweep_q(const MultinomialTable& table,
                         const MultinomialHyper& hyper,
                         const ConstraintExpr& constraint,
                         const std::vector<double>& q_values, const McConfig& mc,
                         const std::vector<ModelSet>& sets,
                         std::uint64_t replicate = 0);

}  // namespace ordtab
