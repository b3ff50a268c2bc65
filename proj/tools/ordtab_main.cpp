// Command-line front end: analyze a contingency table, run the simulation
// study, or expose the exact-enumeration oracles.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordtab/binomial.hpp"
#include "ordtab/comparator.hpp"
#include "ordtab/constraint.hpp"
#include "ordtab/io.hpp"
#include "ordtab/multinomial.hpp"
#include "ordtab/simulation.hpp"

namespace {

using ordtab::McConfig;
using ordtab::McEstimate;
using ordtab::ModelSet;
using ordtab::SamplingKind;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<ModelSet> parse_model_sets(const std::string& text) {
  std::vector<ModelSet> sets;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    ModelSet set;
    if (tok == "0e") {
      set.include_constrained = false;
      set.include_encompassing = true;
    } else if (tok == "0c") {
      set.include_constrained = true;
      set.include_encompassing = false;
    } else if (tok == "0ce") {
      set.include_constrained = true;
      set.include_encompassing = true;
    } else {
      throw std::invalid_argument("unknown model set '" + tok +
                                  "' (expected 0e, 0c or 0ce)");
    }
    sets.push_back(set);
  }
  if (sets.empty()) throw std::invalid_argument("no model sets selected");
  return sets;
}

ordtab::TableFormat format_of(const std::string& path,
                              const std::string& explicit_format) {
  if (explicit_format == "csv") return ordtab::TableFormat::kCsv;
  if (explicit_format == "json") return ordtab::TableFormat::kJson;
  if (!explicit_format.empty()) {
    throw std::invalid_argument("unknown table format '" + explicit_format + "'");
  }
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return ordtab::TableFormat::kJson;
  }
  return ordtab::TableFormat::kCsv;
}

ordtab::BinomialHyper binomial_hyper_from_flags(int rows,
                                                const std::string& alpha_enc,
                                                const std::string& alpha_null) {
  ordtab::BinomialHyper hyper = ordtab::BinomialHyper::uniform(rows);
  if (!alpha_enc.empty()) {
    const std::vector<double> v = parse_double_list(alpha_enc);
    if (v.size() == 2) {
      hyper.a1.assign(rows, v[0]);
      hyper.a2.assign(rows, v[1]);
    } else if (static_cast<int>(v.size()) == 2 * rows) {
      for (int i = 0; i < rows; ++i) {
        hyper.a1[i] = v[2 * i];
        hyper.a2[i] = v[2 * i + 1];
      }
    } else {
      throw std::invalid_argument(
          "--alpha-enc expects 'a,b' or one pair per row");
    }
  }
  if (!alpha_null.empty()) {
    const std::vector<double> v = parse_double_list(alpha_null);
    if (v.size() != 2) throw std::invalid_argument("--alpha-null expects 'a,b'");
    hyper.a01 = v[0];
    hyper.a02 = v[1];
  }
  return hyper;
}

ordtab::MultinomialHyper multinomial_hyper_from_flags(
    int rows, int cols, const std::string& alpha_enc,
    const std::string& alpha_null) {
  ordtab::MultinomialHyper hyper = ordtab::MultinomialHyper::uniform(rows, cols);
  if (!alpha_enc.empty()) {
    const std::vector<double> v = parse_double_list(alpha_enc);
    if (v.size() == 1) {
      hyper.a_cells.assign(static_cast<std::size_t>(rows) * cols, v[0]);
    } else if (v.size() == static_cast<std::size_t>(rows) * cols) {
      hyper.a_cells = v;
    } else {
      throw std::invalid_argument(
          "--alpha-enc expects one value or a full r*c list");
    }
  }
  if (!alpha_null.empty()) {
    const std::vector<double> v = parse_double_list(alpha_null);
    if (v.size() != 2) {
      throw std::invalid_argument(
          "--alpha-null expects 'rowConc,colConc' for multinomial tables");
    }
    hyper.a_rows.assign(rows, v[0]);
    hyper.a_cols.assign(cols, v[1]);
  }
  return hyper;
}

int run_analyze(const std::string& table_path, const std::string& table_format,
                const std::string& kind_str, const std::string& constraint_str,
                const std::string& q_str, const std::string& models_str,
                const std::string& alpha_enc, const std::string& alpha_null,
                const McConfig& mc, const std::string& out_format) {
  const SamplingKind kind = ordtab::sampling_kind_from_string(kind_str);
  const ordtab::TableFile file = ordtab::load_table(
      table_path, format_of(table_path, table_format), kind);
  const std::vector<double> q_values = parse_double_list(q_str);
  const std::vector<ModelSet> sets = parse_model_sets(models_str);
  ordtab::ComparisonReport report;
  if (kind == SamplingKind::kBinomial) {
    const ordtab::BinomialTable table = file.to_binomial();
    const auto constraint = ordtab::ConstraintExpr::parse(
        constraint_str, table.rows(), std::nullopt);
    const auto hyper =
        binomial_hyper_from_flags(table.rows(), alpha_enc, alpha_null);
    report = ordtab::sweep_q(table, hyper, constraint, q_values, mc, sets);
  } else {
    const ordtab::MultinomialTable table = file.to_multinomial();
    const auto constraint = ordtab::ConstraintExpr::parse(
        constraint_str, table.rows(), table.cols());
    const auto hyper = multinomial_hyper_from_flags(table.rows(), table.cols(),
                                                    alpha_enc, alpha_null);
    report = ordtab::sweep_q(table, hyper, constraint, q_values, mc, sets);
  }
  for (const auto& row : report.rows) {
    if (row.prior_prob.value == 0.0) {
      std::cerr << "warning: prior constraint probability estimated as zero at q="
                << row.q << "\n";
    }
  }
  std::cout << ordtab::emit_report(report,
                                   ordtab::report_format_from_string(out_format));
  return 0;
}

int run_simulate(const std::string& scenario_name, const std::string& custom,
                 int replicates, const std::string& q_str,
                 const std::string& models_str, const McConfig& mc,
                 const std::string& out_format) {
  ordtab::SimScenario scenario;
  if (!custom.empty()) {
    const std::vector<double> v = parse_double_list(custom);
    if (v.size() < 3) {
      throw std::invalid_argument(
          "--custom expects 'nStar,p1,p2[,p3,...]' with decreasing p");
    }
    scenario.label = "custom";
    scenario.n_star = static_cast<long long>(v[0]);
    scenario.probs.assign(v.begin() + 1, v.end());
  } else {
    scenario = ordtab::scenario_by_name(scenario_name);
  }
  const std::vector<double> q_values = parse_double_list(q_str);
  const std::vector<ModelSet> sets = parse_model_sets(models_str);
  const ordtab::SimulationReport report =
      ordtab::run_simulation(scenario, mc, q_values, replicates, sets);
  std::cout << ordtab::emit_simulation_report(
      report, ordtab::report_format_from_string(out_format));
  return 0;
}

int run_oracle(const std::string& table_path, const std::string& table_format,
               const std::string& kind_str, const std::string& constraint_str,
               double q, const McConfig& mc) {
  const SamplingKind kind = ordtab::sampling_kind_from_string(kind_str);
  const ordtab::TableFile file = ordtab::load_table(
      table_path, format_of(table_path, table_format), kind);
  nlohmann::ordered_json out;
  out["q"] = q;
  if (kind == SamplingKind::kBinomial) {
    const ordtab::BinomialTable table = file.to_binomial();
    const auto hyper = ordtab::BinomialHyper::uniform(table.rows());
    const std::vector<long long> t =
        ordtab::TrainingSpec::fraction(q).resolve(table);
    out["t"] = t;
    out["bf_e0_exact"] = ordtab::bf_intrinsic_e0_exact(table, hyper, t);
    if (!constraint_str.empty()) {
      const auto constraint =
          ordtab::ConstraintExpr::parse(constraint_str, table.rows(), std::nullopt);
      const auto prior_mix = ordtab::enumerate_prior_mixture(hyper, t);
      const auto post_mix = ordtab::enumerate_h_mixture(table, hyper, t);
      auto orthant = [&](const ordtab::HMixture& mix, std::uint64_t stream) {
        ordtab::RngStream rng(mc.seed, stream);
        double acc = 0.0;
        std::vector<double> p(static_cast<std::size_t>(table.rows()));
        for (std::size_t k = 0; k < mix.components.size(); ++k) {
          long long hits = 0;
          for (long long s = 0; s < mc.samples; ++s) {
            for (int i = 0; i < table.rows(); ++i) {
              p[static_cast<std::size_t>(i)] =
                  rng.beta(hyper.a1[i] + static_cast<double>(mix.components[k][static_cast<std::size_t>(i)]),
                           hyper.a2[i] + static_cast<double>(t[static_cast<std::size_t>(i)] -
                                                             mix.components[k][static_cast<std::size_t>(i)]));
            }
            if (constraint.eval(p)) ++hits;
          }
          acc += mix.weights[k] * static_cast<double>(hits) /
                 static_cast<double>(mc.samples);
        }
        return acc;
      };
      out["prior_constraint_prob"] = orthant(prior_mix, 1001);
      out["posterior_constraint_prob"] = orthant(post_mix, 1002);
      out["mixture_components"] = post_mix.components.size();
    }
  } else {
    const ordtab::MultinomialTable table = file.to_multinomial();
    const auto hyper = ordtab::MultinomialHyper::uniform(table.rows(), table.cols());
    const long long t = std::llrint(q * static_cast<double>(table.total()));
    out["t"] = t;
    out["bf_e0_exact"] = ordtab::bf_intrinsic_e0_mult_exact(table, hyper, t);
    if (!constraint_str.empty()) {
      const auto constraint = ordtab::ConstraintExpr::parse(
          constraint_str, table.rows(), table.cols());
      const auto prior_mix =
          ordtab::enumerate_prior_mixture_mult(hyper, table.rows(), table.cols(), t);
      const auto post_mix = ordtab::enumerate_h_mixture_mult(table, hyper, t);
      const int cells = table.rows() * table.cols();
      auto orthant = [&](const ordtab::HMixtureMult& mix, std::uint64_t stream) {
        ordtab::RngStream rng(mc.seed, stream);
        double acc = 0.0;
        std::vector<double> alpha(static_cast<std::size_t>(cells));
        for (std::size_t k = 0; k < mix.components.size(); ++k) {
          for (int c = 0; c < cells; ++c) {
            alpha[static_cast<std::size_t>(c)] =
                hyper.a_cells[static_cast<std::size_t>(c)] +
                static_cast<double>(mix.components[k][static_cast<std::size_t>(c)]);
          }
          long long hits = 0;
          for (long long s = 0; s < mc.samples; ++s) {
            const std::vector<double> pi = rng.dirichlet(alpha);
            if (constraint.eval_grid(pi, table.rows(), table.cols())) ++hits;
          }
          acc += mix.weights[k] * static_cast<double>(hits) /
                 static_cast<double>(mc.samples);
        }
        return acc;
      };
      out["prior_constraint_prob"] = orthant(prior_mix, 1001);
      out["posterior_constraint_prob"] = orthant(post_mix, 1002);
      out["mixture_components"] = post_mix.components.size();
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Objective Bayes factors and posterior model probabilities for "
               "order-constrained contingency-table models"};
  app.require_subcommand(1);

  std::string table_path, table_format, kind_str = "binomial";
  std::string constraint_str, q_str = "0,0.25,0.5,0.75,1";
  std::string models_str = "0e,0c,0ce", out_format = "json";
  std::string alpha_enc, alpha_null;
  McConfig mc;
  long long samples = 100000, burnin = -1;
  std::uint64_t seed = 1;

  auto add_mc_flags = [&](CLI::App* cmd) {
    cmd->add_option("--samples", samples, "Monte Carlo sample count");
    cmd->add_option("--burnin", burnin,
                    "Burn-in iterations (default samples/10)");
    cmd->add_option("--seed", seed, "Random seed");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Analyze a table");
  analyze->add_option("--table", table_path, "Path to the table file")->required();
  analyze->add_option("--format", table_format, "Table format (csv|json)");
  analyze->add_option("--kind", kind_str, "Sampling kind (binomial|multinomial)");
  analyze->add_option("--constraint", constraint_str, "Constraint expression")
      ->required();
  analyze->add_option("--q", q_str, "Comma-separated training fractions");
  analyze->add_option("--models", models_str,
                      "Model sets to score (comma list of 0e, 0c, 0ce)");
  analyze->add_option("--alpha-enc", alpha_enc,
                      "Encompassing hyperparameters ('a,b' or per-row pairs; "
                      "one value or r*c list for multinomial)");
  analyze->add_option("--alpha-null", alpha_null,
                      "Null hyperparameters ('a,b'; for multinomial "
                      "'rowConc,colConc')");
  analyze->add_option("--out", out_format, "Output format (json|csv|md)");
  add_mc_flags(analyze);

  std::string scenario_name, custom;
  int replicates = 50;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a simulation study");
  simulate->add_option("--scenario", scenario_name,
                       "Scenario name (S1..XL3, S1-3x2..XL3-3x2)");
  simulate->add_option("--custom", custom,
                       "Custom scenario 'nStar,p1,p2[,...]' (decreasing p)");
  simulate->add_option("--replicates", replicates, "Replicate count");
  simulate->add_option("--q", q_str, "Comma-separated training fractions");
  simulate->add_option("--models", models_str,
                       "Model sets to score (comma list of 0e, 0c, 0ce)");
  simulate->add_option("--out", out_format, "Output format (json|csv|md)");
  add_mc_flags(simulate);

  double oracle_q = 0.0;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Exact-enumeration reference values for test harnesses");
  oracle->add_option("--table", table_path, "Path to the table file")->required();
  oracle->add_option("--format", table_format, "Table format (csv|json)");
  oracle->add_option("--kind", kind_str, "Sampling kind (binomial|multinomial)");
  oracle->add_option("--constraint", constraint_str,
                     "Optional constraint expression");
  oracle->add_option("--q", oracle_q, "Training fraction");
  add_mc_flags(oracle);

  CLI11_PARSE(app, argc, argv);
  mc.samples = samples;
  mc.burnin = burnin;
  mc.seed = seed;

  try {
    if (app.got_subcommand(analyze)) {
      return run_analyze(table_path, table_format, kind_str, constraint_str,
                         q_str, models_str, alpha_enc, alpha_null, mc,
                         out_format);
    }
    if (app.got_subcommand(simulate)) {
      if (scenario_name.empty() == custom.empty()) {
        throw std::invalid_argument(
            "simulate needs exactly one of --scenario or --custom");
      }
      return run_simulate(scenario_name, custom, replicates, q_str, models_str,
                          mc, out_format);
    }
    return run_oracle(table_path, table_format, kind_str, constraint_str,
                      oracle_q, mc);
  } catch (const ordtab::estimation_failure& e) {
    std::cerr << "estimation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
