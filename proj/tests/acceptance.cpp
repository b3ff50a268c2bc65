// Acceptance suite. Usage: acceptance <criterion 1..9> [path-to-cli]
// Each criterion prints clause-level detail and one final PASS/FAIL line;
// the exit status reflects the selected criterion's outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_utils.hpp"
#include "ordtab/binomial.hpp"
#include "ordtab/comparator.hpp"
#include "ordtab/io.hpp"
#include "ordtab/multinomial.hpp"
#include "ordtab/simulation.hpp"

using namespace ordtab;

namespace {

struct Checker {
  bool pass = true;
  void check(const std::string& label, double value, double target, double tol) {
    const bool ok = std::abs(value - target) <= tol;
    pass = pass && ok;
    std::printf("  [%s] %s: value=%.6g target=%.6g tol=%.3g\n",
                ok ? "ok" : "FAIL", label.c_str(), value, target, tol);
  }
  void check_bool(const std::string& label, bool ok, const std::string& detail) {
    pass = pass && ok;
    std::printf("  [%s] %s%s%s\n", ok ? "ok" : "FAIL", label.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
  }
};

const BinomialTable& trauma() {
  static const BinomialTable t({59, 48, 44, 43}, {210, 190, 207, 195});
  return t;
}
const MultinomialTable& hospital34() {
  static const MultinomialTable t(2, 2, {20, 0, 18, 5});
  return t;
}
const MultinomialTable& hospital16() {
  static const MultinomialTable t(2, 2, {7, 4, 4, 6});
  return t;
}
const MultinomialTable& class_behavior() {
  static const MultinomialTable t(2, 2, {220, 1060, 96, 609});
  return t;
}

ConstraintExpr descending_chain(int r) {
  std::string s;
  for (int i = 1; i <= r; ++i) {
    if (i > 1) s += '>';
    s += "p[" + std::to_string(i) + "]";
  }
  return ConstraintExpr::parse(s, r, std::nullopt);
}

double rel_tol(double target, double se, double factor, double rel) {
  return std::max(factor * se, rel * std::abs(target));
}

// ---------------------------------------------------------------- criterion 1
bool criterion1() {
  std::puts("criterion 1: deterministic t=0 reference values");
  const auto start = std::chrono::steady_clock::now();
  Checker c;

  c.check("trauma BF_e0 (t=0)",
          bf_default_e0(trauma(), BinomialHyper::uniform(4)), 12.965, 0.01);

  const auto h22 = MultinomialHyper::uniform(2, 2);
  const double bf34 = bf_default_e0_mult(hospital34(), h22);
  c.check("ulcer hospital 34 BF_e0 (t=0)", bf34, 3.648, 0.005);
  ModelSet pair_e;
  pair_e.include_constrained = false;
  const auto probs = posterior_model_probs(pair_e, {bf34, 0.0}, {1.0, 0.0});
  c.check("ulcer hospital 34 P(M0 | M0,Me)", probs[0].value, 0.215, 0.001);

  c.check("class-behavior BF_e0 (t=0)",
          bf_default_e0_mult(class_behavior(), h22), 0.4199, 0.001);

  const MultinomialTable toy(2, 2, {1, 0, 0, 1});
  c.check("toy 2x2 BF_e0 (t=0)", bf_intrinsic_e0_mult_exact(toy, h22, 0), 1.8,
          1e-10);

  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  std::printf("  (deterministic path took %lld ms)\n",
              static_cast<long long>(ms));
  return c.pass;
}

// ---------------------------------------------------------------- criterion 2
bool criterion2() {
  std::puts("criterion 2: trauma Bayes factors across the q grid (S = 2e5)");
  Checker c;
  const auto hyper = BinomialHyper::uniform(4);
  const auto expr = descending_chain(4);
  McConfig mc;
  mc.samples = 200000;
  mc.seed = 2024;
  const std::vector<double> qs{0.25, 0.5, 0.75, 1.0};
  const std::vector<double> bf_e0_ref{144.197, 147.798, 123.942, 93.672};
  const std::vector<double> bf_ce_ref{2.172, 2.752, 3.336, 3.737};
  const auto report = sweep_q(trauma(), hyper, expr, qs, mc, {ModelSet{}});
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const auto& row = report.rows[k];
    c.check("trauma BF_e0 q=" + std::to_string(qs[k]), row.bf_e0.value,
            bf_e0_ref[k], rel_tol(bf_e0_ref[k], row.bf_e0.se, 4.0, 0.08));
    c.check("trauma BF_ce q=" + std::to_string(qs[k]), row.bf_ce.value,
            bf_ce_ref[k], rel_tol(bf_ce_ref[k], row.bf_ce.se, 4.0, 0.10));
  }
  return c.pass;
}

// ---------------------------------------------------------------- criterion 3
bool criterion3() {
  std::puts("criterion 3: trauma posterior model probabilities at q = 0.5");
  Checker c;
  const auto hyper = BinomialHyper::uniform(4);
  const auto expr = descending_chain(4);
  McConfig mc;
  mc.samples = 200000;
  mc.seed = 2025;
  const auto report = sweep_q(trauma(), hyper, expr, {0.5}, mc, {ModelSet{}});
  const auto& probs = report.rows[0].set_probs[0];
  c.check("P(M0 | M0,Mc,Me)", probs[0].value, 0.002, 0.03);
  c.check("P(Mc | M0,Mc,Me)", probs[1].value, 0.733, 0.03);
  c.check("P(Me | M0,Mc,Me)", probs[2].value, 0.265, 0.03);
  return c.pass;
}

// ---------------------------------------------------------------- criterion 4
bool criterion4() {
  std::puts("criterion 4: ulcer-surgery hospitals 34 and 16 at q in {0, 0.5, 1}");
  Checker c;
  const auto hyper = MultinomialHyper::uniform(2, 2);
  const auto expr = ConstraintExpr::parse("cond(1,1)<cond(2,1)", 2, 2);
  McConfig mc;
  mc.samples = 200000;
  mc.seed = 2026;
  ModelSet s0e;
  s0e.include_constrained = false;
  ModelSet s0c;
  s0c.include_encompassing = false;
  const std::vector<ModelSet> sets{s0e, s0c, ModelSet{}};

  struct Ref {
    double bf_e0, bf_ce, bf_c0;
    // per set, per model, matching {M0,Me}, {M0,Mc}, {M0,Mc,Me}
    std::vector<std::vector<double>> probs;
  };
  const std::vector<double> qs{0.0, 0.5, 1.0};
  const std::vector<Ref> ref34{
      {3.648, 0.993, 3.624,
       {{0.215, 0.785}, {0.216, 0.7837}, {0.121, 0.438, 0.441}}},
      {4.758, 0.395, 1.879,
       {{0.174, 0.826}, {0.302, 0.698}, {0.131, 0.246, 0.623}}},
      {4.054, 0.201, 0.816,
       {{0.198, 0.802}, {0.470, 0.529}, {0.170, 0.139, 0.691}}},
  };
  const std::vector<Ref> ref16{
      {1.217, 0.998, 1.216,
       {{0.451, 0.549}, {0.451, 0.549}, {0.291, 0.354, 0.355}}},
      {0.996, 0.676, 0.674,
       {{0.501, 0.499}, {0.605, 0.395}, {0.374, 0.252, 0.373}}},
      {1.000, 0.525, 0.525,
       {{0.498, 0.502}, {0.674, 0.326}, {0.396, 0.208, 0.396}}},
  };

  auto run_table = [&](const MultinomialTable& table, const char* name,
                       const std::vector<Ref>& refs) {
    const auto report = sweep_q(table, hyper, expr, qs, mc, sets);
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto& row = report.rows[k];
      const Ref& ref = refs[k];
      const std::string tag = std::string(name) + " q=" + std::to_string(qs[k]);
      c.check(tag + " BF_e0", row.bf_e0.value, ref.bf_e0,
              rel_tol(ref.bf_e0, row.bf_e0.se, 4.0, 0.10));
      c.check(tag + " BF_ce", row.bf_ce.value, ref.bf_ce,
              rel_tol(ref.bf_ce, row.bf_ce.se, 4.0, 0.10));
      c.check(tag + " BF_c0", row.bf_c0.value, ref.bf_c0,
              rel_tol(ref.bf_c0, row.bf_c0.se, 4.0, 0.10));
      for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t m = 0; m < ref.probs[s].size(); ++m) {
          c.check(tag + " P(" + row.set_probs[s][m].model + "|" +
                      sets[s].label() + ")",
                  row.set_probs[s][m].value, ref.probs[s][m], 0.03);
        }
      }
    }
  };
  run_table(hospital34(), "hospital34", ref34);
  run_table(hospital16(), "hospital16", ref16);
  return c.pass;
}

// ---------------------------------------------------------------- criterion 5
bool criterion5() {
  std::puts("criterion 5: class-behavior table across the full q grid");
  Checker c;
  const auto hyper = MultinomialHyper::uniform(2, 2);
  const auto expr = ConstraintExpr::parse("cond(1,1)>cond(2,1)", 2, 2);
  McConfig mc;
  mc.samples = 200000;
  mc.seed = 2027;
  ModelSet s0c;
  s0c.include_encompassing = false;
  const std::vector<double> qs{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> bf_c0_ref{0.6461, 0.6515, 0.6552, 0.6925, 0.7477};
  const std::vector<double> p_m0_ref{0.6075, 0.6055, 0.6042, 0.5904, 0.5722};
  const auto report = sweep_q(class_behavior(), hyper, expr, qs, mc, {s0c});
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const auto& row = report.rows[k];
    c.check("class-behavior BF_c0 q=" + std::to_string(qs[k]), row.bf_c0.value,
            bf_c0_ref[k], 0.03);
    c.check("class-behavior P(M0|M0,Mc) q=" + std::to_string(qs[k]),
            row.set_probs[0][0].value, p_m0_ref[k], 0.03);
  }
  return c.pass;
}

// ---------------------------------------------------------------- criterion 6
bool criterion6() {
  std::puts("criterion 6: Monte Carlo estimators vs exact enumeration on 50 "
            "random small instances");
  RngStream gen(606, 1);
  McConfig mc;
  mc.samples = 20000;
  int agree = 0;
  const int total = 50;
  for (int inst = 0; inst < total; ++inst) {
    bool ok = true;
    if (inst < 35) {
      const int r = 2 + (gen.uniform() < 0.5 ? 0 : 1);
      std::vector<long long> n(r), y(r), t(r);
      for (int i = 0; i < r; ++i) {
        n[i] = 1 + gen.binomial(7, 0.7);
        y[i] = gen.binomial(n[i], 0.5);
        t[i] = gen.binomial(std::min<long long>(n[i], 5), 0.7);
      }
      const BinomialTable table(y, n);
      const auto hyper = BinomialHyper::uniform(r);
      const double exact = bf_intrinsic_e0_exact(table, hyper, t);
      const auto est = bf_intrinsic_e0_is(
          table, hyper, t, mc, RngStream(606, 100 + static_cast<std::uint64_t>(inst)));
      if (est.se > 0.0 && std::abs(est.value - exact) > 3.0 * est.se) ok = false;

      oracle::BinData d;
      d.y = y;
      d.n = n;
      d.t = t;
      d.default_alpha();
      std::vector<std::vector<long long>> comps;
      std::vector<double> weights;
      oracle::posterior_mixture(d, comps, weights);
      RngStream orng(606, 500 + static_cast<std::uint64_t>(inst));
      const double ref = oracle::mixture_constraint_prob(
          d, comps, weights, descending_chain(r), 20000, orng);
      const auto post = posterior_constraint_prob(
          table, hyper, t, descending_chain(r), mc,
          RngStream(606, 900 + static_cast<std::uint64_t>(inst)));
      if (std::abs(post.value - ref) > 3.0 * post.se + 0.006) ok = false;
    } else {
      std::vector<long long> cells(4, 0);
      long long n = 0;
      while (n < 1) {
        n = 0;
        for (int k = 0; k < 4; ++k) {
          cells[k] = gen.binomial(3, 0.5);
          n += cells[k];
        }
        if (n > 6) n = 0;
      }
      const long long t = gen.binomial(4, 0.6);
      const MultinomialTable table(2, 2, cells);
      const auto hyper = MultinomialHyper::uniform(2, 2);
      const double exact = bf_intrinsic_e0_mult_exact(table, hyper, t);
      const auto est = bf_intrinsic_e0_mult_is(
          table, hyper, t, mc, RngStream(606, 100 + static_cast<std::uint64_t>(inst)));
      if (est.se > 0.0 && std::abs(est.value - exact) > 3.0 * est.se) ok = false;

      oracle::MultData d;
      d.rows = 2;
      d.cols = 2;
      d.y = cells;
      d.t = t;
      d.default_alpha();
      std::vector<std::vector<long long>> comps;
      std::vector<double> weights;
      oracle::posterior_mixture_mult(d, comps, weights);
      RngStream orng(606, 500 + static_cast<std::uint64_t>(inst));
      const auto expr = ConstraintExpr::parse("cond(1,1)<cond(2,1)", 2, 2);
      const double ref = oracle::mixture_constraint_prob_mult(d, comps, weights,
                                                              expr, 20000, orng);
      const auto post = posterior_constraint_prob_mult(
          table, hyper, t, expr, mc,
          RngStream(606, 900 + static_cast<std::uint64_t>(inst)));
      if (std::abs(post.value - ref) > 3.0 * post.se + 0.006) ok = false;
    }
    if (ok) ++agree;
  }
  std::printf("  [%s] agreement on %d/%d instances (need >= 47)\n",
              agree >= 47 ? "ok" : "FAIL", agree, total);
  return agree >= 47;
}

// ---------------------------------------------------------------- criterion 7
bool criterion7() {
  std::puts("criterion 7: exchangeability of the intrinsic prior");
  Checker c;
  McConfig mc;
  mc.samples = 150000;
  const long long n_row = 12;
  for (int r : {2, 3, 4}) {
    double target = 1.0;
    for (int k = 2; k <= r; ++k) target /= k;
    for (double qf : {0.0, 0.5, 1.0}) {
      const std::vector<long long> t(
          static_cast<std::size_t>(r),
          static_cast<long long>(std::llrint(qf * static_cast<double>(n_row))));
      const auto est = prior_constraint_prob(
          BinomialHyper::uniform(r), t, descending_chain(r), mc,
          RngStream(707, static_cast<std::uint64_t>(r * 10) +
                             static_cast<std::uint64_t>(qf * 4)));
      c.check("chain prior r=" + std::to_string(r) + " q=" + std::to_string(qf),
              est.value, target, 4.0 * est.se);
    }
  }
  const auto expr = ConstraintExpr::parse("cond(1,1)<cond(2,1)", 2, 2);
  for (long long t : {0LL, 7LL, 15LL}) {
    const auto est = prior_constraint_prob_mult(
        MultinomialHyper::uniform(2, 2), 2, 2, t, expr, mc,
        RngStream(707, 1000 + static_cast<std::uint64_t>(t)));
    c.check("conditional-constraint prior t=" + std::to_string(t), est.value,
            0.5, 4.0 * est.se);
  }
  return c.pass;
}

// ---------------------------------------------------------------- criterion 8
bool criterion8() {
  std::puts("criterion 8: simulation study at desk scale (XL1, 50 replicates)");
  Checker c;
  McConfig mc;
  mc.samples = 20000;
  mc.seed = 808;
  ModelSet s0c;
  s0c.include_encompassing = false;
  const std::vector<double> qs{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto report = run_simulation(scenario_by_name("XL1"), mc, qs, 50,
                                     {s0c, ModelSet{}});
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const double p_mc = report.medians[qi][0][1].value;   // Mc in {M0,Mc}
    const double p_m0 = report.medians[qi][1][0].value;   // M0 in {M0,Mc,Me}
    std::ostringstream d1;
    d1 << "median P(Mc|M0,Mc) q=" << qs[qi] << " = " << p_mc << " (need >= 0.95)";
    c.check_bool("XL1 pair-set median", p_mc >= 0.95, d1.str());
    std::ostringstream d2;
    d2 << "median P(M0|M0,Mc,Me) q=" << qs[qi] << " = " << p_m0
       << " (need <= 0.12)";
    c.check_bool("XL1 triple-set median", p_m0 <= 0.12, d2.str());
  }
  return c.pass;
}

// ---------------------------------------------------------------- criterion 9
bool criterion9(const char* cli_path) {
  std::puts("criterion 9: same-seed reruns produce byte-identical JSON");
  Checker c;
  {
    const auto hyper = MultinomialHyper::uniform(2, 2);
    const auto expr = ConstraintExpr::parse("cond(1,1)<cond(2,1)", 2, 2);
    McConfig mc;
    mc.samples = 20000;
    mc.seed = 909;
    const std::vector<double> qs{0.0, 0.5};
    const auto r1 = sweep_q(hospital34(), hyper, expr, qs, mc, {ModelSet{}});
    const auto r2 = sweep_q(hospital34(), hyper, expr, qs, mc, {ModelSet{}});
    c.check_bool("analysis report rerun", emit_report(r1, ReportFormat::kJson) ==
                                              emit_report(r2, ReportFormat::kJson),
                 "");
  }
  {
    McConfig mc;
    mc.samples = 2000;
    mc.seed = 910;
    ModelSet s0c;
    s0c.include_encompassing = false;
    const auto a = run_simulation(scenario_by_name("XL1"), mc, {0.0, 0.5}, 8, {s0c});
    const auto b = run_simulation(scenario_by_name("XL1"), mc, {0.0, 0.5}, 8, {s0c});
    c.check_bool("simulation report rerun",
                 emit_simulation_report(a, ReportFormat::kJson) ==
                     emit_simulation_report(b, ReportFormat::kJson),
                 "");
  }
  if (cli_path != nullptr) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    const fs::path table = dir / "ordtab_acc_table.csv";
    {
      std::ofstream out(table);
      out << "20,0\n18,5\n";
    }
    auto run_once = [&](const fs::path& out_path) {
      std::ostringstream cmd;
      cmd << '"' << cli_path << '"'
          << " analyze --table " << table
          << " --kind multinomial --constraint \"cond(1,1)<cond(2,1)\""
          << " --q 0,0.5 --samples 20000 --seed 123 --out json > " << out_path;
      return std::system(cmd.str().c_str());
    };
    const fs::path o1 = dir / "ordtab_acc_1.json";
    const fs::path o2 = dir / "ordtab_acc_2.json";
    const int rc1 = run_once(o1);
    const int rc2 = run_once(o2);
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    const std::string s1 = slurp(o1), s2 = slurp(o2);
    c.check_bool("CLI rerun", rc1 == 0 && rc2 == 0 && !s1.empty() && s1 == s2,
                 "");
  }
  return c.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..9> [cli-path]\n");
    return 2;
  }
  const int which = std::atoi(argv[1]);
  bool pass = false;
  switch (which) {
    case 1: pass = criterion1(); break;
    case 2: pass = criterion2(); break;
    case 3: pass = criterion3(); break;
    case 4: pass = criterion4(); break;
    case 5: pass = criterion5(); break;
    case 6: pass = criterion6(); break;
    case 7: pass = criterion7(); break;
    case 8: pass = criterion8(); break;
    case 9: pass = criterion9(argc > 2 ? argv[2] : nullptr); break;
    default:
      std::fprintf(stderr, "unknown criterion %d\n", which);
      return 2;
  }
  std::printf("criterion %d: %s\n", which, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}
