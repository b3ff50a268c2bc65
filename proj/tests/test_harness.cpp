// Data ingestion, report emission, effect sizes and the simulation runner.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ordtab/io.hpp"
#include "ordtab/simulation.hpp"

using namespace ordtab;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("effect size h and its classification") {
  CHECK(effect_size_h(0.5, 0.5) == doctest::Approx(0.0));
  const double h_small = effect_size_h(0.10, 0.05);
  CHECK(h_small == doctest::Approx(0.1925).epsilon(2e-3));
  CHECK(classify_effect_size(h_small) == "S");
  const double h_xl = effect_size_h(0.60, 0.15);
  CHECK(h_xl == doctest::Approx(0.9767).epsilon(2e-3));
  CHECK(classify_effect_size(h_xl) == "XL");
  CHECK_THROWS_AS(effect_size_h(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(effect_size_h(0.5, 1.0), std::domain_error);
}

TEST_CASE("CSV ingestion of a product-binomial table") {
  const auto path = write_temp("ordtab_trauma.csv",
                               "59,151\n48,142\n44,163\n43,152\n");
  const TableFile file =
      load_table(path.string(), TableFormat::kCsv, SamplingKind::kBinomial);
  const BinomialTable table = file.to_binomial();
  const std::vector<long long> y(table.y().begin(), table.y().end());
  const std::vector<long long> n(table.n().begin(), table.n().end());
  CHECK(y == std::vector<long long>{59, 48, 44, 43});
  CHECK(n == std::vector<long long>{210, 190, 207, 195});
}

TEST_CASE("JSON ingestion of a multinomial table") {
  const auto path = write_temp(
      "ordtab_h34.json",
      R"({"kind": "multinomial", "counts": [[20, 0], [18, 5]]})");
  const TableFile file = load_table(path.string(), TableFormat::kJson);
  const MultinomialTable table = file.to_multinomial();
  CHECK(table.total() == 43);
  CHECK(table.at(1, 1) == 5);
}

TEST_CASE("ingestion failures carry distinct, line-numbered messages") {
  const auto ragged = write_temp("ordtab_ragged.csv", "1,2\n3\n");
  try {
    load_table(ragged.string(), TableFormat::kCsv, SamplingKind::kBinomial);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("ragged") != std::string::npos);
  }
  const auto negative = write_temp("ordtab_negative.csv", "1,2\n-3,4\n");
  try {
    load_table(negative.string(), TableFormat::kCsv, SamplingKind::kBinomial);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("negative") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  const auto empty = write_temp("ordtab_empty.csv", "\n \n");
  try {
    load_table(empty.string(), TableFormat::kCsv, SamplingKind::kBinomial);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("empty") != std::string::npos);
  }
  const auto junk = write_temp("ordtab_junk.csv", "1,2\n3,x\n");
  try {
    load_table(junk.string(), TableFormat::kCsv, SamplingKind::kBinomial);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("CSV -> JSON -> CSV round trip preserves counts exactly") {
  const std::string csv = "7,4\n4,6\n";
  const TableFile a = parse_table_csv(csv, SamplingKind::kMultinomial);
  const TableFile b = parse_table_json(table_to_json(a));
  CHECK(b.kind == SamplingKind::kMultinomial);
  CHECK(table_to_csv(b) == csv);
}

TEST_CASE("report JSON reserializes byte-identically") {
  const BinomialTable table({5, 3}, {9, 10});
  const auto hyper = BinomialHyper::uniform(2);
  const auto expr = ConstraintExpr::parse("p[1]>p[2]", 2, std::nullopt);
  McConfig mc;
  mc.samples = 2000;
  mc.seed = 3;
  ModelSet set;
  const auto report = sweep_q(table, hyper, expr, {0.0, 0.5}, mc, {set});
  const std::string text = emit_report(report, ReportFormat::kJson);
  const auto parsed = nlohmann::ordered_json::parse(text);
  CHECK(parsed.dump(2) + "\n" == text);
}

TEST_CASE("markdown report mirrors the q-by-BF layout") {
  const BinomialTable table({5, 3}, {9, 10});
  const auto hyper = BinomialHyper::uniform(2);
  const auto expr = ConstraintExpr::parse("p[1]>p[2]", 2, std::nullopt);
  McConfig mc;
  mc.samples = 1000;
  ModelSet set;
  const auto report = sweep_q(table, hyper, expr,
                              {0.0, 0.25, 0.5, 0.75, 1.0}, mc, {set});
  const std::string md = emit_report(report, ReportFormat::kMarkdown);
  CHECK(md.find("| q | BF_e0 | BF_ce | BF_c0 |") != std::string::npos);
  // header + separator + 5 q rows in the first block
  int rows = 0;
  std::istringstream in(md);
  std::string line;
  while (std::getline(in, line) && !line.empty()) ++rows;
  CHECK(rows == 7);

  const std::string csv = emit_report(report, ReportFormat::kCsv);
  CHECK(csv.find("q,bf_e0,bf_e0_se,bf_ce,bf_ce_se,bf_c0,bf_c0_se") == 0);
}

TEST_CASE("label symmetry: swapped outcome columns with a mirrored constraint") {
  // Swapping successes and failures maps p_i to 1 - p_i; with symmetric
  // hyperparameters the exact t = 0 BF is unchanged and the mirrored
  // constraint gives the same posterior model probabilities up to MC noise.
  const BinomialTable orig({9, 3}, {12, 12});
  const BinomialTable swapped({3, 9}, {12, 12});
  const auto hyper = BinomialHyper::uniform(2);
  CHECK(bf_default_e0(orig, hyper) ==
        doctest::Approx(bf_default_e0(swapped, hyper)).epsilon(1e-12));

  const auto expr = ConstraintExpr::parse("p[1]>p[2]", 2, std::nullopt);
  const auto mirror = *expr.mirrored();
  McConfig mc;
  mc.samples = 60000;
  mc.seed = 11;
  ModelSet set;
  const auto rep_a = sweep_q(orig, hyper, expr, {0.0, 0.5}, mc, {set});
  const auto rep_b = sweep_q(swapped, hyper, mirror, {0.0, 0.5}, mc, {set});
  for (std::size_t qi = 0; qi < rep_a.rows.size(); ++qi) {
    for (std::size_t m = 0; m < rep_a.rows[qi].set_probs[0].size(); ++m) {
      const auto& pa = rep_a.rows[qi].set_probs[0][m];
      const auto& pb = rep_b.rows[qi].set_probs[0][m];
      CHECK(std::abs(pa.value - pb.value) <
            4.0 * std::hypot(pa.se, pb.se) + 0.006);
    }
  }
}

TEST_CASE("builtin scenarios cover both table shapes") {
  CHECK(builtin_scenarios().size() == 24);
  const auto xl1 = scenario_by_name("XL1");
  CHECK(xl1.n_star == 13);
  CHECK(xl1.probs == std::vector<double>{0.60, 0.15});
  const auto l2 = scenario_by_name("L2-3x2");
  CHECK(l2.n_star == 28);
  CHECK(l2.rows() == 3);
  CHECK_THROWS_AS(scenario_by_name("nope"), std::invalid_argument);
  SimScenario bad{"bad", 10, {0.3, 0.5}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("single-replicate medians equal the replicate's own values") {
  const auto scenario = scenario_by_name("XL1");
  McConfig mc;
  mc.samples = 4000;
  mc.seed = 77;
  ModelSet pair;
  pair.include_encompassing = false;
  const std::vector<double> grid{0.0, 0.5};
  const auto sim = run_simulation(scenario, mc, grid, 1, {pair});

  // Rebuild replicate 1's table from its dedicated stream and sweep it with
  // the replicate-scoped estimator streams.
  RngStream data(mc.seed, make_stream_id(0, StreamRole::kSimulationData, 1));
  std::vector<long long> y(2), n(2, scenario.n_star);
  for (int i = 0; i < 2; ++i) {
    y[i] = data.binomial(scenario.n_star, scenario.probs[i]);
  }
  const BinomialTable table(y, n);
  const auto expr = ConstraintExpr::parse("p[1]>p[2]", 2, std::nullopt);
  const auto report = sweep_q(table, BinomialHyper::uniform(2), expr, grid, mc,
                              {pair}, 1);
  for (std::size_t qi = 0; qi < grid.size(); ++qi) {
    for (std::size_t m = 0; m < sim.medians[qi][0].size(); ++m) {
      CHECK(sim.medians[qi][0][m].value ==
            doctest::Approx(report.rows[qi].set_probs[0][m].value).epsilon(1e-12));
    }
  }
}

TEST_CASE("simulation reports are reproducible and schedule-independent") {
  const auto scenario = scenario_by_name("XL1");
  McConfig mc;
  mc.samples = 1500;
  mc.seed = 9;
  ModelSet pair;
  pair.include_encompassing = false;
  const auto a = run_simulation(scenario, mc, {0.0, 0.5}, 6, {pair});
  const auto b = run_simulation(scenario, mc, {0.0, 0.5}, 6, {pair});
  CHECK(emit_simulation_report(a, ReportFormat::kJson) ==
        emit_simulation_report(b, ReportFormat::kJson));
}
