#include "ordtab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace ordtab {

double effect_size_h(double p1, double p2) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0)) {
    throw std::domain_error("effect_size_h: proportions must lie in (0,1)");
  }
  return std::abs(2.0 * std::asin(std::sqrt(p1)) - 2.0 * std::asin(std::sqrt(p2)));
}

std::string classify_effect_size(double h) {
  if (h < 0.35) return "S";
  if (h < 0.65) return "M";
  if (h < 0.90) return "L";
  return "XL";
}

void SimScenario::validate() const {
  if (n_star <= 0) throw std::invalid_argument("scenario: n* must be positive");
  if (probs.size() < 2) throw std::invalid_argument("scenario: need >= 2 rows");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] < 1.0)) {
      throw std::invalid_argument("scenario: probabilities must lie in (0,1)");
    }
    if (i > 0 && !(probs[i - 1] > probs[i])) {
      throw std::invalid_argument(
          "scenario: probabilities must be strictly decreasing");
    }
  }
}

const std::vector<SimScenario>& builtin_scenarios() {
  static const std::vector<SimScenario> scenarios = {
      {"S1", 392, {0.10, 0.05}},
      {"S2", 392, {0.50, 0.40}},
      {"S3", 392, {0.95, 0.90}},
      {"M1", 63, {0.30, 0.10}},
      {"M2", 63, {0.50, 0.26}},
      {"M3", 63, {0.90, 0.70}},
      {"L1", 25, {0.60, 0.22}},
      {"L2", 25, {0.80, 0.42}},
      {"L3", 25, {0.90, 0.56}},
      {"XL1", 13, {0.60, 0.15}},
      {"XL2", 13, {0.80, 0.20}},
      {"XL3", 13, {0.90, 0.25}},
      {"S1-3x2", 441, {0.10, 0.075, 0.05}},
      {"S2-3x2", 441, {0.50, 0.45, 0.40}},
      {"S3-3x2", 441, {0.95, 0.92, 0.90}},
      {"M1-3x2", 71, {0.30, 0.20, 0.10}},
      {"M2-3x2", 71, {0.50, 0.38, 0.26}},
      {"M3-3x2", 71, {0.90, 0.80, 0.70}},
      {"L1-3x2", 28, {0.60, 0.41, 0.22}},
      {"L2-3x2", 28, {0.80, 0.61, 0.42}},
      {"L3-3x2", 28, {0.90, 0.73, 0.56}},
      {"XL1-3x2", 15, {0.60, 0.30, 0.15}},
      {"XL2-3x2", 15, {0.80, 0.50, 0.20}},
      {"XL3-3x2", 15, {0.90, 0.60, 0.25}},
  };
  return scenarios;
}

SimScenario scenario_by_name(const std::string& name) {
  for (const SimScenario& s : builtin_scenarios()) {
    if (s.label == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string chain_constraint(int rows) {
  std::ostringstream os;
  for (int i = 1; i <= rows; ++i) {
    if (i > 1) os << '>';
    os << "p[" << i << "]";
  }
  return os.str();
}

}  // namespace

SimulationReport run_simulation(const SimScenario& scenario, const McConfig& mc,
                                const std::vector<double>& q_values,
                                int replicates,
                                const std::vector<ModelSet>& sets) {
  scenario.validate();
  mc.validate();
  if (replicates < 1) {
    throw std::invalid_argument("simulation: replicates must be >= 1");
  }
  const int r = scenario.rows();
  const ConstraintExpr constraint =
      ConstraintExpr::parse(chain_constraint(r), r, std::nullopt);
  const BinomialHyper hyper = BinomialHyper::uniform(r);

  std::vector<ComparisonReport> reports(static_cast<std::size_t>(replicates));
  const unsigned pool =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  for (int base = 0; base < replicates; base += static_cast<int>(pool)) {
    std::vector<std::future<void>> wave;
    const int hi = std::min(replicates, base + static_cast<int>(pool));
    for (int k = base; k < hi; ++k) {
      wave.push_back(std::async(std::launch::async, [&, k] {
        RngStream data_stream(
            mc.seed, make_stream_id(0, StreamRole::kSimulationData,
                                    static_cast<std::size_t>(k) + 1));
        std::vector<long long> y(static_cast<std::size_t>(r));
        std::vector<long long> n(static_cast<std::size_t>(r), scenario.n_star);
        for (int i = 0; i < r; ++i) {
          y[static_cast<std::size_t>(i)] =
              data_stream.binomial(scenario.n_star, scenario.probs[static_cast<std::size_t>(i)]);
        }
        BinomialTable table(std::move(y), std::move(n));
        reports[static_cast<std::size_t>(k)] =
            sweep_q(table, hyper, constraint, q_values, mc, sets,
                    static_cast<std::uint64_t>(k) + 1);
      }));
    }
    for (auto& f : wave) f.get();
  }

  SimulationReport out;
  out.scenario = scenario;
  out.replicates = replicates;
  out.seed = mc.seed;
  out.samples = mc.samples;
  out.burnin = mc.resolved_burnin();
  out.q_values = q_values;
  out.sets = sets;
  out.medians.resize(q_values.size());
  for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
    out.medians[qi].resize(sets.size());
    for (std::size_t si = 0; si < sets.size(); ++si) {
      const auto& first = reports[0].rows[qi].set_probs[si];
      for (std::size_t mi = 0; mi < first.size(); ++mi) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(replicates));
        for (const ComparisonReport& rep : reports) {
          values.push_back(rep.rows[qi].set_probs[si][mi].value);
        }
        ModelProbability m;
        m.model = first[mi].model;
        m.value = median_of(std::move(values));
        m.se = 0.0;
        out.medians[qi][si].push_back(m);
      }
    }
  }
  return out;
}

std::string emit_simulation_report(const SimulationReport& report,
                                   ReportFormat format) {
  using ordered_json = nlohmann::ordered_json;
  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["scenario"] = report.scenario.label;
    j["n_star"] = report.scenario.n_star;
    j["probs"] = report.scenario.probs;
    j["replicates"] = report.replicates;
    j["seed"] = report.seed;
    j["samples"] = report.samples;
    j["burnin"] = report.burnin;
    ordered_json rows = ordered_json::array();
    for (std::size_t qi = 0; qi < report.q_values.size(); ++qi) {
      ordered_json r;
      r["q"] = report.q_values[qi];
      ordered_json sets = ordered_json::array();
      for (std::size_t si = 0; si < report.sets.size(); ++si) {
        ordered_json set;
        set["label"] = report.sets[si].label();
        ordered_json med;
        for (const ModelProbability& m : report.medians[qi][si]) {
          med[m.model] = m.value;
        }
        set["median_probs"] = med;
        sets.push_back(set);
      }
      r["model_sets"] = sets;
      rows.push_back(r);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
  }

  std::ostringstream os;
  const bool md = format == ReportFormat::kMarkdown;
  if (md) {
    os << "| q |";
    for (std::size_t si = 0; si < report.sets.size(); ++si) {
      for (const ModelProbability& m : report.medians[0][si]) {
        os << " med P(" << m.model << "|" << report.sets[si].label() << ") |";
      }
    }
    os << '\n' << "|---|";
    for (std::size_t si = 0; si < report.sets.size(); ++si) {
      for (std::size_t k = 0; k < report.medians[0][si].size(); ++k) os << "---|";
    }
    os << '\n';
  } else {
    os << "q";
    for (std::size_t si = 0; si < report.sets.size(); ++si) {
      for (const ModelProbability& m : report.medians[0][si]) {
        os << ",medP(" << m.model << "|" << report.sets[si].label() << ")";
      }
    }
    os << '\n';
  }
  for (std::size_t qi = 0; qi < report.q_values.size(); ++qi) {
    if (md) {
      os << "| " << format_sig4(report.q_values[qi]) << " |";
      for (std::size_t si = 0; si < report.sets.size(); ++si) {
        for (const ModelProbability& m : report.medians[qi][si]) {
          os << ' ' << format_sig4(m.value) << " |";
        }
      }
    } else {
      os << format_sig4(report.q_values[qi]);
      for (std::size_t si = 0; si < report.sets.size(); ++si) {
        for (const ModelProbability& m : report.medians[qi][si]) {
          os << ',' << format_sig4(m.value);
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ordtab
