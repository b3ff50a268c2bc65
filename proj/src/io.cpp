#include "ordtab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ordtab {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void input_error(const std::string& msg) {
  throw std::invalid_argument(msg);
}

long long parse_count(const std::string& token, int line_no) {
  std::string s = token;
  // trim
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) {
    input_error("empty count field at line " + std::to_string(line_no));
  }
  s = s.substr(b, e - b + 1);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    input_error("invalid count '" + s + "' at line " + std::to_string(line_no));
  }
  if (used != s.size()) {
    input_error("invalid count '" + s + "' at line " + std::to_string(line_no));
  }
  if (v < 0) {
    input_error("negative count at line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace

std::string to_string(SamplingKind kind) {
  return kind == SamplingKind::kBinomial ? "binomial" : "multinomial";
}

SamplingKind sampling_kind_from_string(const std::string& s) {
  if (s == "binomial") return SamplingKind::kBinomial;
  if (s == "multinomial") return SamplingKind::kMultinomial;
  input_error("unknown sampling kind '" + s + "'");
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "md") return ReportFormat::kMarkdown;
  input_error("unknown report format '" + s + "'");
}

BinomialTable TableFile::to_binomial() const {
  if (kind != SamplingKind::kBinomial) {
    input_error("table is not product-binomial");
  }
  if (cols != 2) {
    input_error("product-binomial tables need exactly two columns "
                "(successes, failures)");
  }
  std::vector<long long> y, n;
  for (int i = 0; i < rows; ++i) {
    y.push_back(counts[static_cast<std::size_t>(i) * 2]);
    n.push_back(counts[static_cast<std::size_t>(i) * 2] +
                counts[static_cast<std::size_t>(i) * 2 + 1]);
  }
  return BinomialTable(std::move(y), std::move(n));
}

MultinomialTable TableFile::to_multinomial() const {
  if (kind != SamplingKind::kMultinomial) {
    input_error("table is not multinomial");
  }
  return MultinomialTable(rows, cols, counts);
}

TableFile parse_table_csv(const std::string& text, SamplingKind kind) {
  TableFile out;
  out.kind = kind;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<long long> row;
    while (std::getline(ls, tok, ',')) {
      row.push_back(parse_count(tok, line_no));
    }
    if (out.cols == 0) {
      out.cols = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != out.cols) {
      input_error("ragged row at line " + std::to_string(line_no) + ": expected " +
                  std::to_string(out.cols) + " fields, got " +
                  std::to_string(row.size()));
    }
    out.counts.insert(out.counts.end(), row.begin(), row.end());
    ++out.rows;
  }
  if (out.rows == 0) input_error("table file is empty");
  return out;
}

TableFile parse_table_json(const std::string& text,
                           std::optional<SamplingKind> kind_hint) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    input_error(std::string("invalid JSON table: ") + e.what());
  }
  TableFile out;
  if (j.contains("kind")) {
    out.kind = sampling_kind_from_string(j["kind"].get<std::string>());
  } else if (kind_hint.has_value()) {
    out.kind = *kind_hint;
  } else {
    input_error("JSON table lacks a 'kind' field");
  }
  if (!j.contains("counts") || !j["counts"].is_array() || j["counts"].empty()) {
    input_error("JSON table lacks a nonempty 'counts' grid");
  }
  int line_no = 0;
  for (const auto& row : j["counts"]) {
    ++line_no;
    if (!row.is_array() || row.empty()) {
      input_error("counts row " + std::to_string(line_no) + " is not an array");
    }
    if (out.cols == 0) {
      out.cols = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != out.cols) {
      input_error("ragged row at line " + std::to_string(line_no));
    }
    for (const auto& v : row) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        input_error("negative or non-integer count at line " +
                    std::to_string(line_no));
      }
      out.counts.push_back(v.get<long long>());
    }
    ++out.rows;
  }
  if (j.contains("row_labels")) {
    out.row_labels = j["row_labels"].get<std::vector<std::string>>();
  }
  if (j.contains("col_labels")) {
    out.col_labels = j["col_labels"].get<std::vector<std::string>>();
  }
  return out;
}

TableFile load_table(const std::string& path, TableFormat format,
                     std::optional<SamplingKind> kind_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open table file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    input_error("table file is empty");
  }
  if (format == TableFormat::kCsv) {
    if (!kind_hint.has_value()) {
      input_error("CSV tables need an explicit sampling kind");
    }
    return parse_table_csv(text, *kind_hint);
  }
  return parse_table_json(text, kind_hint);
}

std::string table_to_csv(const TableFile& table) {
  std::ostringstream os;
  for (int i = 0; i < table.rows; ++i) {
    for (int j = 0; j < table.cols; ++j) {
      if (j) os << ',';
      os << table.counts[static_cast<std::size_t>(i) * table.cols + j];
    }
    os << '\n';
  }
  return os.str();
}

std::string table_to_json(const TableFile& table) {
  ordered_json j;
  j["kind"] = to_string(table.kind);
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < table.rows; ++i) {
    ordered_json row = ordered_json::array();
    for (int jx = 0; jx < table.cols; ++jx) {
      row.push_back(table.counts[static_cast<std::size_t>(i) * table.cols + jx]);
    }
    rows.push_back(row);
  }
  j["counts"] = rows;
  if (!table.row_labels.empty()) j["row_labels"] = table.row_labels;
  if (!table.col_labels.empty()) j["col_labels"] = table.col_labels;
  return j.dump(2) + "\n";
}

std::string format_sig4(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

namespace {

ordered_json estimate_json(const McEstimate& e) {
  return ordered_json{{"value", e.value}, {"se", e.se}};
}

}  // namespace

std::string emit_report(const ComparisonReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["kind"] = report.kind;
    j["constraint"] = report.constraint;
    j["seed"] = report.seed;
    j["samples"] = report.samples;
    j["burnin"] = report.burnin;
    ordered_json rows = ordered_json::array();
    for (const QRowResult& row : report.rows) {
      ordered_json r;
      r["q"] = row.q;
      r["t"] = row.t;
      r["bf_e0"] = estimate_json(row.bf_e0);
      r["bf_ce"] = estimate_json(row.bf_ce);
      r["bf_c0"] = estimate_json(row.bf_c0);
      r["prior_prob"] = estimate_json(row.prior_prob);
      r["posterior_prob"] = estimate_json(row.posterior_prob);
      ordered_json sets = ordered_json::array();
      for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
        ordered_json set;
        set["label"] = report.model_sets[s].label();
        ordered_json probs;
        for (const ModelProbability& m : row.set_probs[s]) {
          probs[m.model] = ordered_json{{"value", m.value}, {"se", m.se}};
        }
        set["probs"] = probs;
        sets.push_back(set);
      }
      r["model_sets"] = sets;
      rows.push_back(r);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
  }

  if (format == ReportFormat::kCsv) {
    std::ostringstream os;
    os << "q,bf_e0,bf_e0_se,bf_ce,bf_ce_se,bf_c0,bf_c0_se";
    for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
      const std::string label = report.model_sets[s].label();
      if (report.rows.empty()) continue;
      for (const ModelProbability& m : report.rows[0].set_probs[s]) {
        os << ",P(" << m.model << "|" << label << ")";
      }
    }
    os << '\n';
    for (const QRowResult& row : report.rows) {
      os << format_sig4(row.q) << ',' << format_sig4(row.bf_e0.value) << ','
         << format_sig4(row.bf_e0.se) << ',' << format_sig4(row.bf_ce.value)
         << ',' << format_sig4(row.bf_ce.se) << ','
         << format_sig4(row.bf_c0.value) << ',' << format_sig4(row.bf_c0.se);
      for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
        for (const ModelProbability& m : row.set_probs[s]) {
          os << ',' << format_sig4(m.value);
        }
      }
      os << '\n';
    }
    return os.str();
  }

  // Markdown: one Bayes-factor table, one posterior-probability table.
  std::ostringstream os;
  os << "| q | BF_e0 | BF_ce | BF_c0 |\n";
  os << "|---|-------|-------|-------|\n";
  for (const QRowResult& row : report.rows) {
    os << "| " << format_sig4(row.q) << " | " << format_sig4(row.bf_e0.value)
       << " | " << format_sig4(row.bf_ce.value) << " | "
       << format_sig4(row.bf_c0.value) << " |\n";
  }
  os << '\n';
  os << "| q |";
  for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
    const std::string label = report.model_sets[s].label();
    if (report.rows.empty()) continue;
    for (const ModelProbability& m : report.rows[0].set_probs[s]) {
      os << " P(" << m.model << "|" << label << ") |";
    }
  }
  os << '\n';
  os << "|---|";
  if (!report.rows.empty()) {
    for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
      for (std::size_t k = 0; k < report.rows[0].set_probs[s].size(); ++k) {
        os << "---|";
      }
    }
  }
  os << '\n';
  for (const QRowResult& row : report.rows) {
    os << "| " << format_sig4(row.q) << " |";
    for (std::size_t s = 0; s < report.model_sets.size(); ++s) {
      for (const ModelProbability& m : row.set_probs[s]) {
        os << ' ' << format_sig4(m.value) << " |";
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ordtab
