#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ordtab/binomial.hpp"
#include "ordtab/comparator.hpp"
#include "ordtab/multinomial.hpp"

namespace ordtab {

enum class SamplingKind { kBinomial, kMultinomial };
enum class TableFormat { kCsv, kJson };
enum class ReportFormat { kJson, kCsv, kMarkdown };

std::string to_string(SamplingKind kind);
SamplingKind sampling_kind_from_string(const std::string& s);
ReportFormat report_format_from_string(const std::string& s);

// A validated count grid plus its sampling kind. For product-binomial data
// the grid must have two columns: successes then failures, one row per
// factor level.
struct TableFile {
  SamplingKind kind = SamplingKind::kMultinomial;
  int rows = 0;
  int cols = 0;
  std::vector<long long> counts;  // row-major
  std::vector<std::string> row_labels;  // optional, may be empty
  std::vector<std::string> col_labels;

  BinomialTable to_binomial() const;
  MultinomialTable to_multinomial() const;
};

// Load from CSV (a bare count grid; the kind must be supplied) or JSON
// (kind, counts and optional labels carried in the file). Parse failures
// name the offending line.
TableFile load_table(const std::string& path, TableFormat format,
                     std::optional<SamplingKind> kind_hint = std::nullopt);

// Parse from in-memory text (same validation as load_table).
TableFile parse_table_csv(const std::string& text,
                          SamplingKind kind);
TableFile parse_table_json(const std::string& text,
                           std::optional<SamplingKind> kind_hint = std::nullopt);

// Serialize a table back to either format; CSV keeps only the grid.
std::string table_to_csv(const TableFile& table);
std::string table_to_json(const TableFile& table);

// Render a comparison report. JSON carries full provenance and standard
// errors at full precision and reserializes byte-identically; CSV and
// Markdown print four significant digits in a q-by-column layout.
std::string emit_report(const ComparisonReport& report, ReportFormat format);

// Short float formatting used by the text renderers (4 significant digits).
std::string format_sig4(double v);

}  // namespace ordtab
