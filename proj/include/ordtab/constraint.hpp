#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ordtab {

// Inequality-constraint expressions over a vector of row probabilities
// (product-binomial) or an r x c probability grid (multinomial).
//
// Grammar (also the CLI --constraint format, byte for byte):
//   expr  ::= chain ('&' chain)*
//   chain ::= term (op term)+
//   op    ::= '<' | '>'
//   term  ::= 'p[' i ']' | 'p[' i ',' j ']' | 'cond(' i ',' j ')'
// Indices are 1-based. cond(i,j) is the row-conditional probability
// p[i,j] / sum_j' p[i,j']. Only strict comparisons are representable.

struct constraint_parse_error : std::invalid_argument {
  constraint_parse_error(const std::string& what, std::size_t position)
      : std::invalid_argument(what), pos(position) {}
  std::size_t pos;
};

class ConstraintExpr {
 public:
  struct Term {
    enum class Kind { kRow, kCell, kConditional };
    Kind kind;
    int i = 0;  // 0-based after validation
    int j = 0;
  };
  struct Chain {
    std::vector<Term> terms;
    std::vector<bool> less;  // less[k]: terms[k] < terms[k+1]
  };

  // Parse against table dimensions. cols is empty for the product-binomial
  // context, in which only p[i] terms are admissible; when cols is present
  // only cell and conditional terms are admissible.
  static ConstraintExpr parse(std::string_view text, int rows,
                              std::optional<int> cols);

  // Strict evaluation against a probability vector (binomial context).
  bool eval(std::span<const double> row_probs) const;

  // Strict evaluation against a row-major r x c grid (multinomial context).
  bool eval_grid(std::span<const double> grid, int rows, int cols) const;

  // Mirror image: every comparison flipped. Defined only for a single chain;
  // the complement of a conjunction is not a conjunction, so refuse it.
  std::optional<ConstraintExpr> mirrored() const;

  // Canonical text form; parse(str()) reproduces the expression.
  std::string str() const;

  int rows() const { return rows_; }
  std::optional<int> cols() const { return cols_; }
  const std::vector<Chain>& chains() const { return chains_; }
  std::size_t atom_count() const;

 private:
  std::vector<Chain> chains_;
  int rows_ = 0;
  std::optional<int> cols_;

  double term_value(const Term& t, std::span<const double> grid, int cols) const;
};

}  // namespace ordtab
