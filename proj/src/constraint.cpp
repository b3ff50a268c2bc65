#include "ordtab/constraint.hpp"

#include <cctype>
#include <sstream>

namespace ordtab {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected '") + c + "' " + what);
  }
  bool consume_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_).starts_with(w)) {
      pos_ += w.size();
      return true;
    }
    return false;
  }
  int integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected an index");
    long v = 0;
    for (std::size_t k = start; k < pos_; ++k) {
      v = v * 10 + (text_[k] - '0');
      if (v > 1'000'000) fail("index out of range");
    }
    return static_cast<int>(v);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "constraint parse error at position " << pos_ << ": " << msg;
    throw constraint_parse_error(os.str(), pos_);
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ConstraintExpr ConstraintExpr::parse(std::string_view text, int rows,
                                     std::optional<int> cols) {
  if (rows < 1) throw std::invalid_argument("constraint: nonpositive row count");
  Cursor cur(text);
  ConstraintExpr expr;
  expr.rows_ = rows;
  expr.cols_ = cols;

  auto parse_term = [&]() -> Term {
    Term t;
    if (cur.consume_word("cond")) {
      cur.expect('(', "after cond");
      t.kind = Term::Kind::kConditional;
      t.i = cur.integer();
      cur.expect(',', "between cond indices");
      t.j = cur.integer();
      cur.expect(')', "closing cond");
    } else if (cur.consume('p')) {
      cur.expect('[', "after p");
      int i = cur.integer();
      if (cur.consume(',')) {
        t.kind = Term::Kind::kCell;
        t.i = i;
        t.j = cur.integer();
      } else {
        t.kind = Term::Kind::kRow;
        t.i = i;
      }
      cur.expect(']', "closing p[...]");
    } else {
      cur.fail("expected a term (p[i], p[i,j] or cond(i,j))");
    }
    if (t.i < 1 || t.i > rows) cur.fail("row index out of range");
    if (t.kind == Term::Kind::kRow) {
      if (cols.has_value()) {
        cur.fail("row-probability term in a cell-probability context");
      }
    } else {
      if (!cols.has_value()) {
        cur.fail("cell term in a row-probability context");
      }
      if (t.j < 1 || t.j > *cols) cur.fail("column index out of range");
    }
    t.i -= 1;
    t.j = t.kind == Term::Kind::kRow ? 0 : t.j - 1;
    return t;
  };

  do {
    Chain chain;
    chain.terms.push_back(parse_term());
    for (;;) {
      char op = cur.peek();
      if (op != '<' && op != '>') break;
      cur.consume(op);
      if (cur.peek() == '=') cur.fail("only strict comparisons are supported");
      chain.less.push_back(op == '<');
      chain.terms.push_back(parse_term());
    }
    if (chain.terms.size() < 2) cur.fail("chain needs at least one comparison");
    expr.chains_.push_back(std::move(chain));
  } while (cur.consume('&'));

  if (!cur.done()) cur.fail("unexpected trailing input");
  return expr;
}

double ConstraintExpr::term_value(const Term& t, std::span<const double> grid,
                                  int cols) const {
  switch (t.kind) {
    case Term::Kind::kRow:
      return grid[static_cast<std::size_t>(t.i)];
    case Term::Kind::kCell:
      return grid[static_cast<std::size_t>(t.i) * cols + t.j];
    case Term::Kind::kConditional: {
      double row_sum = 0.0;
      for (int j = 0; j < cols; ++j) {
        row_sum += grid[static_cast<std::size_t>(t.i) * cols + j];
      }
      return row_sum > 0.0
                 ? grid[static_cast<std::size_t>(t.i) * cols + t.j] / row_sum
                 : 0.0;
    }
  }
  return 0.0;
}

bool ConstraintExpr::eval(std::span<const double> row_probs) const {
  if (cols_.has_value()) {
    throw std::invalid_argument("constraint: grid expression applied to a row vector");
  }
  if (static_cast<int>(row_probs.size()) != rows_) {
    throw std::invalid_argument("constraint: dimension mismatch");
  }
  return eval_grid(row_probs, rows_, 1);
}

bool ConstraintExpr::eval_grid(std::span<const double> grid, int rows,
                               int cols) const {
  if (rows != rows_ || (cols_.has_value() && cols != *cols_)) {
    throw std::invalid_argument("constraint: dimension mismatch");
  }
  for (const Chain& chain : chains_) {
    for (std::size_t k = 0; k + 1 < chain.terms.size(); ++k) {
      double a = term_value(chain.terms[k], grid, cols);
      double b = term_value(chain.terms[k + 1], grid, cols);
      if (chain.less[k] ? !(a < b) : !(a > b)) return false;
    }
  }
  return true;
}

std::optional<ConstraintExpr> ConstraintExpr::mirrored() const {
  if (chains_.size() != 1) return std::nullopt;
  ConstraintExpr out = *this;
  for (auto&& flag : out.chains_[0].less) flag = !flag;
  return out;
}

std::string ConstraintExpr::str() const {
  std::ostringstream os;
  bool first_chain = true;
  for (const Chain& chain : chains_) {
    if (!first_chain) os << " & ";
    first_chain = false;
    for (std::size_t k = 0; k < chain.terms.size(); ++k) {
      const Term& t = chain.terms[k];
      switch (t.kind) {
        case Term::Kind::kRow:
          os << "p[" << t.i + 1 << "]";
          break;
        case Term::Kind::kCell:
          os << "p[" << t.i + 1 << "," << t.j + 1 << "]";
          break;
        case Term::Kind::kConditional:
          os << "cond(" << t.i + 1 << "," << t.j + 1 << ")";
          break;
      }
      if (k + 1 < chain.terms.size()) os << (chain.less[k] ? '<' : '>');
    }
  }
  return os.str();
}

std::size_t ConstraintExpr::atom_count() const {
  std::size_t n = 0;
  for (const Chain& chain : chains_) n += chain.less.size();
  return n;
}

}  // namespace ordtab
