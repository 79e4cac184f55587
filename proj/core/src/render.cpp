#include <charconv>
#include <string>
#include <system_error>

#include "intlog/common.hpp"
#include "intlog/formula.hpp"

namespace intlog {

std::string format_real(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

// Precedence: sums 1, products 2, atoms 3. A node is parenthesized whenever
// its level is below the context minimum, which makes render/parse mutually
// inverse on the core AST.
int level(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::add:
      return 1;
    case Formula::Kind::mul:
      return 2;
    default:
      return 3;
  }
}

bool is_negation(const Formula& f) {
  return f.kind() == Formula::Kind::mul && f.lhs().kind() == Formula::Kind::real &&
         f.lhs().value() == -1.0;
}

void render(const Formula& f, int min_level, std::string& out) {
  if (level(f) < min_level) {
    out += '(';
    render(f, 0, out);
    out += ')';
    return;
  }
  switch (f.kind()) {
    case Formula::Kind::rel: {
      out += f.symbol().name;
      out += '(';
      bool first = true;
      for (const Term& t : f.args()) {
        if (!first) out += ',';
        first = false;
        out += t.name;
      }
      out += ')';
      break;
    }
    case Formula::Kind::real:
      out += format_real(f.value());
      break;
    case Formula::Kind::abs:
      out += '|';
      render(f.inner(), 0, out);
      out += '|';
      break;
    case Formula::Kind::add:
      render(f.lhs(), 1, out);
      if (is_negation(f.rhs())) {
        out += '-';
        render(f.rhs().rhs(), 2, out);
      } else {
        out += '+';
        render(f.rhs(), 2, out);
      }
      break;
    case Formula::Kind::mul:
      render(f.lhs(), 2, out);
      out += '*';
      render(f.rhs(), 3, out);
      break;
    case Formula::Kind::integral:
      out += "int[";
      out += f.var();
      out += "](";
      render(f.body(), 0, out);
      out += ')';
      break;
  }
}

}  // namespace

std::string render_formula(const Formula& formula) {
  std::string out;
  render(formula, 0, out);
  return out;
}

std::string render_statement(const Statement& statement) {
  std::string out = render_formula(statement.formula);
  out += statement.rel == StatementRel::equal ? " == " : " >= ";
  out += format_real(statement.threshold);
  return out;
}

}  // namespace intlog
