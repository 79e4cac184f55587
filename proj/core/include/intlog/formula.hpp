#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intlog/common.hpp"

namespace intlog {

enum class SymbolKind { relation, constant };

// Relation and constant symbols. Every relation carries a universal bound:
// interpretations must satisfy |R(args)| <= bound pointwise.
struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::relation;
  int arity = 0;
  double bound = 0.0;

  bool operator==(const Symbol&) const = default;
};

// A finite signature. The equality symbol `e` (binary, bound 1) is always
// present and is reserved, as are the connective keywords.
class Language {
 public:
  Language();
  explicit Language(std::vector<Symbol> symbols);

  static const Symbol& equality();
  static bool reserved(std::string_view name);

  const Symbol* find(std::string_view name) const;
  const Symbol& at(std::string_view name) const;  // throws on unknown symbol
  const std::vector<Symbol>& symbols() const { return symbols_; }

 private:
  std::vector<Symbol> symbols_;
};

struct Term {
  enum class Kind { variable, constant };
  Kind kind = Kind::variable;
  std::string name;

  static Term var(std::string name) { return {Kind::variable, std::move(name)}; }
  static Term cons(std::string name) { return {Kind::constant, std::move(name)}; }
  bool operator==(const Term&) const = default;
};

// Immutable formula AST. Core constructors only: relation application, real
// constant, absolute value, sum, product, and the integral binder. Everything
// else (subtraction, max, min, division by a literal) is surface sugar that
// expands to these.
class Formula {
 public:
  enum class Kind { rel, real, abs, add, mul, integral };

  Formula() = default;

  static Formula rel(Symbol symbol, std::vector<Term> args);
  static Formula real(double value);  // rejects non-finite values
  static Formula abs(Formula inner);
  static Formula add(Formula lhs, Formula rhs);
  static Formula mul(Formula lhs, Formula rhs);
  // Rejects bodies that already bind `var` somewhere inside (no shadowing).
  static Formula integral(Formula body, std::string var);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;

  const Symbol& symbol() const;            // rel
  const std::vector<Term>& args() const;   // rel
  double value() const;                    // real
  const Formula& inner() const;            // abs
  const Formula& lhs() const;              // add, mul
  const Formula& rhs() const;              // add, mul
  const Formula& body() const;             // integral
  const std::string& var() const;          // integral

  bool operator==(const Formula& other) const;

  // Free variables in first-occurrence order (left to right).
  std::vector<std::string> free_vars() const;
  bool is_closed() const;
  // All variable names bound by some integral inside the formula.
  std::vector<std::string> bound_vars() const;

  // Recursive sup bound: |phi| <= bound() in every structure over a
  // probability space interpreting each relation within its universal bound.
  double bound() const;

  std::size_t node_count() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

enum class LatticeKind { max, min };

// (phi + psi + |phi - psi|) / 2 for max, (phi + psi - |phi - psi|) / 2 for
// min, built from the core constructors.
Formula derive_lattice(LatticeKind kind, const Formula& lhs, const Formula& rhs);

enum class StatementRel { equal, at_least };

// `formula == threshold` or `formula >= threshold` with an optional label.
struct Statement {
  std::string label;
  Formula formula;
  StatementRel rel = StatementRel::equal;
  double threshold = 0.0;
};

using Theory = std::vector<Statement>;

std::string render_formula(const Formula& formula);
std::string render_statement(const Statement& statement);  // label excluded

}  // namespace intlog
