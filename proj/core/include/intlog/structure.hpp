#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "intlog/formula.hpp"
#include "intlog/measure.hpp"

namespace intlog {

// Flat interpretation table for one relation: values indexed row-major by
// point indices, size n^arity.
struct RelTable {
  int arity = 1;
  std::vector<double> values;
};

// A simple structure: probability space with every singleton measurable,
// relations interpreted within their universal bounds, and `e` as the
// diagonal indicator. `probability` is false only for the zero-measure
// shortcut of the construction engines.
struct InterpretedStructure {
  FiniteMeasureSpace space;
  Language language;
  std::map<std::string, RelTable> tables;
  std::map<std::string, int> constants;
  bool probability = true;

  static InterpretedStructure make(FiniteMeasureSpace space, Language language,
                                   std::map<std::string, RelTable> tables,
                                   std::map<std::string, int> constants,
                                   double tol = kDefaultTol, bool require_probability = true);

  double rel_value(const std::string& name, std::span<const int> point_indices) const;
};

using Assignment = std::map<std::string, int>;

// Pointwise semantics: +, *, |.| act on reals; int[y](phi) averages phi over
// the space with y running through the points.
double eval_formula(const InterpretedStructure& structure, const Formula& formula,
                    const Assignment& assignment = {});

struct StatementCheck {
  std::string label;
  StatementRel rel = StatementRel::equal;
  double threshold = 0.0;
  double value = 0.0;
  // value - threshold for >=, |value - threshold| for ==.
  double residual = 0.0;
  bool pass = false;
  std::string error;  // nonempty when evaluation failed
};

struct CheckReport {
  std::vector<StatementCheck> statements;
  int pass_count = 0;
  double max_residual = 0.0;
  bool all_pass = false;
};

// Exact check at numerical tolerance tol (epsilon = 0).
StatementCheck check_statement(const InterpretedStructure& structure, const Statement& statement,
                               double tol = kDefaultTol);
// Approximate satisfaction: |value - r| <= eps + tol for ==, and
// value >= r - eps - tol for >=.
StatementCheck check_statement_approx(const InterpretedStructure& structure,
                                      const Statement& statement, double eps,
                                      double tol = 0.0);
CheckReport check_theory(const InterpretedStructure& structure, const Theory& theory,
                         double eps = 0.0, double tol = kDefaultTol);

// Almost-everywhere facts as closed integral statements, free variables
// integrated out in first-occurrence order:
//   zero:  int[x](|phi|) == 0
//   equal: int[x](|phi - psi|) == 0   (phi, psi must share free variables)
//   range: int[x](|prod_i (phi - r_i)|) == 0
Statement encode_ae_zero(const Formula& phi);
Statement encode_ae_equal(const Formula& phi, const Formula& psi);
Statement encode_ae_range(const Formula& phi, std::span<const double> values);

}  // namespace intlog
