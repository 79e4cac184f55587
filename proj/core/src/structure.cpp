#include "intlog/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace intlog {

namespace {

std::size_t table_size(int n_points, int arity) {
  std::size_t s = 1;
  for (int i = 0; i < arity; ++i) s *= static_cast<std::size_t>(n_points);
  return s;
}

RelTable diagonal_table(int n_points) {
  RelTable t;
  t.arity = 2;
  t.values.assign(table_size(n_points, 2), 0.0);
  for (int i = 0; i < n_points; ++i)
    t.values[static_cast<std::size_t>(i) * n_points + i] = 1.0;
  return t;
}

struct Env {
  const InterpretedStructure& structure;
  const Assignment& base;
  std::vector<std::pair<const std::string*, int>> binders;

  int resolve(const Term& term) const {
    if (term.kind == Term::Kind::constant) {
      auto it = structure.constants.find(term.name);
      if (it == structure.constants.end())
        throw std::invalid_argument("uninterpreted constant: " + term.name);
      return it->second;
    }
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (*it->first == term.name) return it->second;
    auto it = base.find(term.name);
    if (it == base.end())
      throw std::invalid_argument("unassigned free variable: " + term.name);
    return it->second;
  }
};

double eval_rec(const Formula& f, Env& env) {
  switch (f.kind()) {
    case Formula::Kind::rel: {
      const std::vector<Term>& args = f.args();
      std::vector<int> pts(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) pts[i] = env.resolve(args[i]);
      return env.structure.rel_value(f.symbol().name, pts);
    }
    case Formula::Kind::real:
      return f.value();
    case Formula::Kind::abs:
      return std::fabs(eval_rec(f.inner(), env));
    case Formula::Kind::add:
      return eval_rec(f.lhs(), env) + eval_rec(f.rhs(), env);
    case Formula::Kind::mul:
      return eval_rec(f.lhs(), env) * eval_rec(f.rhs(), env);
    case Formula::Kind::integral: {
      double sum = 0;
      env.binders.emplace_back(&f.var(), 0);
      for (int p = 0; p < env.structure.space.size(); ++p) {
        env.binders.back().second = p;
        sum += env.structure.space.weights[static_cast<std::size_t>(p)] *
               eval_rec(f.body(), env);
      }
      env.binders.pop_back();
      return sum;
    }
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace

InterpretedStructure InterpretedStructure::make(FiniteMeasureSpace space, Language language,
                                                std::map<std::string, RelTable> tables,
                                                std::map<std::string, int> constants,
                                                double tol, bool require_probability) {
  const int n = space.size();
  if (n < 1) throw std::invalid_argument("structure needs at least one point");
  if (require_probability && !space.is_probability(tol))
    throw std::invalid_argument("structure space is not a probability space (total = " +
                                format_real(space.total()) + ")");

  if (!tables.count("e")) tables.emplace("e", diagonal_table(n));
  for (const auto& [name, table] : tables) {
    const Symbol* sym = language.find(name);
    if (!sym || sym->kind != SymbolKind::relation)
      throw std::invalid_argument("table for unknown relation symbol: " + name);
    if (table.arity != sym->arity)
      throw std::invalid_argument("table arity mismatch for " + name);
    if (table.values.size() != table_size(n, table.arity))
      throw std::invalid_argument("missing table entry for " + name);
    for (double v : table.values) {
      if (!std::isfinite(v))
        throw std::invalid_argument("missing table entry for " + name);
      if (std::fabs(v) > sym->bound + tol)
        throw std::invalid_argument("universal bound violated for " + name);
    }
  }
  for (const Symbol& sym : language.symbols()) {
    if (sym.kind == SymbolKind::relation) {
      if (!tables.count(sym.name))
        throw std::invalid_argument("missing interpretation table for " + sym.name);
    } else {
      auto it = constants.find(sym.name);
      if (it == constants.end())
        throw std::invalid_argument("missing interpretation for constant " + sym.name);
      if (it->second < 0 || it->second >= n)
        throw std::invalid_argument("constant " + sym.name + " points outside the space");
    }
  }
  for (const auto& [name, point] : constants)
    if (const Symbol* sym = language.find(name); !sym || sym->kind != SymbolKind::constant)
      throw std::invalid_argument("interpretation for unknown constant: " + name);

  const RelTable& e = tables.at("e");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expected = i == j ? 1.0 : 0.0;
      if (std::fabs(e.values[static_cast<std::size_t>(i) * n + j] - expected) > tol)
        throw std::invalid_argument("equality must be interpreted as the diagonal indicator");
    }

  InterpretedStructure m;
  m.space = std::move(space);
  m.language = std::move(language);
  m.tables = std::move(tables);
  m.constants = std::move(constants);
  m.probability = require_probability || m.space.is_probability(tol);
  return m;
}

double InterpretedStructure::rel_value(const std::string& name,
                                       std::span<const int> point_indices) const {
  auto it = tables.find(name);
  if (it == tables.end())
    throw std::invalid_argument("missing interpretation table for " + name);
  const RelTable& t = it->second;
  if (static_cast<int>(point_indices.size()) != t.arity)
    throw std::invalid_argument("arity mismatch for " + name);
  std::size_t idx = 0;
  for (int p : point_indices) {
    if (p < 0 || p >= space.size())
      throw std::invalid_argument("point index out of range for " + name);
    idx = idx * static_cast<std::size_t>(space.size()) + static_cast<std::size_t>(p);
  }
  return t.values[idx];
}

double eval_formula(const InterpretedStructure& structure, const Formula& formula,
                    const Assignment& assignment) {
  for (const auto& [name, point] : assignment)
    if (point < 0 || point >= structure.space.size())
      throw std::invalid_argument("assignment of " + name + " is outside the space");
  Env env{structure, assignment, {}};
  return eval_rec(formula, env);
}

namespace {

StatementCheck check_core(const InterpretedStructure& structure, const Statement& statement,
                          double eps, double tol) {
  if (eps < 0) throw std::invalid_argument("negative epsilon");
  if (!std::isfinite(statement.threshold))
    throw std::invalid_argument("statement threshold must be finite");
  StatementCheck c;
  c.label = statement.label;
  c.rel = statement.rel;
  c.threshold = statement.threshold;
  if (!statement.formula.is_closed())
    throw std::invalid_argument("statement formula has free variables");
  c.value = eval_formula(structure, statement.formula);
  if (statement.rel == StatementRel::equal) {
    c.residual = std::fabs(c.value - statement.threshold);
    c.pass = c.residual <= eps + tol;
  } else {
    c.residual = c.value - statement.threshold;
    c.pass = c.value >= statement.threshold - eps - tol;
  }
  return c;
}

}  // namespace

StatementCheck check_statement(const InterpretedStructure& structure,
                               const Statement& statement, double tol) {
  return check_core(structure, statement, 0.0, tol);
}

StatementCheck check_statement_approx(const InterpretedStructure& structure,
                                      const Statement& statement, double eps, double tol) {
  return check_core(structure, statement, eps, tol);
}

CheckReport check_theory(const InterpretedStructure& structure, const Theory& theory,
                         double eps, double tol) {
  CheckReport report;
  report.all_pass = true;
  for (std::size_t i = 0; i < theory.size(); ++i) {
    StatementCheck c;
    try {
      c = check_core(structure, theory[i], eps, tol);
    } catch (const std::exception& ex) {
      c.label = theory[i].label;
      c.rel = theory[i].rel;
      c.threshold = theory[i].threshold;
      c.error = ex.what();
      c.pass = false;
    }
    if (c.label.empty()) c.label = "stmt" + std::to_string(i);
    if (c.pass) ++report.pass_count;
    report.all_pass = report.all_pass && c.pass;
    if (c.error.empty()) {
      double deviation = theory[i].rel == StatementRel::equal
                             ? c.residual
                             : std::max(0.0, -c.residual);
      report.max_residual = std::max(report.max_residual, deviation);
    }
    report.statements.push_back(std::move(c));
  }
  return report;
}

namespace {

std::string fresh_var(const Formula& body) {
  std::vector<std::string> taken = body.bound_vars();
  if (std::find(taken.begin(), taken.end(), "x") == taken.end()) return "x";
  for (int i = 1;; ++i) {
    std::string name = "x" + std::to_string(i);
    if (std::find(taken.begin(), taken.end(), name) == taken.end()) return name;
  }
}

Statement close_as_null_integral(Formula body) {
  std::vector<std::string> frees = body.free_vars();
  Formula f = Formula::abs(std::move(body));
  if (frees.empty()) {
    std::string var = fresh_var(f);
    f = Formula::integral(std::move(f), var);
  } else {
    for (auto it = frees.rbegin(); it != frees.rend(); ++it)
      f = Formula::integral(std::move(f), *it);
  }
  return Statement{"", std::move(f), StatementRel::equal, 0.0};
}

}  // namespace

Statement encode_ae_zero(const Formula& phi) { return close_as_null_integral(phi); }

Statement encode_ae_equal(const Formula& phi, const Formula& psi) {
  std::vector<std::string> a = phi.free_vars();
  std::vector<std::string> b = psi.free_vars();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b)
    throw std::invalid_argument("free-variable mismatch between the compared formulas");
  Formula body = Formula::add(phi, Formula::mul(Formula::real(-1.0), psi));
  return close_as_null_integral(std::move(body));
}

Statement encode_ae_range(const Formula& phi, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("range encoding needs at least one value");
  Formula product;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double r = values[i];
    if (!std::isfinite(r)) throw std::invalid_argument("range values must be finite");
    for (std::size_t j = 0; j < i; ++j)
      if (values[j] == r) throw std::invalid_argument("duplicate range value");
    Formula factor = r == 0.0
                         ? phi
                         : Formula::add(phi, Formula::mul(Formula::real(-1.0),
                                                          Formula::real(r)));
    product = i == 0 ? std::move(factor) : Formula::mul(std::move(product), std::move(factor));
  }
  return close_as_null_integral(std::move(product));
}

}  // namespace intlog
