#include "intlog/formula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace intlog {

namespace {

const std::vector<std::string_view> kReserved = {"max", "min", "int", "e"};

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::rel:
      for (const Term& t : f.args()) {
        if (t.kind != Term::Kind::variable) continue;
        if (std::find(bound.begin(), bound.end(), t.name) != bound.end()) continue;
        if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
      }
      break;
    case Formula::Kind::real:
      break;
    case Formula::Kind::abs:
      collect_free(f.inner(), bound, out);
      break;
    case Formula::Kind::add:
    case Formula::Kind::mul:
      collect_free(f.lhs(), bound, out);
      collect_free(f.rhs(), bound, out);
      break;
    case Formula::Kind::integral:
      bound.push_back(f.var());
      collect_free(f.body(), bound, out);
      bound.pop_back();
      break;
  }
}

void collect_bound(const Formula& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::rel:
    case Formula::Kind::real:
      break;
    case Formula::Kind::abs:
      collect_bound(f.inner(), out);
      break;
    case Formula::Kind::add:
    case Formula::Kind::mul:
      collect_bound(f.lhs(), out);
      collect_bound(f.rhs(), out);
      break;
    case Formula::Kind::integral:
      if (std::find(out.begin(), out.end(), f.var()) == out.end()) out.push_back(f.var());
      collect_bound(f.body(), out);
      break;
  }
}

bool binds(const Formula& f, const std::string& var) {
  switch (f.kind()) {
    case Formula::Kind::rel:
    case Formula::Kind::real:
      return false;
    case Formula::Kind::abs:
      return binds(f.inner(), var);
    case Formula::Kind::add:
    case Formula::Kind::mul:
      return binds(f.lhs(), var) || binds(f.rhs(), var);
    case Formula::Kind::integral:
      return f.var() == var || binds(f.body(), var);
  }
  return false;
}

}  // namespace

struct Formula::Node {
  Kind kind;
  Symbol symbol;            // rel
  std::vector<Term> args;   // rel
  double value = 0.0;       // real
  Formula a, b;             // abs uses a; add/mul use a,b; integral uses a
  std::string var;          // integral
};

Language::Language() { symbols_.push_back(equality()); }

Language::Language(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  bool has_equality = false;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const Symbol& s = symbols_[i];
    if (s.name.empty()) throw std::invalid_argument("symbol with empty name");
    if (s.name == "e") {
      if (!(s == equality())) throw std::invalid_argument("symbol e is reserved for equality");
      has_equality = true;
    } else if (reserved(s.name)) {
      throw std::invalid_argument("symbol name is reserved: " + s.name);
    }
    if (s.kind == SymbolKind::relation) {
      if (s.arity < 1) throw std::invalid_argument("relation arity must be positive: " + s.name);
      if (!std::isfinite(s.bound) || s.bound < 0)
        throw std::invalid_argument("relation bound must be finite and nonnegative: " + s.name);
    } else if (s.arity != 0) {
      throw std::invalid_argument("constant symbol with nonzero arity: " + s.name);
    }
    for (std::size_t j = 0; j < i; ++j)
      if (symbols_[j].name == s.name)
        throw std::invalid_argument("duplicate symbol name: " + s.name);
  }
  if (!has_equality) symbols_.insert(symbols_.begin(), equality());
}

const Symbol& Language::equality() {
  static const Symbol e{"e", SymbolKind::relation, 2, 1.0};
  return e;
}

bool Language::reserved(std::string_view name) {
  return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

const Symbol* Language::find(std::string_view name) const {
  for (const Symbol& s : symbols_)
    if (s.name == name) return &s;
  return nullptr;
}

const Symbol& Language::at(std::string_view name) const {
  const Symbol* s = find(name);
  if (!s) throw std::invalid_argument("unknown symbol: " + std::string(name));
  return *s;
}

Formula Formula::rel(Symbol symbol, std::vector<Term> args) {
  if (symbol.kind != SymbolKind::relation)
    throw std::invalid_argument("not a relation symbol: " + symbol.name);
  if (static_cast<int>(args.size()) != symbol.arity)
    throw std::invalid_argument("arity mismatch for " + symbol.name);
  auto node = std::make_shared<Node>();
  node->kind = Kind::rel;
  node->symbol = std::move(symbol);
  node->args = std::move(args);
  return Formula(std::move(node));
}

Formula Formula::real(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("real constant must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Kind::real;
  node->value = value;
  return Formula(std::move(node));
}

Formula Formula::abs(Formula inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::abs;
  node->a = std::move(inner);
  return Formula(std::move(node));
}

Formula Formula::add(Formula lhs, Formula rhs) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::add;
  node->a = std::move(lhs);
  node->b = std::move(rhs);
  return Formula(std::move(node));
}

Formula Formula::mul(Formula lhs, Formula rhs) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::mul;
  node->a = std::move(lhs);
  node->b = std::move(rhs);
  return Formula(std::move(node));
}

Formula Formula::integral(Formula body, std::string var) {
  if (var.empty()) throw std::invalid_argument("integral variable must be named");
  if (binds(body, var))
    throw std::invalid_argument("variable " + var + " is already bound inside the body");
  auto node = std::make_shared<Node>();
  node->kind = Kind::integral;
  node->a = std::move(body);
  node->var = std::move(var);
  return Formula(std::move(node));
}

Formula::Kind Formula::kind() const {
  if (!node_) throw std::logic_error("empty formula");
  return node_->kind;
}

const Symbol& Formula::symbol() const { return node_->symbol; }
const std::vector<Term>& Formula::args() const { return node_->args; }
double Formula::value() const { return node_->value; }
const Formula& Formula::inner() const { return node_->a; }
const Formula& Formula::lhs() const { return node_->a; }
const Formula& Formula::rhs() const { return node_->b; }
const Formula& Formula::body() const { return node_->a; }
const std::string& Formula::var() const { return node_->var; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (node_->kind != other.node_->kind) return false;
  switch (node_->kind) {
    case Kind::rel:
      return node_->symbol == other.node_->symbol && node_->args == other.node_->args;
    case Kind::real:
      return node_->value == other.node_->value;
    case Kind::abs:
      return node_->a == other.node_->a;
    case Kind::add:
    case Kind::mul:
      return node_->a == other.node_->a && node_->b == other.node_->b;
    case Kind::integral:
      return node_->var == other.node_->var && node_->a == other.node_->a;
  }
  return false;
}

std::vector<std::string> Formula::free_vars() const {
  std::vector<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

bool Formula::is_closed() const { return free_vars().empty(); }

std::vector<std::string> Formula::bound_vars() const {
  std::vector<std::string> out;
  collect_bound(*this, out);
  return out;
}

double Formula::bound() const {
  switch (kind()) {
    case Kind::rel:
      return node_->symbol.bound;
    case Kind::real:
      return std::fabs(node_->value);
    case Kind::abs:
      return node_->a.bound();
    case Kind::add:
      return node_->a.bound() + node_->b.bound();
    case Kind::mul:
      return node_->a.bound() * node_->b.bound();
    case Kind::integral:
      return node_->a.bound();
  }
  return 0.0;
}

std::size_t Formula::node_count() const {
  switch (kind()) {
    case Kind::rel:
    case Kind::real:
      return 1;
    case Kind::abs:
    case Kind::integral:
      return 1 + node_->a.node_count();
    case Kind::add:
    case Kind::mul:
      return 1 + node_->a.node_count() + node_->b.node_count();
  }
  return 1;
}

Formula derive_lattice(LatticeKind kind, const Formula& lhs, const Formula& rhs) {
  Formula diff = Formula::add(lhs, Formula::mul(Formula::real(-1.0), rhs));
  Formula spread = Formula::abs(std::move(diff));
  if (kind == LatticeKind::min)
    spread = Formula::mul(Formula::real(-1.0), std::move(spread));
  Formula sum = Formula::add(Formula::add(lhs, rhs), std::move(spread));
  return Formula::mul(Formula::real(0.5), std::move(sum));
}

}  // namespace intlog
