#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "intlog/common.hpp"
#include "intlog/engines.hpp"

namespace intlog {

namespace {

Formula minus(Formula lhs, Formula rhs) {
  return Formula::add(std::move(lhs), Formula::mul(Formula::real(-1.0), std::move(rhs)));
}

std::vector<long long> dyadic_samples(long long last) {
  std::vector<long long> out;
  for (long long v = 1; v < last; v *= 2) out.push_back(v);
  out.push_back(last);
  return out;
}

// Normalized view of the instance functional: values divided by I(one), with
// the degenerate I(one) ~ 0 case flagged instead of divided through.
struct NormalizedFunctional {
  bool zero_measure = false;
  bool table_mode = false;
  double normalization = 1.0;
  std::optional<PositiveFunctional> fn;
  std::map<std::string, double> table;
};

NormalizedFunctional normalize_functional(const DaniellInstance& instance,
                                          const std::vector<NamedFn>& functions, double tol) {
  const std::size_t n = instance.point_ids.size();
  if (instance.functional.has_value() && !instance.functional_table.empty())
    throw std::invalid_argument("instance has both a functional and a value table");

  NormalizedFunctional out;
  if (instance.functional.has_value()) {
    const PositiveFunctional& raw = *instance.functional;
    if (raw.domain_size() != n)
      throw std::invalid_argument("functional domain differs from the point count");
    double on_one = raw(LatticeFn::constant(n, 1.0));
    if (!std::isfinite(on_one))
      throw std::invalid_argument("functional value on the constant 1 is not finite");
    if (on_one < -tol)
      throw std::invalid_argument("functional is negative on the constant 1");
    out.normalization = on_one;
    if (std::fabs(on_one) <= tol) {
      out.zero_measure = true;
      return out;
    }
    if (const std::vector<double>* w = raw.hidden_weights()) {
      std::vector<double> scaled(*w);
      for (double& v : scaled) v /= on_one;
      out.fn = PositiveFunctional::from_weights(std::move(scaled));
    } else {
      PositiveFunctional base = raw;
      out.fn = PositiveFunctional::from_callable(
          n, [base, on_one](const LatticeFn& f) { return base(f) / on_one; });
    }
    return out;
  }

  if (instance.functional_table.empty())
    throw std::invalid_argument("instance has no functional");
  out.table_mode = true;
  auto one = instance.functional_table.find("one");
  if (one == instance.functional_table.end())
    throw std::invalid_argument("functional table has no entry for one");
  double on_one = one->second;
  if (!std::isfinite(on_one))
    throw std::invalid_argument("functional table value for one is not finite");
  if (on_one < -tol)
    throw std::invalid_argument("functional is negative on the constant 1");
  out.normalization = on_one;
  out.zero_measure = std::fabs(on_one) <= tol;
  for (const NamedFn& f : functions) {
    auto it = instance.functional_table.find(f.name);
    if (it == instance.functional_table.end())
      throw std::invalid_argument("functional table has no entry for " + f.name);
    if (!std::isfinite(it->second))
      throw std::invalid_argument("functional table value for " + f.name + " is not finite");
    out.table[f.name] = out.zero_measure ? 0.0 : it->second / on_one;
  }
  return out;
}

}  // namespace

std::vector<NamedFn> instance_functions(const DaniellInstance& instance) {
  const std::size_t n = instance.point_ids.size();
  if (n == 0) throw std::invalid_argument("instance has no points");
  std::set<std::string> point_seen;
  for (const std::string& id : instance.point_ids) {
    if (id.empty()) throw std::invalid_argument("empty point id");
    if (!point_seen.insert(id).second)
      throw std::invalid_argument("duplicate point id: " + id);
  }

  std::vector<NamedFn> out;
  std::set<std::string> names;
  auto push = [&](std::string name, LatticeFn fn) {
    if (name.empty()) throw std::invalid_argument("empty function name");
    if (fn.size() != n)
      throw std::invalid_argument("function " + name + " has the wrong length");
    for (double v : fn.values)
      if (!std::isfinite(v))
        throw std::invalid_argument("function " + name + " has a non-finite value");
    if (!names.insert(name).second)
      throw std::invalid_argument("duplicate function name: " + name);
    out.push_back(NamedFn{std::move(name), std::move(fn)});
  };

  bool has_one = false;
  for (const NamedFn& g : instance.generators)
    if (g.name == "one") {
      has_one = true;
      for (double v : g.fn.values)
        if (v != 1.0)
          throw std::invalid_argument("the function named one must be constantly 1");
    }
  for (const Combo& c : instance.combos)
    if (c.name == "one")
      throw std::invalid_argument("the name one is reserved for the constant generator");
  if (!has_one) push("one", LatticeFn::constant(n, 1.0));

  for (const NamedFn& g : instance.generators) push(g.name, g.fn);

  for (const Combo& c : instance.combos) {
    auto operand = [&](const std::string& ref) -> const LatticeFn& {
      for (const NamedFn& f : out)
        if (f.name == ref) return f.fn;
      throw std::invalid_argument("combo " + c.name + " references unknown function: " + ref);
    };
    LatticeFn fn = LatticeFn::constant(1, 0.0);
    switch (c.expr.kind) {
      case LatticeExpr::Kind::constant:
        if (!std::isfinite(c.expr.scalar))
          throw std::invalid_argument("combo " + c.name + " has a non-finite constant");
        fn = LatticeFn::constant(n, c.expr.scalar);
        break;
      case LatticeExpr::Kind::sum:
        fn = add(operand(c.expr.a), operand(c.expr.b));
        break;
      case LatticeExpr::Kind::scaled:
        if (!std::isfinite(c.expr.scalar))
          throw std::invalid_argument("combo " + c.name + " has a non-finite factor");
        fn = scale(c.expr.scalar, operand(c.expr.a));
        break;
      case LatticeExpr::Kind::join_of:
        fn = join(operand(c.expr.a), operand(c.expr.b));
        break;
      case LatticeExpr::Kind::meet_of:
        fn = meet(operand(c.expr.a), operand(c.expr.b));
        break;
    }
    push(c.name, std::move(fn));
  }
  return out;
}

Language daniell_language(const DaniellInstance& instance) {
  std::vector<NamedFn> functions = instance_functions(instance);
  std::vector<Symbol> symbols;
  symbols.reserve(functions.size() + instance.point_ids.size());
  for (const NamedFn& f : functions)
    symbols.push_back(
        Symbol{"R_" + f.name, SymbolKind::relation, 1, std::max(1.0, f.fn.sup_norm())});
  for (const std::string& id : instance.point_ids)
    symbols.push_back(Symbol{"c_" + id, SymbolKind::constant, 0, 1.0});
  return Language(std::move(symbols));
}

Theory daniell_theory(const DaniellInstance& instance, int axiom1_cap) {
  if (axiom1_cap < 0) throw std::invalid_argument("negative axiom cap");
  std::vector<NamedFn> functions = instance_functions(instance);
  NormalizedFunctional nf = normalize_functional(instance, functions, kDefaultTol);
  Language lang = daniell_language(instance);
  const std::size_t n = instance.point_ids.size();

  auto rel_at_x = [&](const NamedFn& f) {
    return Formula::rel(lang.at("R_" + f.name), {Term::var("x")});
  };
  auto threshold_for = [&](const NamedFn& f) -> double {
    if (nf.zero_measure) return 0.0;
    if (nf.table_mode) return nf.table.at(f.name);
    return (*nf.fn)(f.fn);
  };

  Theory theory;

  // Distinct points stay separated.
  if (static_cast<int>(n) <= axiom1_cap) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Statement st;
        st.label = "sep_" + instance.point_ids[i] + "_" + instance.point_ids[j];
        st.formula = Formula::rel(lang.at("e"), {Term::cons("c_" + instance.point_ids[i]),
                                                 Term::cons("c_" + instance.point_ids[j])});
        st.rel = StatementRel::equal;
        st.threshold = 0.0;
        theory.push_back(std::move(st));
      }
  }

  // Relations reproduce the function values at the named points.
  for (const NamedFn& f : functions)
    for (std::size_t i = 0; i < n; ++i) {
      Statement st;
      st.label = "point_" + f.name + "_" + instance.point_ids[i];
      st.formula =
          Formula::rel(lang.at("R_" + f.name), {Term::cons("c_" + instance.point_ids[i])});
      st.rel = StatementRel::equal;
      st.threshold = f.fn.values[i];
      theory.push_back(std::move(st));
    }

  // Constant functions are constant almost everywhere.
  for (const NamedFn& f : functions)
    if (f.fn.min_value() == f.fn.max_value()) {
      Statement st = encode_ae_zero(minus(rel_at_x(f), Formula::real(f.fn.min_value())));
      st.label = "const_" + f.name;
      theory.push_back(std::move(st));
    }

  // Declared combinations hold almost everywhere.
  for (const Combo& c : instance.combos) {
    auto named = [&](const std::string& ref) -> const NamedFn& {
      for (const NamedFn& f : functions)
        if (f.name == ref) return f;
      throw std::logic_error("combo operand vanished: " + ref);
    };
    auto self = named(c.name);
    switch (c.expr.kind) {
      case LatticeExpr::Kind::constant:
        break;  // covered by the constant family above
      case LatticeExpr::Kind::sum: {
        Statement st = encode_ae_zero(minus(
            rel_at_x(self), Formula::add(rel_at_x(named(c.expr.a)), rel_at_x(named(c.expr.b)))));
        st.label = "sum_" + c.name;
        theory.push_back(std::move(st));
        break;
      }
      case LatticeExpr::Kind::scaled: {
        Statement st = encode_ae_zero(
            Formula::add(rel_at_x(self), Formula::mul(Formula::real(-c.expr.scalar),
                                                      rel_at_x(named(c.expr.a)))));
        st.label = "scale_" + c.name;
        theory.push_back(std::move(st));
        break;
      }
      case LatticeExpr::Kind::join_of: {
        Statement st = encode_ae_zero(
            minus(rel_at_x(self), derive_lattice(LatticeKind::max, rel_at_x(named(c.expr.a)),
                                                 rel_at_x(named(c.expr.b)))));
        st.label = "join_" + c.name;
        theory.push_back(std::move(st));
        break;
      }
      case LatticeExpr::Kind::meet_of: {
        Statement st = encode_ae_zero(
            minus(rel_at_x(self), derive_lattice(LatticeKind::min, rel_at_x(named(c.expr.a)),
                                                 rel_at_x(named(c.expr.b)))));
        st.label = "meet_" + c.name;
        theory.push_back(std::move(st));
        break;
      }
    }
  }

  // Integrals reproduce the normalized functional.
  for (const NamedFn& f : functions) {
    Statement st;
    st.label = "integral_" + f.name;
    st.formula = Formula::integral(rel_at_x(f), "x");
    st.rel = StatementRel::equal;
    st.threshold = threshold_for(f);
    theory.push_back(std::move(st));
  }
  return theory;
}

namespace {

struct Pipeline {
  DaniellResult out;
  std::vector<IndicatorSeq> cell_seqs;
  std::vector<long long> stabilized;
};

Pipeline run_pipeline(const DaniellInstance& instance, double tol) {
  if (!std::isfinite(instance.epsilon) || instance.epsilon <= 0)
    throw std::invalid_argument("epsilon must be positive");
  if (!instance.functional.has_value())
    throw std::invalid_argument("model construction needs an evaluable functional");

  std::vector<NamedFn> functions = instance_functions(instance);
  NormalizedFunctional nf = normalize_functional(instance, functions, tol);
  const std::size_t n = instance.point_ids.size();

  Pipeline pl;
  ConstructionReport& rep = pl.out.report;
  rep.epsilon = instance.epsilon;
  rep.normalization = nf.normalization;

  Language lang = daniell_language(instance);
  std::map<std::string, RelTable> tables;
  for (const NamedFn& f : functions) tables["R_" + f.name] = RelTable{1, f.fn.values};
  std::map<std::string, int> constants;
  for (std::size_t i = 0; i < n; ++i)
    constants["c_" + instance.point_ids[i]] = static_cast<int>(i);

  if (nf.zero_measure) {
    rep.zero_measure_shortcut = true;
    rep.lambda.assign(n, 0.0);
    rep.lambda0_total = 0.0;
    rep.lambda0_in_band = true;
    for (const NamedFn& f : functions) {
      GeneratorResidual r;
      r.name = f.name;
      r.sup = f.fn.sup_norm();
      r.bound = instance.epsilon * (1.0 + r.sup);
      r.pass = true;
      rep.residuals.push_back(std::move(r));
    }
    rep.all_pass = true;
    rep.notes.push_back("functional vanishes on the constant 1; zero measure returned");
    pl.out.model =
        InterpretedStructure::make(FiniteMeasureSpace::make(instance.point_ids, rep.lambda),
                                   lang, tables, constants, tol, /*require_probability=*/false);
    return pl;
  }

  const PositiveFunctional& normalized = *nf.fn;

  // Shift every function to be at least 1 so that 0 and alpha keep a unit gap
  // from all attained values.
  double low = functions.front().fn.min_value();
  for (const NamedFn& f : functions) low = std::min(low, f.fn.min_value());
  double shift = (low >= 1.0) ? 0.0 : 1.0 - low;
  rep.shift = shift;

  std::vector<LatticeFn> shifted;
  std::vector<double> sups;
  shifted.reserve(functions.size());
  for (const NamedFn& f : functions) {
    LatticeFn s = add(f.fn, LatticeFn::constant(n, shift));
    sups.push_back(s.max_value());
    shifted.push_back(std::move(s));
  }
  double max_sup = *std::max_element(sups.begin(), sups.end());
  double alpha = max_sup + 1.0;
  rep.alpha = alpha;
  double eta = instance.epsilon / (2.0 * (1.0 + max_sup));
  rep.epsilon_internal = eta;

  // Partition [0, alpha] into slots of width below eta, nudging every interior
  // endpoint to a nearby value that no function attains or charges.
  long long slots = static_cast<long long>(std::ceil(alpha / (0.9 * eta)));
  if (slots < 1) slots = 1;
  double delta = alpha / static_cast<double>(slots);
  std::vector<double> endpoints(static_cast<std::size_t>(slots) + 1);
  endpoints.front() = 0.0;
  endpoints.back() = alpha;
  for (long long j = 1; j < slots; ++j) {
    double center = delta * static_cast<double>(j);
    endpoints[static_cast<std::size_t>(j)] =
        find_inessential(shifted, center - 0.05 * delta, center + 0.05 * delta, normalized, tol);
  }
  rep.endpoints = endpoints;

  // Group points by the slot signature of the shifted functions.
  std::map<std::vector<int>, std::vector<int>> groups;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<int> sig;
    sig.reserve(shifted.size());
    for (const LatticeFn& f : shifted) {
      auto it = std::upper_bound(endpoints.begin(), endpoints.end(), f.values[x]);
      sig.push_back(static_cast<int>(it - endpoints.begin()) - 1);
    }
    groups[sig].push_back(static_cast<int>(x));
  }

  // Read each cell's mass off the stabilized open-box indicator sequence.
  for (auto& [sig, pts] : groups) {
    std::vector<Constraint> constraints;
    constraints.reserve(shifted.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      double lo = endpoints[static_cast<std::size_t>(sig[i])];
      double hi = endpoints[static_cast<std::size_t>(sig[i]) + 1];
      constraints.push_back(Constraint{shifted[i], Interval::open(lo, hi)});
    }
    IndicatorSeq seq =
        indicator_seq(std::move(constraints), SeqMode::open_sets, SeqCombine::intersection);
    std::optional<long long> st = stabilization_index(seq);
    if (!st) throw std::runtime_error("cell sequence failed to stabilize");
    rep.lambda0.push_back(normalized(seq.at(*st)));
    rep.cells.push_back(pts);
    pl.cell_seqs.push_back(std::move(seq));
    pl.stabilized.push_back(*st);
  }

  double total = std::accumulate(rep.lambda0.begin(), rep.lambda0.end(), 0.0);
  rep.lambda0_total = total;
  rep.lambda0_in_band = total >= 1.0 - instance.epsilon - tol &&
                        total <= 1.0 + instance.epsilon + tol;
  if (!(total > 0)) throw std::runtime_error("constructed measure vanished");

  rep.lambda.assign(n, 0.0);
  for (std::size_t k = 0; k < rep.cells.size(); ++k) {
    double share = rep.lambda0[k] / total / static_cast<double>(rep.cells[k].size());
    for (int p : rep.cells[k]) rep.lambda[static_cast<std::size_t>(p)] = share;
  }

  for (std::size_t i = 0; i < functions.size(); ++i) {
    GeneratorResidual r;
    r.name = functions[i].name;
    r.functional_value = normalized(functions[i].fn);
    double integral = 0.0;
    for (std::size_t x = 0; x < n; ++x) integral += rep.lambda[x] * functions[i].fn.values[x];
    r.integral_value = integral;
    r.residual = std::fabs(r.functional_value - r.integral_value);
    r.sup = sups[i];
    r.bound = instance.epsilon * (1.0 + r.sup);
    r.pass = r.residual <= r.bound + tol;
    rep.residuals.push_back(std::move(r));
  }

  bool residuals_ok = std::all_of(rep.residuals.begin(), rep.residuals.end(),
                                  [](const GeneratorResidual& r) { return r.pass; });
  rep.all_pass = rep.lambda0_in_band && residuals_ok;
  rep.notes.push_back("normalization on the constant 1: " + format_real(nf.normalization));
  rep.notes.push_back("cells occupied: " + std::to_string(rep.cells.size()) + " of " +
                      std::to_string(slots) + " slots");

  pl.out.model = InterpretedStructure::make(
      FiniteMeasureSpace::make(instance.point_ids, rep.lambda), lang, tables, constants, tol);
  return pl;
}

}  // namespace

DaniellResult daniell_model(const DaniellInstance& instance, double tol) {
  return std::move(run_pipeline(instance, tol).out);
}

DaniellResult riesz_model(const RieszInstance& instance, double tol) {
  const std::size_t n = instance.base.point_ids.size();
  if (instance.grid.size() != n)
    throw std::invalid_argument("grid size differs from the point count");
  for (double g : instance.grid)
    if (!std::isfinite(g)) throw std::invalid_argument("grid coordinate must be finite");
  for (std::size_t i = 1; i < n; ++i)
    if (!(instance.grid[i - 1] < instance.grid[i]))
      throw std::invalid_argument("grid coordinates must be strictly increasing");

  Pipeline pl = run_pipeline(instance.base, tol);
  ConstructionReport& rep = pl.out.report;
  std::vector<NamedFn> functions = instance_functions(instance.base);

  // Adjacent samples of a continuous function on a fine grid only move a
  // small fraction of the full range.
  for (const NamedFn& f : functions) {
    double allowed = kDiniJumpFactor * (f.fn.max_value() - f.fn.min_value());
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      worst = std::max(worst, std::fabs(f.fn.values[i] - f.fn.values[i - 1]));
    CheckItem item;
    item.what = "continuity_" + f.name;
    item.pass = worst <= allowed + tol;
    item.witness =
        "max adjacent jump " + format_real(worst) + " vs allowed " + format_real(allowed);
    rep.dini.push_back(std::move(item));
  }

  // The union of the cell sequences increases to 1; its sup-norm deviation
  // must shrink monotonically and reach exactly 0 at the last stabilization.
  CheckItem uniform;
  uniform.what = "uniform_limit";
  if (rep.zero_measure_shortcut || pl.cell_seqs.empty()) {
    uniform.pass = true;
    uniform.witness = "zero measure; no cells to cover";
  } else {
    long long last = *std::max_element(pl.stabilized.begin(), pl.stabilized.end());
    bool monotone = true;
    double prev = 2.0;
    double final_dev = 1.0;
    for (long long nn : dyadic_samples(last)) {
      double dev = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        double u = 0.0;
        for (const IndicatorSeq& seq : pl.cell_seqs) u = std::max(u, seq.at(nn).values[x]);
        dev = std::max(dev, 1.0 - u);
      }
      if (dev > prev + tol) monotone = false;
      prev = dev;
      final_dev = dev;
    }
    uniform.pass = monotone && final_dev == 0.0;
    uniform.witness = "deviation " + format_real(final_dev) + " at n = " + std::to_string(last) +
                      (monotone ? "" : "; deviation increased along the way");
  }
  rep.dini.push_back(std::move(uniform));

  rep.dini_pass = std::all_of(rep.dini.begin(), rep.dini.end(),
                              [](const CheckItem& c) { return c.pass; });
  rep.all_pass = rep.all_pass && rep.dini_pass;
  return std::move(pl.out);
}

PushdownReport pushdown_check(const PushdownInstance& instance, double tol) {
  const int n = instance.ambient.size();
  if (instance.algebra.point_count() != n)
    throw std::invalid_argument("algebra lives on a different point count");
  if (instance.algebra.universe() != instance.ambient.full())
    throw std::invalid_argument("algebra universe differs from the space");
  if (!subset_leq(instance.carrier, instance.ambient.full()))
    throw std::invalid_argument("carrier is not a subset of the space");
  for (const NamedFn& f : instance.functions)
    if (f.fn.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("function " + f.name + " has the wrong length");

  PremeasureTable nu = PremeasureTable::from_space(instance.ambient, instance.algebra);

  PushdownReport rep;
  rep.total = instance.ambient.total();
  rep.outer = outer_measure(nu, instance.carrier);
  rep.full = std::fabs(rep.outer - rep.total) <= tol;

  if (!rep.full) {
    double best = std::numeric_limits<double>::infinity();
    rep.witness_cover = instance.algebra.universe();
    for (Subset m : instance.algebra.members()) {
      if (!subset_leq(instance.carrier, m)) continue;
      double v = nu.value_of(m).value();
      if (v < best) {
        best = v;
        rep.witness_cover = m;
      }
    }
    rep.all_pass = false;
    return rep;
  }

  PremeasureTable traced = subspace_measure(nu, instance.carrier, tol);
  for (const NamedFn& f : instance.functions) {
    CheckItem item;
    item.what = "transfer_" + f.name;
    try {
      double ambient_side = integral_on_algebra(nu, f.fn.values, tol);
      double carrier_side = integral_on_algebra(traced, f.fn.values, tol);
      item.pass = std::fabs(ambient_side - carrier_side) <= tol;
      item.witness =
          "carrier " + format_real(carrier_side) + " vs ambient " + format_real(ambient_side);
    } catch (const std::exception& ex) {
      item.pass = false;
      item.witness = ex.what();
    }
    rep.transfers.push_back(std::move(item));
  }

  // Open-support indicator sequences stay below the measure of their target
  // whenever that target belongs to the algebra, and meet it in the limit.
  for (const NamedFn& f : instance.functions) {
    Subset support = 0;
    for (int i = 0; i < n; ++i)
      if (f.fn.values[static_cast<std::size_t>(i)] > 0) support |= Subset{1} << i;
    if (!instance.algebra.contains(support)) continue;

    CheckItem item;
    item.what = "subclaim_" + f.name;
    IndicatorSeq seq = indicator_seq({Constraint{f.fn, Interval::greater_than(0.0)}},
                                     SeqMode::open_sets, SeqCombine::intersection);
    std::optional<long long> st = stabilization_index(seq);
    double target = nu.value_of(support).value();
    if (!st) {
      item.pass = false;
      item.witness = "sequence did not stabilize";
    } else {
      bool below = true;
      double limit = 0.0;
      for (long long nn : dyadic_samples(*st)) {
        LatticeFn stage = seq.at(nn);
        double value = 0.0;
        for (int i = 0; i < n; ++i)
          value += instance.ambient.weights[static_cast<std::size_t>(i)] *
                   stage.values[static_cast<std::size_t>(i)];
        if (value > target + tol) below = false;
        limit = value;
      }
      item.pass = below && std::fabs(limit - target) <= tol;
      item.witness = "limit " + format_real(limit) + " vs measure " + format_real(target);
    }
    rep.subclaim.push_back(std::move(item));
  }

  auto ok = [](const std::vector<CheckItem>& items) {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.pass; });
  };
  rep.all_pass = rep.full && ok(rep.transfers) && ok(rep.subclaim);
  return rep;
}

}  // namespace intlog
