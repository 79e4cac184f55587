#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "intlog/engines.hpp"

using namespace intlog;

namespace {

LatticeFn fn(std::vector<double> v) { return LatticeFn{std::move(v)}; }

Combo combo_sum(std::string name, std::string a, std::string b) {
  return Combo{std::move(name), {LatticeExpr::Kind::sum, 0.0, std::move(a), std::move(b)}};
}

Combo combo_scale(std::string name, double c, std::string a) {
  return Combo{std::move(name), {LatticeExpr::Kind::scaled, c, std::move(a), ""}};
}

Combo combo_join(std::string name, std::string a, std::string b) {
  return Combo{std::move(name), {LatticeExpr::Kind::join_of, 0.0, std::move(a), std::move(b)}};
}

Combo combo_meet(std::string name, std::string a, std::string b) {
  return Combo{std::move(name), {LatticeExpr::Kind::meet_of, 0.0, std::move(a), std::move(b)}};
}

Combo combo_const(std::string name, double c) {
  return Combo{std::move(name), {LatticeExpr::Kind::constant, c, "", ""}};
}

DaniellInstance weighted_instance() {
  DaniellInstance inst;
  inst.point_ids = {"a", "b", "c", "d", "e1", "f1"};
  inst.generators.push_back({"g", fn({1.0, -0.5, 2.0, 0.25, 1.5, -1.0})});
  inst.generators.push_back({"h", fn({0.5, 1.0, -1.0, 2.0, 0.0, 0.5})});
  inst.combos.push_back(combo_sum("s", "g", "h"));
  inst.combos.push_back(combo_scale("t", 0.5, "g"));
  inst.combos.push_back(combo_join("u", "g", "h"));
  inst.combos.push_back(combo_meet("v", "g", "h"));
  inst.combos.push_back(combo_const("w", 1.5));
  inst.functional =
      PositiveFunctional::from_weights({0.05, 0.2, 0.15, 0.3, 0.1, 0.2});
  inst.epsilon = 0.05;
  return inst;
}

const Statement* find_stmt(const Theory& theory, const std::string& label) {
  for (const Statement& s : theory)
    if (s.label == label) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("instance functions resolve combos over the generators") {
  DaniellInstance inst = weighted_instance();
  std::vector<NamedFn> fns = instance_functions(inst);
  REQUIRE(fns.size() == 8);
  CHECK(fns[0].name == "one");
  CHECK(fns[0].fn.values == std::vector<double>(6, 1.0));
  CHECK(fns[1].name == "g");
  CHECK(fns[3].name == "s");
  CHECK(fns[3].fn.values[0] == 1.5);
  CHECK(fns[4].fn.values[2] == 1.0);                    // t = g / 2
  CHECK(fns[5].fn.values[1] == 1.0);                    // u = g v h
  CHECK(fns[6].fn.values[1] == -0.5);                   // v = g ^ h
  CHECK(fns[7].fn.values == std::vector<double>(6, 1.5));
}

TEST_CASE("instance validation rejects malformed inputs") {
  DaniellInstance inst;
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);  // no points

  inst.point_ids = {"p", "p"};
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  inst.point_ids = {"p", "q"};
  inst.generators.push_back({"f", fn({1.0})});  // wrong length
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  inst.generators = {{"f", fn({1.0, 2.0})}, {"f", fn({0.0, 0.0})}};
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  inst.generators = {{"f", fn({1.0, 2.0})}};
  inst.combos = {combo_sum("s", "f", "zzz")};
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  inst.combos = {combo_sum("one", "f", "f")};
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  inst.combos.clear();
  inst.generators.push_back({"one", fn({1.0, 2.0})});
  CHECK_THROWS_AS(instance_functions(inst), std::invalid_argument);

  // an explicit constant-1 generator is accepted and not duplicated
  inst.generators.back() = {"one", fn({1.0, 1.0})};
  std::vector<NamedFn> fns = instance_functions(inst);
  CHECK(fns.size() == 2);
  CHECK(fns[0].name == "f");
  CHECK(fns[1].name == "one");
}

TEST_CASE("the instance language names every function and point") {
  DaniellInstance inst = weighted_instance();
  Language lang = daniell_language(inst);
  CHECK(lang.at("R_one").bound == 1.0);
  CHECK(lang.at("R_g").bound == 2.0);        // max(1, sup|g|)
  CHECK(lang.at("R_s").bound == 2.25);       // sup|g + h|
  CHECK(lang.at("c_e1").kind == SymbolKind::constant);
  CHECK(lang.find("c_zz") == nullptr);
}

TEST_CASE("the instance theory covers separation, values, combos, integrals") {
  DaniellInstance inst = weighted_instance();
  Theory theory = daniell_theory(inst);

  CHECK(find_stmt(theory, "sep_a_b") != nullptr);
  CHECK(find_stmt(theory, "sep_b_a") == nullptr);  // unordered pairs only

  const Statement* pt = find_stmt(theory, "point_g_c");
  REQUIRE(pt != nullptr);
  CHECK(pt->threshold == 2.0);
  CHECK(render_statement(*pt) == "R_g(c_c) == 2");

  CHECK(find_stmt(theory, "const_one") != nullptr);
  CHECK(find_stmt(theory, "const_w") != nullptr);
  CHECK(find_stmt(theory, "sum_s") != nullptr);
  CHECK(find_stmt(theory, "scale_t") != nullptr);
  CHECK(find_stmt(theory, "join_u") != nullptr);
  CHECK(find_stmt(theory, "meet_v") != nullptr);

  const Statement* mean = find_stmt(theory, "integral_g");
  REQUIRE(mean != nullptr);
  // hidden weights already sum to 1, so the normalized value is the plain sum
  double expect = 0.05 * 1.0 + 0.2 * -0.5 + 0.15 * 2.0 + 0.3 * 0.25 + 0.1 * 1.5 + 0.2 * -1.0;
  CHECK(mean->threshold == doctest::Approx(expect));
  const Statement* unit = find_stmt(theory, "integral_one");
  REQUIRE(unit != nullptr);
  CHECK(unit->threshold == doctest::Approx(1.0));

  // the separation family is gated by the point-count cap
  Theory gated = daniell_theory(inst, 3);
  CHECK(find_stmt(gated, "sep_a_b") == nullptr);
  CHECK(find_stmt(gated, "point_g_c") != nullptr);
}

TEST_CASE("table-backed instances emit theories without a functional") {
  DaniellInstance inst;
  inst.point_ids = {"p", "q"};
  inst.generators.push_back({"f", fn({1.0, 3.0})});
  inst.functional_table = {{"one", 2.0}, {"f", 4.0}};

  Theory theory = daniell_theory(inst);
  const Statement* mean = find_stmt(theory, "integral_f");
  REQUIRE(mean != nullptr);
  CHECK(mean->threshold == doctest::Approx(2.0));  // 4 / 2 after normalization
  CHECK(find_stmt(theory, "integral_one")->threshold == doctest::Approx(1.0));

  // a vanishing table normalizes to the zero functional
  inst.functional_table = {{"one", 0.0}, {"f", 0.0}};
  Theory zero = daniell_theory(inst);
  CHECK(find_stmt(zero, "integral_f")->threshold == 0.0);

  inst.functional_table = {{"one", 2.0}};  // entry for f missing
  CHECK_THROWS_AS(daniell_theory(inst), std::invalid_argument);

  inst.functional_table = {{"one", -1.0}, {"f", 0.0}};
  CHECK_THROWS_AS(daniell_theory(inst), std::invalid_argument);

  inst.functional_table.clear();
  CHECK_THROWS_AS(daniell_theory(inst), std::invalid_argument);  // no functional at all

  inst.functional_table = {{"one", 2.0}, {"f", 4.0}};
  inst.functional = PositiveFunctional::from_weights({0.5, 0.5});
  CHECK_THROWS_AS(daniell_theory(inst), std::invalid_argument);  // both given

  // tables cannot drive the model construction
  inst.functional.reset();
  inst.epsilon = 0.1;
  CHECK_THROWS_AS(daniell_model(inst), std::invalid_argument);
}

TEST_CASE("construction recovers hidden weights exactly on separated values") {
  DaniellInstance inst;
  inst.point_ids = {"p0", "p1", "p2", "p3"};
  inst.generators.push_back({"f", fn({0.0, 1.0, 2.0, 3.0})});
  inst.functional = PositiveFunctional::from_weights({0.25, 0.25, 0.25, 0.25});
  inst.epsilon = 0.1;

  DaniellResult result = daniell_model(inst);
  const ConstructionReport& rep = result.report;
  CHECK_FALSE(rep.zero_measure_shortcut);
  CHECK(rep.shift == 1.0);        // lowest value 0 moves up to 1
  CHECK(rep.alpha == 5.0);        // shifted sup 4, plus the unit margin
  CHECK(rep.lambda0_in_band);
  CHECK(rep.lambda0_total == doctest::Approx(1.0));
  CHECK(rep.all_pass);
  REQUIRE(rep.lambda.size() == 4);
  for (double l : rep.lambda) CHECK(l == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rep.cells.size() == 4);   // distinct values split into singleton cells

  for (const GeneratorResidual& r : rep.residuals) {
    CHECK(r.pass);
    CHECK(r.residual <= r.bound + 1e-12);
    CHECK(r.bound == doctest::Approx(inst.epsilon * (1.0 + r.sup)));
  }

  CHECK(result.model.space.is_probability());
  CHECK(check_theory(result.model, daniell_theory(inst), inst.epsilon).all_pass);

  inst.epsilon = 0.0;
  CHECK_THROWS_AS(daniell_model(inst), std::invalid_argument);
}

TEST_CASE("construction handles mixed-sign generators and combos") {
  DaniellInstance inst = weighted_instance();
  DaniellResult result = daniell_model(inst);
  const ConstructionReport& rep = result.report;
  CHECK(rep.all_pass);
  CHECK(rep.lambda0_in_band);
  CHECK(rep.shift == doctest::Approx(2.0));  // lowest value is -1
  CHECK(result.model.space.is_probability());
  for (const GeneratorResidual& r : rep.residuals) CHECK(r.pass);
  CHECK(check_theory(result.model, daniell_theory(inst), inst.epsilon).all_pass);
}

TEST_CASE("a vanishing functional takes the zero-measure shortcut") {
  DaniellInstance inst;
  inst.point_ids = {"p", "q"};
  inst.generators.push_back({"f", fn({1.0, 2.0})});
  inst.functional = PositiveFunctional::from_weights({0.0, 0.0});
  inst.epsilon = 0.1;

  DaniellResult result = daniell_model(inst);
  CHECK(result.report.zero_measure_shortcut);
  CHECK(result.report.all_pass);
  CHECK(result.report.lambda == std::vector<double>{0.0, 0.0});
  CHECK_FALSE(result.model.probability);
  CHECK_FALSE(result.report.notes.empty());
}

TEST_CASE("a functional negative on the constant 1 is rejected") {
  DaniellInstance inst;
  inst.point_ids = {"p", "q"};
  inst.generators.push_back({"f", fn({1.0, 2.0})});
  inst.functional = PositiveFunctional::from_callable(
      2, [](const LatticeFn& h) { return -h.values[0] - h.values[1]; });
  inst.epsilon = 0.1;
  CHECK_THROWS_AS(daniell_model(inst), std::invalid_argument);
}

TEST_CASE("grid instances validate the sample coordinates") {
  RieszInstance inst;
  inst.base.point_ids = {"p0", "p1", "p2"};
  inst.base.generators.push_back({"f", fn({0.0, 0.5, 1.0})});
  inst.base.functional = PositiveFunctional::from_weights({1.0 / 3, 1.0 / 3, 1.0 / 3});
  inst.base.epsilon = 0.1;

  inst.grid = {0.0, 0.5};
  CHECK_THROWS_AS(riesz_model(inst), std::invalid_argument);
  inst.grid = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(riesz_model(inst), std::invalid_argument);
  inst.grid = {0.0, std::nan(""), 1.0};
  CHECK_THROWS_AS(riesz_model(inst), std::invalid_argument);
}

TEST_CASE("grid construction screens sampled continuity") {
  RieszInstance inst;
  const int n = 11;
  for (int i = 0; i < n; ++i) {
    inst.base.point_ids.push_back("p" + std::to_string(i));
    inst.grid.push_back(i / 10.0);
  }
  std::vector<double> xs = inst.grid;
  inst.base.generators.push_back({"x", fn(xs)});
  inst.base.functional =
      PositiveFunctional::from_weights(std::vector<double>(n, 1.0 / n));
  inst.base.epsilon = 0.1;

  DaniellResult smooth = riesz_model(inst);
  REQUIRE(smooth.report.dini.size() == 3);  // one, x, uniform_limit
  for (const CheckItem& item : smooth.report.dini) CHECK(item.pass);
  CHECK(smooth.report.dini_pass);
  CHECK(smooth.report.all_pass);
  CHECK(smooth.report.dini.back().what == "uniform_limit");

  // plant a step: one adjacent jump carries the entire range
  std::vector<double> step(n, 0.0);
  for (int i = 5; i < n; ++i) step[static_cast<std::size_t>(i)] = 1.0;
  inst.base.generators.push_back({"jump", fn(step)});
  DaniellResult rough = riesz_model(inst);
  bool flagged = false;
  for (const CheckItem& item : rough.report.dini)
    if (item.what == "continuity_jump") {
      flagged = true;
      CHECK_FALSE(item.pass);
    }
  CHECK(flagged);
  CHECK_FALSE(rough.report.dini_pass);
  CHECK_FALSE(rough.report.all_pass);
}

TEST_CASE("subspace push-down transfers integrals on full carriers") {
  PushdownInstance inst;
  inst.ambient = FiniteMeasureSpace::make({"a", "b", "c", "d"}, {0.1, 0.2, 0.3, 0.4});
  inst.algebra = SetAlgebra::generated(4, full_mask(4), std::vector<Subset>{0b0011});
  inst.carrier = 0b1111;
  inst.functions.push_back({"flat", fn({2.0, 2.0, 5.0, 5.0})});
  inst.functions.push_back({"pos", fn({1.0, 1.0, 2.0, 2.0})});

  PushdownReport rep = pushdown_check(inst);
  CHECK(rep.full);
  CHECK(rep.outer == doctest::Approx(1.0));
  REQUIRE(rep.transfers.size() == 2);
  for (const CheckItem& item : rep.transfers) CHECK(item.pass);
  // both functions have algebra-measurable positive support
  REQUIRE(rep.subclaim.size() == 2);
  for (const CheckItem& item : rep.subclaim) CHECK(item.pass);
  CHECK(rep.all_pass);
}

TEST_CASE("subspace push-down reports a witness cover when not full") {
  PushdownInstance inst;
  inst.ambient = FiniteMeasureSpace::make({"a", "b", "c", "d"}, {0.1, 0.2, 0.3, 0.4});
  inst.algebra = SetAlgebra::generated(4, full_mask(4), std::vector<Subset>{0b0011});
  inst.carrier = 0b0001;

  PushdownReport rep = pushdown_check(inst);
  CHECK_FALSE(rep.full);
  CHECK(rep.outer == doctest::Approx(0.3));
  CHECK(rep.witness_cover == 0b0011);
  CHECK_FALSE(rep.all_pass);
  CHECK(rep.transfers.empty());
}

TEST_CASE("subspace push-down flags non-measurable functions") {
  PushdownInstance inst;
  inst.ambient = FiniteMeasureSpace::make({"a", "b", "c", "d"}, {0.1, 0.2, 0.3, 0.4});
  inst.algebra = SetAlgebra::generated(4, full_mask(4), std::vector<Subset>{0b0011});
  inst.carrier = 0b1111;
  inst.functions.push_back({"ragged", fn({1.0, 2.0, 3.0, 4.0})});

  PushdownReport rep = pushdown_check(inst);
  CHECK(rep.full);
  REQUIRE(rep.transfers.size() == 1);
  CHECK_FALSE(rep.transfers[0].pass);
  CHECK_FALSE(rep.all_pass);
  // its support is the whole space, so the subclaim still runs and passes
  CHECK(rep.subclaim.size() == 1);

  PushdownInstance bad = inst;
  bad.functions = {{"short", fn({1.0})}};
  CHECK_THROWS_AS(pushdown_check(bad), std::invalid_argument);
  bad = inst;
  bad.algebra = SetAlgebra::generated(3, full_mask(3), std::vector<Subset>{0b001});
  CHECK_THROWS_AS(pushdown_check(bad), std::invalid_argument);
}
