#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "intlog/structure.hpp"

using namespace intlog;

namespace {

Language two_constant_language() {
  return Language({Symbol{"R_f", SymbolKind::relation, 1, 3.0},
                   Symbol{"c_a", SymbolKind::constant, 0, 0.0},
                   Symbol{"c_b", SymbolKind::constant, 0, 0.0}});
}

// two equally weighted points with f(a) = 1, f(b) = 3
InterpretedStructure half_half() {
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b"}, {0.5, 0.5});
  std::map<std::string, RelTable> tables;
  tables["R_f"] = RelTable{1, {1.0, 3.0}};
  return InterpretedStructure::make(space, two_constant_language(), tables,
                                    {{"c_a", 0}, {"c_b", 1}});
}

Formula rel1(const Language& lang, const std::string& name, const std::string& var) {
  return Formula::rel(lang.at(name), {Term::var(var)});
}

}  // namespace

TEST_CASE("structure construction validates the interpretation") {
  Language lang = two_constant_language();
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b"}, {0.5, 0.5});
  std::map<std::string, RelTable> good;
  good["R_f"] = RelTable{1, {1.0, 3.0}};
  std::map<std::string, int> consts = {{"c_a", 0}, {"c_b", 1}};

  CHECK_NOTHROW(InterpretedStructure::make(space, lang, good, consts));

  // not a probability space
  FiniteMeasureSpace heavy = FiniteMeasureSpace::make({"a", "b"}, {0.5, 0.9});
  CHECK_THROWS_AS(InterpretedStructure::make(heavy, lang, good, consts),
                  std::invalid_argument);

  // table for a symbol the language does not know
  auto bad = good;
  bad["R_g"] = RelTable{1, {0.0, 0.0}};
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, bad, consts),
                  std::invalid_argument);

  // arity mismatch
  bad = good;
  bad["R_f"].arity = 2;
  bad["R_f"].values = {0, 0, 0, 0};
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, bad, consts),
                  std::invalid_argument);

  // short table
  bad = good;
  bad["R_f"].values = {1.0};
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, bad, consts),
                  std::invalid_argument);

  // universal bound exceeded
  bad = good;
  bad["R_f"].values = {1.0, 4.0};
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, bad, consts),
                  std::invalid_argument);

  // missing relation table / missing or out-of-range constant
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, {}, consts),
                  std::invalid_argument);
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, good, {{"c_a", 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, good, {{"c_a", 0}, {"c_b", 7}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      InterpretedStructure::make(space, lang, good, {{"c_a", 0}, {"c_b", 1}, {"c_z", 0}}),
      std::invalid_argument);
}

TEST_CASE("equality is always the diagonal indicator") {
  Language lang = two_constant_language();
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b"}, {0.5, 0.5});
  std::map<std::string, RelTable> tables;
  tables["R_f"] = RelTable{1, {1.0, 3.0}};
  std::map<std::string, int> consts = {{"c_a", 0}, {"c_b", 1}};

  auto with_e = tables;
  with_e["e"] = RelTable{2, {1.0, 0.0, 0.0, 1.0}};
  CHECK_NOTHROW(InterpretedStructure::make(space, lang, with_e, consts));

  with_e["e"] = RelTable{2, {1.0, 0.5, 0.0, 1.0}};
  CHECK_THROWS_AS(InterpretedStructure::make(space, lang, with_e, consts),
                  std::invalid_argument);

  // the diagonal table is synthesized when absent
  InterpretedStructure m = InterpretedStructure::make(space, lang, tables, consts);
  std::vector<int> same = {1, 1};
  std::vector<int> diff = {0, 1};
  CHECK(m.rel_value("e", same) == 1.0);
  CHECK(m.rel_value("e", diff) == 0.0);
}

TEST_CASE("formula evaluation is the weighted average semantics") {
  InterpretedStructure m = half_half();
  const Language& lang = m.language;
  Formula f = rel1(lang, "R_f", "x");

  CHECK(eval_formula(m, f, {{"x", 0}}) == 1.0);
  CHECK(eval_formula(m, f, {{"x", 1}}) == 3.0);

  Formula mean = Formula::integral(f, "x");
  CHECK(eval_formula(m, mean) == doctest::Approx(2.0));

  // |f - 2| has mean 1
  Formula spread = Formula::integral(
      Formula::abs(Formula::add(f, Formula::real(-2.0))), "x");
  CHECK(eval_formula(m, spread) == doctest::Approx(1.0));

  // constants resolve through the interpretation
  Formula at_b = Formula::rel(lang.at("R_f"), {Term::cons("c_b")});
  CHECK(eval_formula(m, at_b) == 3.0);

  // nested integral of e gives the diagonal mass
  Formula e_xy = Formula::rel(Language::equality(), {Term::var("x"), Term::var("y")});
  Formula diag = Formula::integral(Formula::integral(e_xy, "y"), "x");
  CHECK(eval_formula(m, diag) == doctest::Approx(0.5));

  CHECK_THROWS_AS(eval_formula(m, f), std::invalid_argument);        // free var unassigned
  CHECK_THROWS_AS(eval_formula(m, f, {{"x", 5}}), std::invalid_argument);
  Formula ghost = Formula::rel(Symbol{"R_g", SymbolKind::relation, 1, 1.0},
                               {Term::var("x")});
  CHECK_THROWS_AS(eval_formula(m, ghost, {{"x", 0}}), std::invalid_argument);
}

TEST_CASE("statement checks use the approximate satisfaction rule") {
  InterpretedStructure m = half_half();
  Formula mean = Formula::integral(rel1(m.language, "R_f", "x"), "x");

  Statement eq{"mean", mean, StatementRel::equal, 2.0};
  StatementCheck c = check_statement(m, eq);
  CHECK(c.pass);
  CHECK(c.value == doctest::Approx(2.0));
  CHECK(c.residual == doctest::Approx(0.0));

  Statement off{"off", mean, StatementRel::equal, 2.3};
  CHECK_FALSE(check_statement(m, off).pass);
  CHECK(check_statement_approx(m, off, 0.3).pass);   // |2.0 - 2.3| <= 0.3
  CHECK_FALSE(check_statement_approx(m, off, 0.2).pass);

  Statement low{"low", mean, StatementRel::at_least, 2.5};
  StatementCheck l = check_statement(m, low);
  CHECK_FALSE(l.pass);
  CHECK(l.residual == doctest::Approx(-0.5));
  CHECK(check_statement_approx(m, low, 0.5).pass);   // 2.0 >= 2.5 - 0.5

  Statement open{"open", rel1(m.language, "R_f", "x"), StatementRel::equal, 0.0};
  CHECK_THROWS_AS(check_statement(m, open), std::invalid_argument);
}

TEST_CASE("theory reports aggregate per-statement results") {
  InterpretedStructure m = half_half();
  Formula mean = Formula::integral(rel1(m.language, "R_f", "x"), "x");
  Theory theory;
  theory.push_back({"", mean, StatementRel::equal, 2.0});
  theory.push_back({"too_high", mean, StatementRel::at_least, 2.5});
  theory.push_back({"open", rel1(m.language, "R_f", "x"), StatementRel::equal, 0.0});

  CheckReport report = check_theory(m, theory);
  REQUIRE(report.statements.size() == 3);
  CHECK(report.statements[0].label == "stmt0");  // default label
  CHECK(report.statements[0].pass);
  CHECK_FALSE(report.statements[1].pass);
  CHECK(report.statements[2].error != "");
  CHECK(report.pass_count == 1);
  CHECK_FALSE(report.all_pass);
  // shortfall of the >= statement dominates
  CHECK(report.max_residual == doctest::Approx(0.5));
}

TEST_CASE("almost-everywhere encodings close over the free variables") {
  InterpretedStructure m = half_half();
  Formula f = rel1(m.language, "R_f", "x");

  Statement zero = encode_ae_zero(f);
  CHECK(render_statement(zero) == "int[x](|R_f(x)|) == 0");
  CHECK(zero.rel == StatementRel::equal);
  CHECK(zero.threshold == 0.0);
  CHECK(eval_formula(m, zero.formula) == doctest::Approx(2.0));

  // closed bodies still gain one integral so the statement is a sentence
  Statement closed = encode_ae_zero(Formula::real(0.0));
  CHECK(closed.formula.is_closed());
  CHECK(eval_formula(m, closed.formula) == 0.0);

  Statement same = encode_ae_equal(f, f);
  CHECK(eval_formula(m, same.formula) == doctest::Approx(0.0));
  CHECK(check_statement(m, same).pass);

  Formula g_y = rel1(m.language, "R_f", "y");
  CHECK_THROWS_AS(encode_ae_equal(f, g_y), std::invalid_argument);

  // f takes values {1,3}: the matching range product vanishes a.e.
  std::vector<double> vals13 = {1.0, 3.0};
  Statement range = encode_ae_range(f, vals13);
  CHECK(check_statement(m, range).pass);
  std::vector<double> vals12 = {1.0, 2.0};
  CHECK_FALSE(check_statement(m, encode_ae_range(f, vals12)).pass);
  std::vector<double> dup = {1.0, 1.0};
  CHECK_THROWS_AS(encode_ae_range(f, dup), std::invalid_argument);
  CHECK_THROWS_AS(encode_ae_range(f, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("zero-weight points do not affect almost-everywhere facts") {
  Language lang({Symbol{"R_f", SymbolKind::relation, 1, 3.0},
                 Symbol{"R_g", SymbolKind::relation, 1, 3.0}});
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b", "ghost"},
                                                      {0.5, 0.5, 0.0});
  std::map<std::string, RelTable> tables;
  tables["R_f"] = RelTable{1, {1.0, 3.0, 0.0}};
  tables["R_g"] = RelTable{1, {1.0, 3.0, 2.5}};  // differs only at the null point
  InterpretedStructure m = InterpretedStructure::make(space, lang, tables, {});

  Statement same = encode_ae_equal(rel1(lang, "R_f", "x"), rel1(lang, "R_g", "x"));
  CHECK(check_statement(m, same).pass);
  // yet the functions are not identical pointwise
  CHECK(eval_formula(m, rel1(lang, "R_g", "x"), {{"x", 2}}) == 2.5);
}
