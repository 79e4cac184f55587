#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <vector>

#include "intlog/engines.hpp"
#include "intlog/lattice.hpp"
#include "intlog/structure.hpp"

namespace {

using namespace intlog;

InterpretedStructure eight_point_structure() {
  std::vector<std::string> ids;
  std::vector<double> weights(8, 0.125);
  std::vector<double> table;
  for (int i = 0; i < 8; ++i) {
    ids.push_back("q" + std::to_string(i));
    table.push_back(0.25 * i - 0.75);
  }
  Language lang({Symbol{"R_f", SymbolKind::relation, 1, 2.0}});
  std::map<std::string, RelTable> tables = {{"R_f", RelTable{1, table}}};
  return InterpretedStructure::make(FiniteMeasureSpace::make(ids, weights), lang, tables, {});
}

void BM_EvalNestedIntegral(benchmark::State& state) {
  InterpretedStructure m = eight_point_structure();
  Symbol rf = m.language.at("R_f");
  // int[x](int[y](|R_f(x) - R_f(y)| * R_f(x)))
  Formula fx = Formula::rel(rf, {Term::var("x")});
  Formula fy = Formula::rel(rf, {Term::var("y")});
  Formula diff = Formula::abs(Formula::add(fx, Formula::mul(Formula::real(-1.0), fy)));
  Formula body = Formula::mul(diff, fx);
  Formula f = Formula::integral(Formula::integral(body, "y"), "x");
  for (auto _ : state) benchmark::DoNotOptimize(eval_formula(m, f));
}
BENCHMARK(BM_EvalNestedIntegral);

void BM_StoneTheoryCheck(benchmark::State& state) {
  FiniteProbabilityAlgebra algebra =
      FiniteProbabilityAlgebra::make({0.3, 0.25, 0.2, 0.15, 0.1});
  InterpretedStructure model = stone_model(algebra);
  Theory theory = stone_theory(algebra);
  for (auto _ : state) benchmark::DoNotOptimize(check_theory(model, theory).all_pass);
}
BENCHMARK(BM_StoneTheoryCheck);

void BM_IndicatorStabilization(benchmark::State& state) {
  LatticeFn f;
  for (int i = 0; i < 64; ++i) f.values.push_back(i / 64.0);
  for (auto _ : state) {
    IndicatorSeq seq =
        indicator_seq({Constraint{f, Interval::open(0.26, 0.74)}}, SeqMode::open_sets,
                      SeqCombine::intersection);
    benchmark::DoNotOptimize(stabilization_index(seq));
  }
}
BENCHMARK(BM_IndicatorStabilization);

void BM_DaniellPipeline(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  DaniellInstance inst;
  std::vector<double> weights(static_cast<std::size_t>(n), 1.0 / n);
  LatticeFn gen;
  for (int i = 0; i < n; ++i) {
    inst.point_ids.push_back("p" + std::to_string(i));
    gen.values.push_back(2.0 * i / n - 0.5);
  }
  inst.generators.push_back(NamedFn{"g0", gen});
  inst.functional = PositiveFunctional::from_weights(weights);
  inst.epsilon = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(daniell_model(inst).report.all_pass);
}
BENCHMARK(BM_DaniellPipeline)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
