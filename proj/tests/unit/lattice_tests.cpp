#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "intlog/lattice.hpp"

using namespace intlog;

namespace {

LatticeFn fn(std::vector<double> v) { return LatticeFn{std::move(v)}; }

const LatticeFn kRamp = fn({0.0, 1.0, 2.0, 3.0});
const std::vector<double> kUniform4 = {0.25, 0.25, 0.25, 0.25};

}  // namespace

TEST_CASE("vector lattice operations are pointwise") {
  LatticeFn a = fn({1.0, -2.0, 0.5});
  LatticeFn b = fn({0.0, 3.0, 0.5});
  CHECK(add(a, b).values == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(sub(a, b).values == std::vector<double>{1.0, -5.0, 0.0});
  CHECK(scale(-2.0, a).values == std::vector<double>{-2.0, 4.0, -1.0});
  CHECK(join(a, b).values == std::vector<double>{1.0, 3.0, 0.5});
  CHECK(meet(a, b).values == std::vector<double>{0.0, -2.0, 0.5});
  CHECK(abs_fn(a).values == std::vector<double>{1.0, 2.0, 0.5});
  CHECK(a.min_value() == -2.0);
  CHECK(a.max_value() == 1.0);
  CHECK(a.sup_norm() == 2.0);
  CHECK(LatticeFn::constant(2, 7.0).values == std::vector<double>{7.0, 7.0});
  CHECK_THROWS_AS(add(a, fn({1.0})), std::invalid_argument);
}

TEST_CASE("weight functionals are positive and linear") {
  PositiveFunctional I = PositiveFunctional::from_weights({0.2, 0.3, 0.5});
  LatticeFn f = fn({1.0, 2.0, 4.0});
  LatticeFn g = fn({-1.0, 0.0, 2.0});
  CHECK(I(f) == doctest::Approx(0.2 + 0.6 + 2.0));
  CHECK(I(add(scale(2.0, f), scale(3.0, g))) ==
        doctest::Approx(2 * I(f) + 3 * I(g)).epsilon(1e-12));
  REQUIRE(I.hidden_weights() != nullptr);
  CHECK((*I.hidden_weights())[2] == 0.5);
  CHECK(I.domain_size() == 3);

  CHECK_THROWS_AS(I(fn({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(PositiveFunctional::from_weights({}), std::invalid_argument);
  CHECK_THROWS_AS(PositiveFunctional::from_weights({-0.1}), std::invalid_argument);

  PositiveFunctional J = PositiveFunctional::from_callable(
      3, [](const LatticeFn& h) { return h.values[0]; });
  CHECK(J(f) == 1.0);
  CHECK(J.hidden_weights() == nullptr);
  CHECK_THROWS_AS(PositiveFunctional::from_callable(0, nullptr), std::invalid_argument);
}

TEST_CASE("interval factories and membership") {
  Interval gt = Interval::greater_than(0.5);
  CHECK_FALSE(gt.contains(0.5));
  CHECK(gt.contains(0.5000001));
  CHECK(gt.is_open_set());
  CHECK_FALSE(gt.is_closed_set());

  Interval seg = Interval::closed(-1.0, 1.0);
  CHECK(seg.contains(-1.0));
  CHECK(seg.contains(1.0));
  CHECK_FALSE(seg.contains(1.0000001));
  CHECK(seg.is_closed_set());

  Interval pt = Interval::point(2.0);
  CHECK(pt.contains(2.0));
  CHECK_FALSE(pt.contains(2.0 + 1e-9));

  CHECK(Interval::less_than(0.0).contains(-100.0));
  CHECK(Interval::at_most(0.0).contains(0.0));
  CHECK(Interval::at_least(0.0).is_closed_set());

  CHECK_THROWS_AS(Interval::open(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interval::closed(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Interval::open(std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("open-mode sequences rise to the preimage indicator") {
  IndicatorSeq seq = indicator_seq({Constraint{kRamp, Interval::greater_than(0.5)}},
                                   SeqMode::open_sets, SeqCombine::intersection);
  CHECK(seq.target() == std::vector<std::uint8_t>{0, 1, 1, 1});
  CHECK(seq.at(1).values == std::vector<double>{0.0, 0.5, 1.0, 1.0});
  CHECK(seq.at(2).values == std::vector<double>{0.0, 1.0, 1.0, 1.0});
  CHECK(stabilization_index(seq) == 2);

  // monotone increasing, supported inside the target
  for (long long n = 1; n <= 6; ++n) {
    LatticeFn lo = seq.at(n), hi = seq.at(n + 1);
    for (std::size_t x = 0; x < lo.size(); ++x) {
      CHECK(lo.values[x] <= hi.values[x]);
      if (!seq.target()[x]) CHECK(lo.values[x] == 0.0);
    }
  }
}

TEST_CASE("bounded open intervals and unions combine pointwise") {
  IndicatorSeq band = indicator_seq({Constraint{kRamp, Interval::open(0.5, 2.5)}},
                                    SeqMode::open_sets, SeqCombine::intersection);
  CHECK(band.target() == std::vector<std::uint8_t>{0, 1, 1, 0});
  CHECK(stabilization_index(band) == 2);

  // empty target stabilizes immediately
  IndicatorSeq none = indicator_seq({Constraint{kRamp, Interval::greater_than(3.0)}},
                                    SeqMode::open_sets, SeqCombine::intersection);
  CHECK(none.target() == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK(stabilization_index(none) == 1);

  IndicatorSeq both = indicator_seq({Constraint{kRamp, Interval::less_than(0.5)},
                                     Constraint{kRamp, Interval::greater_than(2.5)}},
                                    SeqMode::open_sets, SeqCombine::set_union);
  CHECK(both.target() == std::vector<std::uint8_t>{1, 0, 0, 1});
  LatticeFn u = both.at(2);
  CHECK(u.values[0] == 1.0);
  CHECK(u.values[3] == 1.0);
  CHECK(u.values[1] == 0.0);
  CHECK(u.values[2] == 0.0);
}

TEST_CASE("closed-mode sequences stay above the preimage indicator") {
  IndicatorSeq seq = indicator_seq({Constraint{kRamp, Interval::point(1.0)}},
                                   SeqMode::closed_sets, SeqCombine::intersection);
  CHECK(seq.target() == std::vector<std::uint8_t>{0, 1, 0, 0});
  CHECK(seq.at(1).values == std::vector<double>{0.0, 1.0, 0.0, 0.0});
  CHECK(stabilization_index(seq) == 1);
  for (long long n = 1; n <= 6; ++n) {
    LatticeFn hi = seq.at(n), lo = seq.at(n + 1);
    for (std::size_t x = 0; x < hi.size(); ++x) {
      CHECK(hi.values[x] >= lo.values[x]);
      if (seq.target()[x]) CHECK(hi.values[x] == 1.0);
    }
  }

  // mode/interval mismatches are rejected
  CHECK_THROWS_AS(indicator_seq({Constraint{kRamp, Interval::point(1.0)}},
                                SeqMode::open_sets, SeqCombine::intersection),
                  std::invalid_argument);
  CHECK_THROWS_AS(indicator_seq({Constraint{kRamp, Interval::open(0.0, 1.0)}},
                                SeqMode::closed_sets, SeqCombine::intersection),
                  std::invalid_argument);
  CHECK_THROWS_AS(indicator_seq({}, SeqMode::open_sets, SeqCombine::intersection),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      indicator_seq({Constraint{kRamp, Interval::greater_than(0.0)},
                     Constraint{fn({1.0}), Interval::greater_than(0.0)}},
                    SeqMode::open_sets, SeqCombine::intersection),
      std::invalid_argument);
}

TEST_CASE("clamp form matches the truncation formula for half-lines") {
  // n * (min(f, a + 1/n) - min(f, a)) equals clamp(n (f - a), 0, 1); exactly
  // so at dyadic thresholds with power-of-two n, within rounding elsewhere.
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> vd(-4.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> vals(6);
    for (double& v : vals) v = vd(rng);
    LatticeFn f = fn(vals);

    double alpha = 0.75;  // dyadic
    for (long long n : {1LL, 2LL, 4LL, 64LL}) {
      LatticeFn direct = indicator_seq({Constraint{f, Interval::greater_than(alpha)}},
                                       SeqMode::open_sets, SeqCombine::intersection)
                             .at(n);
      double inv = 1.0 / static_cast<double>(n);
      for (std::size_t x = 0; x < f.size(); ++x) {
        double trunc = static_cast<double>(n) *
                       (std::min(vals[x], alpha + inv) - std::min(vals[x], alpha));
        CHECK(direct.values[x] == trunc);
      }
    }

    double rough = vd(rng);
    for (long long n : {3LL, 7LL, 100LL}) {
      LatticeFn direct = indicator_seq({Constraint{f, Interval::greater_than(rough)}},
                                       SeqMode::open_sets, SeqCombine::intersection)
                             .at(n);
      double inv = 1.0 / static_cast<double>(n);
      for (std::size_t x = 0; x < f.size(); ++x) {
        double trunc = static_cast<double>(n) *
                       (std::min(vals[x], rough + inv) - std::min(vals[x], rough));
        CHECK(direct.values[x] == doctest::Approx(trunc).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("value sequences pick out single levels") {
  CHECK(value_seq(kRamp, 2.0, 1).values == std::vector<double>{0.0, 0.0, 1.0, 0.0});
  LatticeFn near = value_seq(kRamp, 1.75, 2);
  CHECK(near.values[2] == doctest::Approx(0.5));
  CHECK(near.values[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(value_seq(kRamp, 1.0, 0), std::invalid_argument);
}

TEST_CASE("inessential values have vanishing level measure") {
  PositiveFunctional I = PositiveFunctional::from_weights(kUniform4);

  InessentialCheck miss = is_inessential(kRamp, 1.5, I);
  CHECK(miss.inessential);
  CHECK(miss.limit == 0.0);  // exact: the stabilized term is identically zero

  InessentialCheck hit = is_inessential(kRamp, 1.0, I);
  CHECK_FALSE(hit.inessential);
  CHECK(hit.limit == doctest::Approx(0.25));

  // a null functional makes every value inessential
  PositiveFunctional Z = PositiveFunctional::from_weights({0.0, 0.0, 0.0, 0.0});
  CHECK(is_inessential(kRamp, 1.0, Z).inessential);

  CHECK_THROWS_AS(is_inessential(fn({1.0}), 0.5, I), std::invalid_argument);
}

TEST_CASE("inessential search scans midpoint first, then dyadic points") {
  PositiveFunctional I = PositiveFunctional::from_weights(kUniform4);
  std::vector<LatticeFn> fs = {kRamp};
  CHECK(find_inessential(fs, 0.2, 0.8, I) == doctest::Approx(0.5));
  // midpoint 1.0 is attained, so the scan moves to 0.5 + 1/4 of the width
  CHECK(find_inessential(fs, 0.5, 1.5, I) == doctest::Approx(0.75));

  // a second function occupying the midpoint pushes the scan further
  std::vector<LatticeFn> pair = {kRamp, fn({0.5, 0.5, 5.0, 5.0})};
  double alpha = find_inessential(pair, 0.2, 0.8, I);
  CHECK(alpha == doctest::Approx(0.35));
  for (const LatticeFn& f : pair) CHECK(is_inessential(f, alpha, I).inessential);

  CHECK_THROWS_AS(find_inessential(fs, 0.8, 0.2, I), std::invalid_argument);
}

TEST_CASE("star combination detects indicator-like pairs") {
  LatticeFn f = fn({0.2, 0.0, 1.0});
  LatticeFn g = fn({3.0, -5.0, 0.0});
  LatticeFn star = star_combine(f, g);
  CHECK(star.values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(check_special_pair(f, g) == SpecialPairKind::exact);

  // star = -min(f, max(-g, 0)) pointwise
  LatticeFn f2 = fn({0.5, 0.25, 0.0});
  LatticeFn g2 = fn({-1.0, 2.0, -3.0});
  LatticeFn star2 = star_combine(f2, g2);
  for (std::size_t x = 0; x < f2.size(); ++x)
    CHECK(star2.values[x] ==
          doctest::Approx(-std::min(f2.values[x], std::max(-g2.values[x], 0.0))));

  CHECK_THROWS_AS(check_special_pair(f2, g2), std::invalid_argument);

  std::vector<double> null_first = {0.0, 0.5, 0.5};
  CHECK(check_special_pair(f2, g2, &null_first) == SpecialPairKind::almost);
  std::vector<double> uniform3 = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(check_special_pair(f2, g2, &uniform3) == SpecialPairKind::neither);

  // out-of-range indicator values break exactness even when star vanishes
  LatticeFn tall = fn({1.5, 0.0, 0.0});
  LatticeFn pos = fn({1.0, 1.0, 1.0});
  CHECK(star_combine(tall, pos).values == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(check_special_pair(tall, pos, &null_first) == SpecialPairKind::almost);
  CHECK(check_special_pair(tall, pos, &uniform3) == SpecialPairKind::neither);
}

TEST_CASE("cover refinement keeps members whose zero level is null") {
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b", "c"}, {0.2, 0.3, 0.5});
  std::vector<LatticeFn> gens = {fn({0.25, 0.5, 1.0})};
  std::vector<Subset> cover = {0b111};
  RefineReport rep = refine_cover(space, gens, cover, 0.1);
  REQUIRE(rep.members.size() == 1);
  CHECK(rep.members[0].set == 0b111);
  CHECK(rep.members[0].measure == doctest::Approx(1.0));
  CHECK(rep.output_measure_sum == doctest::Approx(rep.input_measure_sum));
  for (double v : rep.members[0].fn.values) CHECK(v != 0.0);
}

TEST_CASE("cover refinement shifts away massive zero levels") {
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b"}, {0.5, 0.5});
  std::vector<LatticeFn> gens = {fn({1.0, 0.0})};
  std::vector<Subset> cover = {0b01};
  RefineReport rep = refine_cover(space, gens, cover, 0.1);
  REQUIRE(rep.members.size() == 1);
  CHECK(rep.members[0].set == 0b01);
  CHECK(rep.members[0].fn.values[0] > 0.0);
  CHECK(rep.members[0].fn.values[1] < 0.0);  // strictly negative, not zero
  CHECK(rep.output_measure_sum == doctest::Approx(0.5));
}

TEST_CASE("cover refinement splits off light value bands") {
  // bottom level has tiny mass, so it moves into an overlapping band
  FiniteMeasureSpace space =
      FiniteMeasureSpace::make({"a", "b", "c"}, {0.2, 0.0001, 0.7999});
  std::vector<LatticeFn> gens = {fn({0.0, 0.5, 1.0})};
  std::vector<Subset> cover = {0b110};
  RefineReport rep = refine_cover(space, gens, cover, 0.1);
  REQUIRE(rep.members.size() == 2);

  Subset covered = 0;
  for (const CoverMember& m : rep.members) {
    covered |= m.set;
    CHECK(subset_leq(m.set, 0b110));
    for (std::size_t x = 0; x < m.fn.size(); ++x) {
      CHECK((m.fn.values[x] > 0) == (((m.set >> x) & 1) != 0));
      if (m.fn.values[x] == 0.0) CHECK(space.weights[x] == 0.0);
    }
  }
  CHECK(covered == 0b110);
  CHECK(rep.output_measure_sum <= rep.input_measure_sum + 0.1);
}

TEST_CASE("cover refinement validates its inputs") {
  FiniteMeasureSpace space = FiniteMeasureSpace::make({"a", "b", "c"}, {0.5, 0.25, 0.25});
  std::vector<LatticeFn> gens = {fn({1.0, 0.0, 0.0})};
  // {b} splits the complement block {b, c}, so no generator produces it
  std::vector<Subset> stray = {0b010};
  CHECK_THROWS_AS(refine_cover(space, gens, stray, 0.1), std::invalid_argument);
  std::vector<Subset> fine = {0b001};
  CHECK_THROWS_AS(refine_cover(space, gens, fine, 0.0), std::invalid_argument);
  std::vector<LatticeFn> wrong = {fn({1.0})};
  CHECK_THROWS_AS(refine_cover(space, wrong, fine, 0.1), std::invalid_argument);
}
