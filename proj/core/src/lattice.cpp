#include "intlog/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace intlog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_size(const LatticeFn& a, const LatticeFn& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("lattice functions live on different domains");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

LatticeFn LatticeFn::constant(std::size_t n, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite constant");
  return LatticeFn{std::vector<double>(n, c)};
}

double LatticeFn::min_value() const {
  if (values.empty()) throw std::logic_error("empty lattice function");
  return *std::min_element(values.begin(), values.end());
}

double LatticeFn::max_value() const {
  if (values.empty()) throw std::logic_error("empty lattice function");
  return *std::max_element(values.begin(), values.end());
}

double LatticeFn::sup_norm() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

LatticeFn add(const LatticeFn& a, const LatticeFn& b) {
  require_same_size(a, b);
  LatticeFn out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

LatticeFn sub(const LatticeFn& a, const LatticeFn& b) {
  require_same_size(a, b);
  LatticeFn out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

LatticeFn scale(double c, const LatticeFn& f) {
  LatticeFn out = f;
  for (double& v : out.values) v *= c;
  return out;
}

LatticeFn join(const LatticeFn& a, const LatticeFn& b) {
  require_same_size(a, b);
  LatticeFn out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::max(out.values[i], b.values[i]);
  return out;
}

LatticeFn meet(const LatticeFn& a, const LatticeFn& b) {
  require_same_size(a, b);
  LatticeFn out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::min(out.values[i], b.values[i]);
  return out;
}

LatticeFn abs_fn(const LatticeFn& f) {
  LatticeFn out = f;
  for (double& v : out.values) v = std::fabs(v);
  return out;
}

PositiveFunctional PositiveFunctional::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("weight list is empty");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0)
      throw std::invalid_argument("functional weights must be finite and nonnegative");
  PositiveFunctional I;
  I.n_ = weights.size();
  I.has_weights_ = true;
  I.weights_ = std::move(weights);

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    LatticeFn f{std::vector<double>(I.n_)}, g{std::vector<double>(I.n_)};
    for (double& v : f.values) v = coef(rng);
    for (double& v : g.values) v = coef(rng);
    double a = coef(rng), b = coef(rng);
    LatticeFn combo = add(scale(a, f), scale(b, g));
    double lin = std::fabs(I(combo) - (a * I(f) + b * I(g)));
    double scale_bound = 1 + std::fabs(I(combo)) + std::fabs(I(f)) + std::fabs(I(g));
    if (lin > 1e-9 * scale_bound || I(abs_fn(f)) < 0)
      throw std::invalid_argument("functional failed the positive-linearity spot check");
  }
  return I;
}

PositiveFunctional PositiveFunctional::from_callable(
    std::size_t domain_size, std::function<double(const LatticeFn&)> evaluator) {
  if (domain_size == 0) throw std::invalid_argument("empty domain");
  if (!evaluator) throw std::invalid_argument("missing evaluator");
  PositiveFunctional I;
  I.n_ = domain_size;
  I.evaluator_ = std::move(evaluator);
  return I;
}

double PositiveFunctional::operator()(const LatticeFn& f) const {
  if (f.size() != n_)
    throw std::invalid_argument("lattice function does not match the functional's domain");
  if (has_weights_) {
    double sum = 0;
    for (std::size_t i = 0; i < n_; ++i) sum += weights_[i] * f.values[i];
    return sum;
  }
  return evaluator_(f);
}

const std::vector<double>* PositiveFunctional::hidden_weights() const {
  return has_weights_ ? &weights_ : nullptr;
}

namespace {

Interval checked(Interval iv) {
  if (std::isnan(iv.lo) || std::isnan(iv.hi))
    throw std::invalid_argument("interval endpoint is NaN");
  if (iv.lo == -kInf && iv.lo_closed)
    throw std::invalid_argument("infinite endpoint cannot be closed");
  if (iv.hi == kInf && iv.hi_closed)
    throw std::invalid_argument("infinite endpoint cannot be closed");
  if (iv.lo > iv.hi) throw std::invalid_argument("interval is empty");
  if (iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed))
    throw std::invalid_argument("degenerate interval must be a closed point");
  return iv;
}

}  // namespace

Interval Interval::open(double lo, double hi) { return checked({lo, hi, false, false}); }
Interval Interval::closed(double lo, double hi) { return checked({lo, hi, true, true}); }
Interval Interval::greater_than(double a) { return checked({a, kInf, false, false}); }
Interval Interval::less_than(double a) { return checked({-kInf, a, false, false}); }
Interval Interval::at_least(double a) { return checked({a, kInf, true, false}); }
Interval Interval::at_most(double a) { return checked({-kInf, a, false, true}); }
Interval Interval::point(double a) { return checked({a, a, true, true}); }

bool Interval::contains(double v) const {
  if (v < lo || (v == lo && !lo_closed)) return false;
  if (v > hi || (v == hi && !hi_closed)) return false;
  return true;
}

bool Interval::is_open_set() const {
  return (lo == -kInf || !lo_closed) && (hi == kInf || !hi_closed);
}

bool Interval::is_closed_set() const {
  return (lo == -kInf || lo_closed) && (hi == kInf || hi_closed);
}

IndicatorSeq IndicatorSeq::make(std::vector<Constraint> constraints, SeqMode mode,
                                SeqCombine combine) {
  if (constraints.empty()) throw std::invalid_argument("no constraints");
  std::size_t n = constraints.front().f.size();
  if (n == 0) throw std::invalid_argument("empty domain");
  for (const Constraint& c : constraints) {
    if (c.f.size() != n)
      throw std::invalid_argument("constraint functions live on different domains");
    for (double v : c.f.values)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite function value");
    checked(c.interval);
    if (mode == SeqMode::open_sets && !c.interval.is_open_set())
      throw std::invalid_argument("open mode takes open intervals only");
    if (mode == SeqMode::closed_sets && !c.interval.is_closed_set())
      throw std::invalid_argument("closed mode takes closed intervals only");
  }

  IndicatorSeq seq;
  seq.constraints_ = std::move(constraints);
  seq.mode_ = mode;
  seq.combine_ = combine;
  seq.n_points_ = n;
  seq.target_.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    bool in;
    if (combine == SeqCombine::intersection) {
      in = true;
      for (const Constraint& c : seq.constraints_)
        in = in && c.interval.contains(c.f.values[x]);
    } else {
      in = false;
      for (const Constraint& c : seq.constraints_)
        in = in || c.interval.contains(c.f.values[x]);
    }
    seq.target_[x] = in ? 1 : 0;
  }
  return seq;
}

LatticeFn IndicatorSeq::at(long long n) const {
  if (n < 1) throw std::invalid_argument("sequence index must be >= 1");
  const double dn = static_cast<double>(n);
  LatticeFn out{std::vector<double>(n_points_)};
  for (std::size_t x = 0; x < n_points_; ++x) {
    double acc = combine_ == SeqCombine::intersection ? 1.0 : 0.0;
    for (const Constraint& c : constraints_) {
      double v = c.f.values[x];
      double lower = 1.0, upper = 1.0;
      if (mode_ == SeqMode::open_sets) {
        if (c.interval.lo != -kInf) lower = clamp01(dn * (v - c.interval.lo));
        if (c.interval.hi != kInf) upper = clamp01(dn * (c.interval.hi - v));
      } else {
        if (c.interval.lo != -kInf) lower = clamp01(dn * (v - c.interval.lo) + 1.0);
        if (c.interval.hi != kInf) upper = clamp01(dn * (c.interval.hi - v) + 1.0);
      }
      double val = std::min(lower, upper);
      acc = combine_ == SeqCombine::intersection ? std::min(acc, val) : std::max(acc, val);
    }
    out.values[x] = acc;
  }
  return out;
}

IndicatorSeq indicator_seq(std::vector<Constraint> constraints, SeqMode mode,
                           SeqCombine combine) {
  return IndicatorSeq::make(std::move(constraints), mode, combine);
}

namespace {

bool exact_at(const IndicatorSeq& seq, long long n) {
  LatticeFn f = seq.at(n);
  const auto& target = seq.target();
  for (std::size_t x = 0; x < f.size(); ++x)
    if (f.values[x] != (target[x] ? 1.0 : 0.0)) return false;
  return true;
}

}  // namespace

std::optional<long long> stabilization_index(IndicatorSeq& seq) {
  if (seq.stabilization) return seq.stabilization;

  double worst_gap = kInf;
  for (const Constraint& c : seq.constraints()) {
    for (double v : c.f.values) {
      for (double endpoint : {c.interval.lo, c.interval.hi}) {
        if (endpoint == -kInf || endpoint == kInf) continue;
        double gap = std::fabs(v - endpoint);
        if (gap > 0) worst_gap = std::min(worst_gap, gap);
      }
    }
  }
  long long candidate = 1;
  if (worst_gap != kInf) {
    double need = std::ceil(1.0 / worst_gap) + 2;
    candidate = need > static_cast<double>(kIterationCap)
                    ? kIterationCap
                    : static_cast<long long>(need);
  }

  long long hi = candidate;
  if (!exact_at(seq, hi)) {
    hi = kIterationCap;
    if (!exact_at(seq, hi)) return std::nullopt;
  }
  long long lo = 1;
  while (lo < hi) {
    long long mid = lo + (hi - lo) / 2;
    if (exact_at(seq, mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  seq.stabilization = lo;
  return seq.stabilization;
}

LatticeFn value_seq(const LatticeFn& f, double alpha, long long n) {
  if (n < 1) throw std::invalid_argument("sequence index must be >= 1");
  if (!std::isfinite(alpha)) throw std::invalid_argument("non-finite value");
  const double dn = static_cast<double>(n);
  LatticeFn out = f;
  for (double& v : out.values) v = clamp01(1.0 - dn * std::fabs(v - alpha));
  return out;
}

InessentialCheck is_inessential(const LatticeFn& f, double alpha,
                                const PositiveFunctional& I, double tol) {
  if (f.size() != I.domain_size())
    throw std::invalid_argument("function does not match the functional's domain");
  IndicatorSeq seq =
      indicator_seq({Constraint{f, Interval::point(alpha)}}, SeqMode::closed_sets,
                    SeqCombine::intersection);
  std::optional<long long> n = stabilization_index(seq);
  if (!n)
    throw std::runtime_error(
        "indicator sequence did not stabilize within the iteration cap");
  InessentialCheck out;
  out.stabilized_at = *n;
  out.limit = I(seq.at(*n));
  out.inessential = out.limit <= tol;
  return out;
}

double find_inessential(std::span<const LatticeFn> fs, double r, double s,
                        const PositiveFunctional& I, double tol) {
  if (!(r < s) || !std::isfinite(r) || !std::isfinite(s))
    throw std::invalid_argument("need a nondegenerate finite interval");

  std::size_t budget = 8;
  for (const LatticeFn& f : fs) {
    std::vector<double> vals = f.values;
    std::sort(vals.begin(), vals.end());
    budget += static_cast<std::size_t>(
        std::unique(vals.begin(), vals.end()) - vals.begin());
  }

  auto attained = [&](double alpha) {
    for (const LatticeFn& f : fs)
      for (double v : f.values)
        if (v == alpha) return true;
    return false;
  };
  auto works = [&](double alpha) {
    for (const LatticeFn& f : fs) {
      try {
        if (!is_inessential(f, alpha, I, tol).inessential) return false;
      } catch (const std::runtime_error&) {
        return false;
      }
    }
    return true;
  };

  std::size_t tried = 0;
  double mid = r + (s - r) / 2;
  if (!attained(mid)) {
    ++tried;
    if (works(mid)) return mid;
  }
  for (long long denom = 4; denom <= (1LL << 40); denom *= 2) {
    for (long long k = 1; k < denom; k += 2) {
      double alpha = r + (s - r) * (static_cast<double>(k) / static_cast<double>(denom));
      if (alpha <= r || alpha >= s || attained(alpha)) continue;
      ++tried;
      if (works(alpha)) return alpha;
      if (tried > budget)
        throw std::logic_error("inessential-value scan budget exhausted");
    }
  }
  throw std::logic_error("inessential-value scan budget exhausted");
}

LatticeFn star_combine(const LatticeFn& f, const LatticeFn& g) {
  require_same_size(f, g);
  LatticeFn zero = LatticeFn::constant(f.size(), 0.0);
  LatticeFn a = join(scale(-1.0, g), zero);
  return sub(sub(join(f, a), f), a);
}

SpecialPairKind check_special_pair(const LatticeFn& f, const LatticeFn& g,
                                   const std::vector<double>* weights, double tol) {
  require_same_size(f, g);
  LatticeFn star = star_combine(f, g);
  bool exact = true;
  for (std::size_t i = 0; i < f.size(); ++i)
    exact = exact && star.values[i] == 0.0 && f.values[i] >= 0.0 && f.values[i] <= 1.0;
  if (exact) return SpecialPairKind::exact;

  if (!weights)
    throw std::invalid_argument("deciding almost-special needs a measure");
  if (weights->size() != f.size())
    throw std::invalid_argument("measure does not match the functions' domain");
  double star_mass = 0, below_mass = 0, above_mass = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double w = (*weights)[i];
    if (!std::isfinite(w) || w < 0)
      throw std::invalid_argument("measure weights must be finite and nonnegative");
    star_mass += w * std::fabs(star.values[i]);
    below_mass += w * std::min(f.values[i], 0.0);
    above_mass += w * (std::max(f.values[i], 1.0) - 1.0);
  }
  bool almost = star_mass <= tol && std::fabs(below_mass) <= tol && above_mass <= tol;
  return almost ? SpecialPairKind::almost : SpecialPairKind::neither;
}

namespace {

double subset_mass(const FiniteMeasureSpace& space, Subset s) {
  double m = 0;
  for (int p : subset_points(s)) m += space.weights[static_cast<std::size_t>(p)];
  return m;
}

}  // namespace

RefineReport refine_cover(const FiniteMeasureSpace& space,
                          std::span<const LatticeFn> generators,
                          std::span<const Subset> cover, double eps) {
  const int n = space.size();
  if (n > kMaxAlgebraPoints)
    throw std::invalid_argument("cover refinement supports at most 64 points");
  if (!(eps > 0) || !std::isfinite(eps))
    throw std::invalid_argument("epsilon must be positive");
  for (const LatticeFn& g : generators) {
    if (static_cast<int>(g.size()) != n)
      throw std::invalid_argument("generator does not match the space");
    for (double v : g.values)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite generator value");
  }

  std::vector<Subset> positive_sets;
  std::vector<double> shift;
  for (const LatticeFn& g : generators) {
    Subset b = 0;
    double min_pos = kInf;
    for (int x = 0; x < n; ++x) {
      if (g.values[static_cast<std::size_t>(x)] > 0) {
        b |= Subset{1} << x;
        min_pos = std::min(min_pos, g.values[static_cast<std::size_t>(x)]);
      }
    }
    positive_sets.push_back(b);
    shift.push_back(min_pos == kInf ? 1.0 : min_pos / 2);
  }

  SetAlgebra algebra = SetAlgebra::generated(n, full_mask(n), positive_sets);
  std::vector<Subset> atoms = algebra.atoms();
  std::vector<LatticeFn> clause;
  clause.reserve(atoms.size());
  for (Subset atom : atoms) {
    LatticeFn h = LatticeFn::constant(static_cast<std::size_t>(n), 1.0);
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (subset_leq(atom, positive_sets[i]))
        h = meet(h, generators[i]);
      else
        h = meet(h, add(LatticeFn::constant(static_cast<std::size_t>(n), shift[i]),
                        scale(-1.0, generators[i])));
    }
    clause.push_back(std::move(h));
  }

  RefineReport report;
  for (std::size_t j = 0; j < cover.size(); ++j) {
    Subset s = cover[j];
    if (!algebra.contains(s))
      throw std::invalid_argument("input set not representable in the algebra");
    report.input_measure_sum += subset_mass(space, s);
    if (s == 0) continue;

    LatticeFn g = LatticeFn::constant(static_cast<std::size_t>(n), -1.0);
    for (std::size_t a = 0; a < atoms.size(); ++a)
      if (subset_leq(atoms[a], s)) g = join(g, clause[a]);

    double zero_mass = 0;
    for (int x = 0; x < n; ++x)
      if (g.values[static_cast<std::size_t>(x)] == 0.0)
        zero_mass += space.weights[static_cast<std::size_t>(x)];
    if (zero_mass == 0.0) {
      report.members.push_back({g, s, subset_mass(space, s)});
      report.output_measure_sum += report.members.back().measure;
      continue;
    }

    std::vector<double> levels;
    for (int x : subset_points(s)) levels.push_back(g.values[static_cast<std::size_t>(x)]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const std::size_t m = levels.size();
    std::vector<double> level_mass(m, 0.0);
    for (int x : subset_points(s)) {
      double v = g.values[static_cast<std::size_t>(x)];
      std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(levels.begin(), levels.end(), v) - levels.begin());
      level_mass[idx] += space.weights[static_cast<std::size_t>(x)];
    }

    double beta = eps / std::pow(4.0, static_cast<double>(j + 1));
    std::vector<double> boundary{levels[0] / 2};
    double cumulative = 0;
    std::size_t p = 0;
    while (p + 1 < m) {
      double next_cumulative = cumulative + level_mass[p];
      double mid = (levels[p] + levels[p + 1]) / 2;
      if (2 * next_cumulative > beta || !(mid > levels[p] && mid < levels[p + 1])) break;
      cumulative = next_cumulative;
      boundary.push_back(mid);
      ++p;
    }

    auto emit = [&](const LatticeFn& fn) {
      Subset set = 0;
      for (int x = 0; x < n; ++x)
        if (fn.values[static_cast<std::size_t>(x)] > 0) set |= Subset{1} << x;
      if (set == 0) return;
      report.members.push_back({fn, set, subset_mass(space, set)});
      report.output_measure_sum += report.members.back().measure;
    };

    emit(add(g, LatticeFn::constant(static_cast<std::size_t>(n), -boundary[p])));
    if (p >= 1) {
      // Strictly between the upper piece's threshold and the next attained
      // value, so the top band overlaps the upper piece without capturing it.
      double top_gate = (boundary[p] + levels[p]) / 2;
      for (std::size_t band = 1; band <= p; ++band) {
        double lo = boundary[p - band];
        double hi = band == 1 ? top_gate : boundary[p - band + 2];
        emit(meet(add(g, LatticeFn::constant(static_cast<std::size_t>(n), -lo)),
                  sub(LatticeFn::constant(static_cast<std::size_t>(n), hi), g)));
      }
    }
  }
  return report;
}

}  // namespace intlog
