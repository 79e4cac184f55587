#include "intlog/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace intlog {

namespace {

constexpr std::size_t kAlgebraSizeCap = std::size_t{1} << 20;
constexpr int kCoverPointsCap = 20;

void check_point_cap(int n) {
  if (n < 0 || n > kMaxAlgebraPoints)
    throw std::invalid_argument("set algebra supports at most 64 points");
}

}  // namespace

Subset full_mask(int n_points) {
  check_point_cap(n_points);
  if (n_points == kMaxAlgebraPoints) return ~Subset{0};
  return (Subset{1} << n_points) - 1;
}

bool subset_leq(Subset a, Subset b) { return (a & ~b) == 0; }

int subset_size(Subset s) { return std::popcount(s); }

std::vector<int> subset_points(Subset s) {
  std::vector<int> out;
  while (s) {
    int p = std::countr_zero(s);
    out.push_back(p);
    s &= s - 1;
  }
  return out;
}

Subset subset_of_points(std::span<const int> points) {
  Subset s = 0;
  for (int p : points) {
    if (p < 0 || p >= kMaxAlgebraPoints)
      throw std::invalid_argument("point index out of range for subset mask");
    s |= Subset{1} << p;
  }
  return s;
}

FiniteMeasureSpace FiniteMeasureSpace::make(std::vector<std::string> points,
                                            std::vector<double> weights) {
  if (points.size() != weights.size())
    throw std::invalid_argument("point and weight counts differ");
  std::set<std::string> seen;
  for (const std::string& p : points) {
    if (p.empty()) throw std::invalid_argument("empty point id");
    if (!seen.insert(p).second) throw std::invalid_argument("duplicate point id: " + p);
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("point weight must be finite");
    if (w < 0) throw std::invalid_argument("negative point weight");
  }
  FiniteMeasureSpace space;
  space.points = std::move(points);
  space.weights = std::move(weights);
  return space;
}

double FiniteMeasureSpace::total() const {
  double t = 0;
  for (double w : weights) t += w;
  return t;
}

bool FiniteMeasureSpace::is_probability(double tol) const {
  return std::fabs(total() - 1.0) <= tol;
}

int FiniteMeasureSpace::index_of(std::string_view point) const {
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i] == point) return static_cast<int>(i);
  return -1;
}

Subset FiniteMeasureSpace::full() const { return full_mask(size()); }

double FiniteMeasureSpace::weight_of(Subset s) const {
  if (!subset_leq(s, full())) throw std::invalid_argument("subset outside the space");
  double t = 0;
  for (int p : subset_points(s)) t += weights[p];
  return t;
}

SetAlgebra SetAlgebra::validated(int n_points, Subset universe, std::vector<Subset> members) {
  check_point_cap(n_points);
  if (!subset_leq(universe, full_mask(n_points)))
    throw std::invalid_argument("universe outside the point range");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  auto has = [&](Subset s) {
    return std::binary_search(members.begin(), members.end(), s);
  };
  for (Subset m : members)
    if (!subset_leq(m, universe))
      throw std::invalid_argument("algebra member outside the universe");
  if (!has(0) || !has(universe))
    throw std::invalid_argument("algebra must contain the empty set and the universe");
  for (Subset m : members)
    if (!has(universe & ~m))
      throw std::invalid_argument("algebra not closed under complement");
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (!has(members[i] | members[j]))
        throw std::invalid_argument("algebra not closed under union");
  SetAlgebra a;
  a.n_points_ = n_points;
  a.universe_ = universe;
  a.members_ = std::move(members);
  return a;
}

SetAlgebra SetAlgebra::generated(int n_points, Subset universe,
                                 std::span<const Subset> generators) {
  check_point_cap(n_points);
  if (!subset_leq(universe, full_mask(n_points)))
    throw std::invalid_argument("universe outside the point range");
  for (Subset g : generators)
    if (!subset_leq(g, universe))
      throw std::invalid_argument("generator outside the universe");

  std::set<Subset> closed{Subset{0}, universe};
  std::vector<Subset> work(closed.begin(), closed.end());
  auto add = [&](Subset s) {
    if (closed.insert(s).second) {
      work.push_back(s);
      if (closed.size() > kAlgebraSizeCap)
        throw std::length_error("generated algebra exceeds size cap");
    }
  };
  for (Subset g : generators) add(g);
  for (std::size_t i = 0; i < work.size(); ++i) {
    Subset s = work[i];
    add(universe & ~s);
    for (std::size_t j = 0; j <= i; ++j) add(s | work[j]);
  }
  SetAlgebra a;
  a.n_points_ = n_points;
  a.universe_ = universe;
  a.members_.assign(closed.begin(), closed.end());
  return a;
}

SetAlgebra SetAlgebra::powerset(int n_points) {
  check_point_cap(n_points);
  if (n_points > 20) throw std::length_error("powerset too large to enumerate");
  Subset universe = full_mask(n_points);
  std::vector<Subset> members;
  members.reserve(std::size_t{1} << n_points);
  for (Subset s = 0;; ++s) {
    members.push_back(s);
    if (s == universe) break;
  }
  SetAlgebra a;
  a.n_points_ = n_points;
  a.universe_ = universe;
  a.members_ = std::move(members);
  return a;
}

bool SetAlgebra::contains(Subset s) const {
  return std::binary_search(members_.begin(), members_.end(), s);
}

Subset SetAlgebra::atom_of(int point) const {
  Subset bit = Subset{1} << point;
  if (!subset_leq(bit, universe_)) throw std::invalid_argument("point outside the universe");
  Subset atom = universe_;
  for (Subset m : members_)
    if (m & bit) atom &= m;
  return atom;
}

std::vector<Subset> SetAlgebra::atoms() const {
  std::vector<Subset> out;
  Subset remaining = universe_;
  while (remaining) {
    int p = std::countr_zero(remaining);
    Subset atom = atom_of(p);
    out.push_back(atom);
    remaining &= ~atom;
  }
  std::sort(out.begin(), out.end());
  return out;
}

PremeasureTable PremeasureTable::make(int n_points, Subset universe,
                                      std::vector<Subset> family, std::vector<double> values,
                                      double tol) {
  check_point_cap(n_points);
  if (family.size() != values.size())
    throw std::invalid_argument("family and value counts differ");
  std::vector<std::size_t> order(family.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return family[a] < family[b]; });
  PremeasureTable t;
  t.n_points = n_points;
  t.universe = universe;
  for (std::size_t i : order) {
    if (!subset_leq(family[i], universe))
      throw std::invalid_argument("family member outside the universe");
    double v = values[i];
    if (!std::isfinite(v) || v < -tol)
      throw std::invalid_argument("premeasure values must be finite and nonnegative");
    if (!t.family.empty() && t.family.back() == family[i]) {
      if (std::fabs(t.values.back() - v) > tol)
        throw std::invalid_argument("conflicting duplicate family member");
      continue;
    }
    t.family.push_back(family[i]);
    t.values.push_back(std::max(v, 0.0));
  }
  auto empty_value = t.value_of(0);
  if (!empty_value || !t.value_of(universe))
    throw std::invalid_argument("family must contain the empty set and the universe");
  if (std::fabs(*empty_value) > tol)
    throw std::invalid_argument("premeasure of the empty set must be 0");
  for (std::size_t i = 0; i < t.family.size(); ++i)
    for (std::size_t j = i + 1; j < t.family.size(); ++j) {
      if (t.family[i] & t.family[j]) continue;
      auto u = t.value_of(t.family[i] | t.family[j]);
      if (u && std::fabs(*u - t.values[i] - t.values[j]) > tol)
        throw std::invalid_argument("premeasure not additive");
    }
  return t;
}

PremeasureTable PremeasureTable::from_algebra(const SetAlgebra& algebra,
                                              std::vector<double> values, double tol) {
  return make(algebra.point_count(), algebra.universe(),
              algebra.members(), std::move(values), tol);
}

PremeasureTable PremeasureTable::from_space(const FiniteMeasureSpace& space,
                                            const SetAlgebra& algebra) {
  if (algebra.point_count() != space.size())
    throw std::invalid_argument("algebra and space sizes differ");
  std::vector<double> values;
  values.reserve(algebra.members().size());
  for (Subset m : algebra.members()) values.push_back(space.weight_of(m));
  return from_algebra(algebra, std::move(values));
}

std::optional<double> PremeasureTable::value_of(Subset s) const {
  auto it = std::lower_bound(family.begin(), family.end(), s);
  if (it == family.end() || *it != s) return std::nullopt;
  return values[static_cast<std::size_t>(it - family.begin())];
}

bool PremeasureTable::family_is_algebra() const {
  auto has = [&](Subset s) { return std::binary_search(family.begin(), family.end(), s); };
  if (!has(0) || !has(universe)) return false;
  for (Subset m : family)
    if (!has(universe & ~m)) return false;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (!has(family[i] | family[j])) return false;
  return true;
}

double PremeasureTable::total() const { return value_of(universe).value_or(0.0); }

namespace {

double min_superset_value(const PremeasureTable& table, Subset s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.family.size(); ++i)
    if (subset_leq(s, table.family[i])) best = std::min(best, table.values[i]);
  return best;
}

// Exact weighted set cover over the points of `target`, DP over covered
// subsets. Used when the family is not union-closed.
double cover_infimum(const PremeasureTable& table, Subset target) {
  if (target == 0) return 0.0;
  std::vector<int> pts = subset_points(target);
  int k = static_cast<int>(pts.size());
  if (k > kCoverPointsCap) throw std::length_error("cover enumeration too large");
  std::vector<int> pos(kMaxAlgebraPoints, -1);
  for (int i = 0; i < k; ++i) pos[pts[i]] = i;
  std::size_t n_states = std::size_t{1} << k;
  std::vector<double> dp(n_states, std::numeric_limits<double>::infinity());
  dp[0] = 0.0;
  std::vector<std::uint64_t> local(table.family.size());
  for (std::size_t a = 0; a < table.family.size(); ++a) {
    std::uint64_t m = 0;
    for (int p : subset_points(table.family[a] & target)) m |= std::uint64_t{1} << pos[p];
    local[a] = m;
  }
  for (std::size_t s = 0; s < n_states; ++s) {
    if (!std::isfinite(dp[s])) continue;
    for (std::size_t a = 0; a < table.family.size(); ++a) {
      std::size_t next = s | local[a];
      if (next == s) continue;
      double cost = dp[s] + table.values[a];
      if (cost < dp[next]) dp[next] = cost;
    }
  }
  return dp[n_states - 1];
}

}  // namespace

double outer_measure(const PremeasureTable& table, Subset s) {
  if (!subset_leq(s, table.universe))
    throw std::invalid_argument("subset outside the universe");
  if (!table.family_is_algebra())
    throw std::invalid_argument("outer measure requires an algebra premeasure");
  return min_superset_value(table, s);
}

PremeasureTable caratheodory_extend(const PremeasureTable& table, double tol) {
  SetAlgebra target = SetAlgebra::generated(table.n_points, table.universe, table.family);
  bool union_closed = table.family_is_algebra();
  std::vector<double> extended;
  extended.reserve(target.members().size());
  for (Subset m : target.members()) {
    double v = union_closed ? min_superset_value(table, m) : cover_infimum(table, m);
    if (!std::isfinite(v))
      throw std::invalid_argument("family does not cover the requested member");
    extended.push_back(v);
  }
  for (std::size_t i = 0; i < table.family.size(); ++i) {
    auto it = std::lower_bound(target.members().begin(), target.members().end(),
                               table.family[i]);
    double got = extended[static_cast<std::size_t>(it - target.members().begin())];
    if (std::fabs(got - table.values[i]) > tol)
      throw std::invalid_argument("premeasure not additive (cover infimum disagrees)");
  }
  try {
    return PremeasureTable::from_algebra(target, std::move(extended), tol);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("premeasure not additive (extension failed)");
  }
}

PremeasureTable subspace_measure(const PremeasureTable& table, Subset carrier, double tol) {
  if (!subset_leq(carrier, table.universe))
    throw std::invalid_argument("carrier outside the universe");
  if (!table.family_is_algebra())
    throw std::invalid_argument("subspace measure requires an algebra premeasure");
  std::vector<Subset> trace;
  for (Subset m : table.family) trace.push_back(m & carrier);
  std::sort(trace.begin(), trace.end());
  trace.erase(std::unique(trace.begin(), trace.end()), trace.end());
  std::vector<double> values;
  values.reserve(trace.size());
  for (Subset b : trace) values.push_back(min_superset_value(table, b));
  return PremeasureTable::make(table.n_points, carrier, std::move(trace), std::move(values),
                               tol);
}

double integral_on_algebra(const PremeasureTable& table, std::span<const double> f,
                           double tol) {
  if (static_cast<int>(f.size()) != table.n_points)
    throw std::invalid_argument("function size differs from the point count");
  if (!table.family_is_algebra())
    throw std::invalid_argument("integral requires an algebra premeasure");
  SetAlgebra algebra = SetAlgebra::validated(table.n_points, table.universe, table.family);
  double sum = 0;
  for (Subset atom : algebra.atoms()) {
    std::vector<int> pts = subset_points(atom);
    double v = f[pts.front()];
    for (int p : pts)
      if (std::fabs(f[p] - v) > tol)
        throw std::invalid_argument("function is not constant on an atom");
    sum += v * table.value_of(atom).value();
  }
  return sum;
}

ProductMeasure::ProductMeasure(FiniteMeasureSpace base, int power, bool with_diagonals)
    : base_(std::move(base)), power_(power), with_diagonals_(with_diagonals) {
  if (power_ < 1) throw std::invalid_argument("product power must be positive");
  if (base_.size() < 1) throw std::invalid_argument("product of an empty space");
}

double ProductMeasure::tuple_weight(std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != power_)
    throw std::invalid_argument("tuple length differs from the power");
  double w = 1.0;
  for (int p : tuple) {
    if (p < 0 || p >= base_.size()) throw std::invalid_argument("tuple index out of range");
    w *= base_.weights[p];
  }
  return w;
}

double ProductMeasure::rectangle(std::span<const Subset> factors) const {
  if (static_cast<int>(factors.size()) != power_)
    throw std::invalid_argument("rectangle factor count differs from the power");
  double w = 1.0;
  for (Subset f : factors) w *= base_.weight_of(f);
  return w;
}

double ProductMeasure::diagonal(int i, int j) const {
  if (!with_diagonals_)
    throw std::logic_error("diagonal sets require the with_diagonals extension");
  if (i == j) throw std::invalid_argument("diagonal indices must differ");
  if (i < 0 || j < 0 || i >= power_ || j >= power_)
    throw std::invalid_argument("diagonal index out of range");
  double squares = 0;
  for (double w : base_.weights) squares += w * w;
  double rest = 1.0;
  for (int k = 0; k < power_ - 2; ++k) rest *= base_.total();
  return squares * rest;
}

std::size_t ProductMeasure::tuple_count() const {
  std::size_t count = 1;
  for (int k = 0; k < power_; ++k) {
    if (count > (std::size_t{1} << 20) / static_cast<std::size_t>(base_.size()))
      throw std::length_error("tuple enumeration too large");
    count *= static_cast<std::size_t>(base_.size());
  }
  return count;
}

double ProductMeasure::of(const std::vector<char>& member) const {
  std::size_t count = tuple_count();
  if (member.size() != count)
    throw std::invalid_argument("member table size differs from the tuple count");
  std::vector<int> tuple(static_cast<std::size_t>(power_));
  double sum = 0;
  for (std::size_t idx = 0; idx < count; ++idx) {
    if (!member[idx]) continue;
    std::size_t rest = idx;
    for (int k = power_ - 1; k >= 0; --k) {
      tuple[static_cast<std::size_t>(k)] = static_cast<int>(rest % base_.size());
      rest /= static_cast<std::size_t>(base_.size());
    }
    sum += tuple_weight(tuple);
  }
  return sum;
}

ProductMeasure product_measure(const FiniteMeasureSpace& base, int power, bool with_diagonals) {
  return ProductMeasure(base, power, with_diagonals);
}

}  // namespace intlog
