#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intlog/common.hpp"

namespace intlog {

// Subsets of a point space are bit vectors; set-algebra operations are capped
// at 64 points per ambient space. Point-weighted spaces themselves may be
// larger (the engines index cells directly instead of using masks).
using Subset = std::uint64_t;

inline constexpr int kMaxAlgebraPoints = 64;

Subset full_mask(int n_points);
bool subset_leq(Subset a, Subset b);  // a is contained in b
int subset_size(Subset s);
std::vector<int> subset_points(Subset s);
Subset subset_of_points(std::span<const int> points);

// Finite point space with nonnegative weights. A probability space has total
// weight 1 within tolerance; a total of 0 is legal (used by the zero-measure
// shortcut).
struct FiniteMeasureSpace {
  std::vector<std::string> points;
  std::vector<double> weights;

  static FiniteMeasureSpace make(std::vector<std::string> points,
                                 std::vector<double> weights);

  int size() const { return static_cast<int>(points.size()); }
  double total() const;
  bool is_probability(double tol = kDefaultTol) const;
  int index_of(std::string_view point) const;  // -1 when absent
  Subset full() const;                         // requires size() <= 64
  double weight_of(Subset s) const;
};

// A finite algebra of subsets of a universe: contains the empty set and the
// universe, closed under relative complement and union.
class SetAlgebra {
 public:
  SetAlgebra() = default;

  static SetAlgebra validated(int n_points, Subset universe, std::vector<Subset> members);
  // Closure of the generators under complement and union (fixpoint iteration).
  static SetAlgebra generated(int n_points, Subset universe, std::span<const Subset> generators);
  static SetAlgebra powerset(int n_points);

  int point_count() const { return n_points_; }
  Subset universe() const { return universe_; }
  const std::vector<Subset>& members() const { return members_; }
  bool contains(Subset s) const;
  // Minimal nonempty members; a partition of the universe.
  std::vector<Subset> atoms() const;
  // Atom of the algebra containing the given point.
  Subset atom_of(int point) const;

 private:
  int n_points_ = 0;
  Subset universe_ = 0;
  std::vector<Subset> members_;
};

// Nonnegative finitely-additive set function on a finite family of subsets.
// The family must contain the empty set (value 0) and the universe; it need
// not be complement-closed (e.g. the rectangles of a product space), but when
// it is, the algebra-only operations below apply.
struct PremeasureTable {
  int n_points = 0;
  Subset universe = 0;
  std::vector<Subset> family;  // sorted ascending
  std::vector<double> values;  // parallel to family

  static PremeasureTable make(int n_points, Subset universe, std::vector<Subset> family,
                              std::vector<double> values, double tol = kDefaultTol);
  static PremeasureTable from_algebra(const SetAlgebra& algebra, std::vector<double> values,
                                      double tol = kDefaultTol);
  // Values induced by point weights: value(A) = sum of weights in A.
  static PremeasureTable from_space(const FiniteMeasureSpace& space, const SetAlgebra& algebra);

  std::optional<double> value_of(Subset s) const;
  bool family_is_algebra() const;
  double total() const;
};

// mu*(s) = inf { value(A) : s contained in A, A in the algebra }. Requires an
// algebra family (single supersets suffice there).
double outer_measure(const PremeasureTable& table, Subset s);

// Extension to the algebra generated by the family, each value computed as
// the infimum of finite cover sums. Detects non-additive premeasures.
PremeasureTable caratheodory_extend(const PremeasureTable& table, double tol = kDefaultTol);

// Trace algebra {A & N} with the outer measure restricted to it.
PremeasureTable subspace_measure(const PremeasureTable& table, Subset carrier,
                                 double tol = kDefaultTol);

// Integral of a pointwise function against an algebra measure. The function
// must be constant on the atoms of the algebra (within tol).
double integral_on_algebra(const PremeasureTable& table, std::span<const double> f,
                           double tol = kDefaultTol);

// Product measure on M^n. With diagonals it models the extension measured on
// the algebra generated by rectangles and the diagonal sets; on finite spaces
// both are total weight functions on M^n, and diagonal values come from the
// squared-weight formula.
class ProductMeasure {
 public:
  ProductMeasure(FiniteMeasureSpace base, int power, bool with_diagonals);

  const FiniteMeasureSpace& base() const { return base_; }
  int power() const { return power_; }
  bool with_diagonals() const { return with_diagonals_; }

  double tuple_weight(std::span<const int> tuple) const;
  // Product of factor measures; exactly `power` factors.
  double rectangle(std::span<const Subset> factors) const;
  // Weight of D_ij = { tuples with x_i == x_j }; requires with_diagonals.
  double diagonal(int i, int j) const;
  // Arbitrary member given pointwise over lexicographic tuple indices.
  double of(const std::vector<char>& member) const;
  std::size_t tuple_count() const;

 private:
  FiniteMeasureSpace base_;
  int power_;
  bool with_diagonals_;
};

ProductMeasure product_measure(const FiniteMeasureSpace& base, int power, bool with_diagonals);

}  // namespace intlog
