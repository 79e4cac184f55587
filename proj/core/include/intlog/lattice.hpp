#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "intlog/common.hpp"
#include "intlog/measure.hpp"

namespace intlog {

// Real-valued function on a finite indexed point set, closed under the vector
// lattice operations below.
struct LatticeFn {
  std::vector<double> values;

  static LatticeFn constant(std::size_t n, double c);
  std::size_t size() const { return values.size(); }
  double min_value() const;
  double max_value() const;
  double sup_norm() const;
};

LatticeFn add(const LatticeFn& a, const LatticeFn& b);
LatticeFn sub(const LatticeFn& a, const LatticeFn& b);
LatticeFn scale(double c, const LatticeFn& f);
LatticeFn join(const LatticeFn& a, const LatticeFn& b);   // pointwise max
LatticeFn meet(const LatticeFn& a, const LatticeFn& b);   // pointwise min
LatticeFn abs_fn(const LatticeFn& f);

// Positive linear functional on lattice functions. Weight mode keeps the
// defining weights visible so tests can compare limits against exact sums;
// callable mode wraps an opaque evaluator that is only declared
// positive-linear.
class PositiveFunctional {
 public:
  static PositiveFunctional from_weights(std::vector<double> weights);
  static PositiveFunctional from_callable(std::size_t domain_size,
                                          std::function<double(const LatticeFn&)> evaluator);

  double operator()(const LatticeFn& f) const;
  std::size_t domain_size() const { return n_; }
  const std::vector<double>* hidden_weights() const;

 private:
  PositiveFunctional() = default;
  std::size_t n_ = 0;
  bool has_weights_ = false;
  std::vector<double> weights_;
  std::function<double(const LatticeFn&)> evaluator_;
};

// Interval of reals; infinite endpoints are always open.
struct Interval {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval open(double lo, double hi);
  static Interval closed(double lo, double hi);
  static Interval greater_than(double a);   // (a, +inf)
  static Interval less_than(double a);      // (-inf, a)
  static Interval at_least(double a);       // [a, +inf)
  static Interval at_most(double a);        // (-inf, a]
  static Interval point(double a);          // [a, a]

  bool contains(double v) const;
  bool is_open_set() const;     // every finite endpoint open
  bool is_closed_set() const;   // every finite endpoint closed
};

struct Constraint {
  LatticeFn f;
  Interval interval;
};

enum class SeqMode { open_sets, closed_sets };
enum class SeqCombine { intersection, set_union };

inline constexpr long long kIterationCap = 1'000'000;

// Sequence n -> [0,1]-valued lattice function tending pointwise to the
// indicator of the combined preimage target. Open mode: increasing, support
// inside the target at every n. Closed mode: decreasing, identically 1 on the
// target at every n.
class IndicatorSeq {
 public:
  static IndicatorSeq make(std::vector<Constraint> constraints, SeqMode mode,
                           SeqCombine combine);

  LatticeFn at(long long n) const;  // n >= 1
  SeqMode mode() const { return mode_; }
  SeqCombine combine() const { return combine_; }
  bool increasing() const { return mode_ == SeqMode::open_sets; }
  std::size_t domain_size() const { return n_points_; }
  // Membership flags of the target set, one per point.
  const std::vector<std::uint8_t>& target() const { return target_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  std::optional<long long> stabilization;  // cached by stabilization_index

 private:
  std::vector<Constraint> constraints_;
  SeqMode mode_ = SeqMode::open_sets;
  SeqCombine combine_ = SeqCombine::intersection;
  std::size_t n_points_ = 0;
  std::vector<std::uint8_t> target_;
};

IndicatorSeq indicator_seq(std::vector<Constraint> constraints, SeqMode mode,
                           SeqCombine combine);

// Least n with seq(n) exactly equal to the target indicator at every point,
// derived from the minimal gap between function values and interval endpoints
// and then certified by evaluation. Empty when no such n <= kIterationCap
// exists.
std::optional<long long> stabilization_index(IndicatorSeq& seq);

// Closed-point approximation h_n to the indicator of f^-1({alpha}):
// h_n(x) = clamp(1 - n|f(x) - alpha|, 0, 1).
LatticeFn value_seq(const LatticeFn& f, double alpha, long long n);

struct InessentialCheck {
  bool inessential = false;
  double limit = 0;
  long long stabilized_at = 0;
};

// Computes L = lim_n I(h_n) by exact stabilization of the closed-point
// sequence; alpha is inessential for f when L <= tol.
InessentialCheck is_inessential(const LatticeFn& f, double alpha,
                                const PositiveFunctional& I, double tol = kDefaultTol);

// A value in (r, s) that is inessential for every listed function. Scans the
// midpoint and then dyadic subdivisions in ascending order, skipping any
// candidate attained by one of the functions.
double find_inessential(std::span<const LatticeFn> fs, double r, double s,
                        const PositiveFunctional& I, double tol = kDefaultTol);

// (f v (-g v 0)) - f - (-g v 0)
LatticeFn star_combine(const LatticeFn& f, const LatticeFn& g);

enum class SpecialPairKind { exact, almost, neither };

// exact: star_combine(f, g) vanishes everywhere and 0 <= f <= 1 pointwise.
// almost: the integrals of |f*g|, -(f ^ 0) and (f v 1) - 1 against the given
// weights are all within tol of zero. Deciding between almost and neither
// needs the weights; without them a non-exact pair is an error.
SpecialPairKind check_special_pair(const LatticeFn& f, const LatticeFn& g,
                                   const std::vector<double>* weights = nullptr,
                                   double tol = kDefaultTol);

struct CoverMember {
  LatticeFn fn;      // member set is exactly {fn > 0}
  Subset set = 0;
  double measure = 0;
};

struct RefineReport {
  std::vector<CoverMember> members;
  double input_measure_sum = 0;
  double output_measure_sum = 0;
};

// Rewrites a cover drawn from the algebra generated by the sets {g_i > 0}
// into members of the form {f > 0} whose zero level sets carry no measure,
// adding at most eps of total measure. Members whose zero set already has
// measure zero keep their set; the rest are split into an upper piece and
// overlapping value bands whose thresholds avoid the finite value set.
RefineReport refine_cover(const FiniteMeasureSpace& space,
                          std::span<const LatticeFn> generators,
                          std::span<const Subset> cover, double eps);

}  // namespace intlog
