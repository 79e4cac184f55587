#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intlog/formula.hpp"
#include "intlog/lattice.hpp"
#include "intlog/measure.hpp"
#include "intlog/structure.hpp"

namespace intlog {

// ----- Finite probability algebras and their axiom theories -----

// Powerset algebra over a small atom set with strictly positive atom masses
// summing to 1. Elements are atom-index bit masks.
class FiniteProbabilityAlgebra {
 public:
  static FiniteProbabilityAlgebra make(std::vector<double> atom_measure,
                                       double tol = kDefaultTol);

  int atom_count() const { return static_cast<int>(atom_measure_.size()); }
  std::uint32_t element_count() const { return 1u << atom_count(); }
  double measure_of(std::uint32_t element) const;
  const std::vector<double>& atom_measure() const { return atom_measure_; }

 private:
  std::vector<double> atom_measure_;
};

std::string stone_element_name(std::uint32_t element);  // "a<mask>"

Language stone_language(const FiniteProbabilityAlgebra& algebra);

// Axiom families per element/pair: 0-or-1 range, integral = measure,
// join compatibility, complement compatibility.
Theory stone_theory(const FiniteProbabilityAlgebra& algebra);

// Points = atoms, weights = atom masses, R_a = indicator of atoms below a.
InterpretedStructure stone_model(const FiniteProbabilityAlgebra& algebra);

struct CheckItem {
  std::string what;
  bool pass = false;
  std::string witness;
};

struct VerificationReport {
  std::vector<CheckItem> checks;
  bool all_pass = true;
  void add(std::string what, bool pass, std::string witness = "");
};

// Verifies that a |-> {x : R_a(x)=1} is a measure-preserving Boolean
// isomorphism onto the generated set algebra, preserving joins, meets,
// complements and finite-chain suprema.
VerificationReport stone_isomorphism_check(const FiniteProbabilityAlgebra& algebra,
                                           const InterpretedStructure& model,
                                           double tol = kDefaultTol);

// ----- Functional-driven model construction -----

struct NamedFn {
  std::string name;
  LatticeFn fn;
};

// Single-operation lattice combination over previously named functions.
struct LatticeExpr {
  enum class Kind { constant, sum, scaled, join_of, meet_of };
  Kind kind = Kind::constant;
  double scalar = 0;      // constant value, or scale factor for `scaled`
  std::string a, b;       // operand names
};

struct Combo {
  std::string name;
  LatticeExpr expr;
};

struct DaniellInstance {
  std::vector<std::string> point_ids;
  std::vector<NamedFn> generators;
  std::vector<Combo> combos;
  // Exactly one of: an evaluable functional (hidden weights or callable), or
  // a table of values per function name (theory emission only).
  std::optional<PositiveFunctional> functional;
  std::map<std::string, double> functional_table;
  double epsilon = 0;
};

// Generators followed by resolved combos, with the constant-1 function
// (named "one") prepended when absent.
std::vector<NamedFn> instance_functions(const DaniellInstance& instance);

Language daniell_language(const DaniellInstance& instance);

// Axiom families: separated constants (gated by axiom1_cap on |X|), pointwise
// values at constants, constant/sum/scale/join/meet compatibility per combo,
// and integral = functional value per named function.
Theory daniell_theory(const DaniellInstance& instance, int axiom1_cap = 64);

struct GeneratorResidual {
  std::string name;
  double functional_value = 0;  // normalized functional on the function
  double integral_value = 0;    // integral against the constructed measure
  double residual = 0;
  double sup = 0;               // sup of the shifted positive version
  double bound = 0;             // epsilon * (1 + sup)
  bool pass = false;
};

struct ConstructionReport {
  bool zero_measure_shortcut = false;
  double normalization = 1;   // functional value on the constant 1
  double shift = 0;           // c with f' = f + c positive
  double alpha = 0;           // ranges contained in [0, alpha)
  double epsilon = 0;
  double epsilon_internal = 0;
  std::vector<double> endpoints;           // chosen inessential partition points
  std::vector<std::vector<int>> cells;     // partition atoms as point lists
  std::vector<double> lambda0;             // pre-normalization cell masses
  double lambda0_total = 0;
  bool lambda0_in_band = false;            // 1 - eps <= lambda0(X) <= 1 + eps
  std::vector<double> lambda;              // normalized per-point weights
  std::vector<GeneratorResidual> residuals;
  std::vector<CheckItem> dini;             // filled by the grid pipeline
  bool dini_pass = true;
  bool all_pass = false;
  std::vector<std::string> notes;
};

struct DaniellResult {
  InterpretedStructure model;
  ConstructionReport report;
};

// Runs the partition-and-stabilize pipeline: normalize the functional, shift
// generators positive, pick inessential partition endpoints, read cell masses
// off stabilized indicator sequences, normalize, and bound the per-generator
// residuals by epsilon * (1 + sup).
DaniellResult daniell_model(const DaniellInstance& instance, double tol = kDefaultTol);

struct RieszInstance {
  DaniellInstance base;
  std::vector<double> grid;  // strictly increasing sample coordinates, one per point
};

inline constexpr double kDiniJumpFactor = 0.25;

// Same pipeline over a sampled compact interval, plus continuity screening:
// per-generator adjacent-jump bound and the increasing-to-1 union sequence
// whose sup-norm deviation must reach exactly 0 at a finite index.
DaniellResult riesz_model(const RieszInstance& instance, double tol = kDefaultTol);

// ----- Subspace push-down -----

struct PushdownInstance {
  FiniteMeasureSpace ambient;        // N with its point masses
  SetAlgebra algebra;                // algebra on N (at most 64 points)
  Subset carrier = 0;                // X as a subset of N
  std::vector<NamedFn> functions;    // algebra-measurable functions on N
};

struct PushdownReport {
  double total = 0;                  // measure of N
  double outer = 0;                  // outer measure of the carrier
  bool full = false;
  Subset witness_cover = 0;          // minimal algebra superset when not full
  std::vector<CheckItem> transfers;  // per function: subspace vs ambient integral
  std::vector<CheckItem> subclaim;   // indicator-sequence integrals vs nu(U)
  bool all_pass = false;
};

// Computes the carrier's outer measure; when full, verifies that every
// function's integral transfers to the subspace measure, and that integrals
// of the open-set indicator sequences stay below the measure of their target.
PushdownReport pushdown_check(const PushdownInstance& instance, double tol = kDefaultTol);

}  // namespace intlog
