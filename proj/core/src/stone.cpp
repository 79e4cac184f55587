#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "intlog/engines.hpp"

namespace intlog {

void VerificationReport::add(std::string what, bool pass, std::string witness) {
  all_pass = all_pass && pass;
  checks.push_back({std::move(what), pass, std::move(witness)});
}

FiniteProbabilityAlgebra FiniteProbabilityAlgebra::make(std::vector<double> atom_measure,
                                                        double tol) {
  if (atom_measure.empty()) throw std::invalid_argument("algebra needs at least one atom");
  if (atom_measure.size() > 12)
    throw std::invalid_argument("atom count capped at 12");
  double total = 0;
  for (double w : atom_measure) {
    if (!std::isfinite(w) || w <= 0)
      throw std::invalid_argument("atom masses must be strictly positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > tol)
    throw std::invalid_argument("atom masses must sum to 1 (got " + format_real(total) + ")");
  FiniteProbabilityAlgebra b;
  b.atom_measure_ = std::move(atom_measure);
  return b;
}

double FiniteProbabilityAlgebra::measure_of(std::uint32_t element) const {
  if (element >= element_count())
    throw std::invalid_argument("element outside the algebra");
  double m = 0;
  for (int i = 0; i < atom_count(); ++i)
    if (element >> i & 1u) m += atom_measure_[static_cast<std::size_t>(i)];
  return m;
}

std::string stone_element_name(std::uint32_t element) {
  return "a" + std::to_string(element);
}

Language stone_language(const FiniteProbabilityAlgebra& algebra) {
  std::vector<Symbol> symbols;
  for (std::uint32_t m = 0; m < algebra.element_count(); ++m)
    symbols.push_back({"R_" + stone_element_name(m), SymbolKind::relation, 1, 1.0});
  return Language(std::move(symbols));
}

namespace {

Formula element_formula(const Language& lang, std::uint32_t element) {
  return Formula::rel(lang.at("R_" + stone_element_name(element)), {Term::var("x")});
}

}  // namespace

Theory stone_theory(const FiniteProbabilityAlgebra& algebra) {
  Language lang = stone_language(algebra);
  const std::uint32_t n = algebra.element_count();
  Theory theory;
  for (std::uint32_t m = 0; m < n; ++m) {
    std::array<double, 2> zero_one{0.0, 1.0};
    Statement range = encode_ae_range(element_formula(lang, m), zero_one);
    range.label = "range_" + stone_element_name(m);
    theory.push_back(std::move(range));
    theory.push_back({"measure_" + stone_element_name(m),
                      Formula::integral(element_formula(lang, m), "x"),
                      StatementRel::equal, algebra.measure_of(m)});
  }
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) {
      Statement s = encode_ae_equal(
          element_formula(lang, a | b),
          derive_lattice(LatticeKind::max, element_formula(lang, a),
                         element_formula(lang, b)));
      s.label = "join_" + stone_element_name(a) + "_" + stone_element_name(b);
      theory.push_back(std::move(s));
    }
  const std::uint32_t full = n - 1;
  for (std::uint32_t m = 0; m < n; ++m) {
    Statement s = encode_ae_equal(
        element_formula(lang, full ^ m),
        Formula::add(Formula::real(1.0),
                     Formula::mul(Formula::real(-1.0), element_formula(lang, m))));
    s.label = "compl_" + stone_element_name(m);
    theory.push_back(std::move(s));
  }
  return theory;
}

InterpretedStructure stone_model(const FiniteProbabilityAlgebra& algebra) {
  const int k = algebra.atom_count();
  std::vector<std::string> points;
  for (int i = 0; i < k; ++i) points.push_back("p" + std::to_string(i));
  FiniteMeasureSpace space =
      FiniteMeasureSpace::make(std::move(points), algebra.atom_measure());

  std::map<std::string, RelTable> tables;
  for (std::uint32_t m = 0; m < algebra.element_count(); ++m) {
    RelTable t;
    t.arity = 1;
    for (int i = 0; i < k; ++i) t.values.push_back(m >> i & 1u ? 1.0 : 0.0);
    tables.emplace("R_" + stone_element_name(m), std::move(t));
  }
  return InterpretedStructure::make(std::move(space), stone_language(algebra),
                                    std::move(tables), {});
}

VerificationReport stone_isomorphism_check(const FiniteProbabilityAlgebra& algebra,
                                           const InterpretedStructure& model,
                                           double tol) {
  const int k = algebra.atom_count();
  if (model.space.size() != k)
    throw std::invalid_argument("model does not live on the algebra's atoms");

  VerificationReport report;

  CheckReport theory_check = check_theory(model, stone_theory(algebra), 0.0, tol);
  std::string failing;
  for (const StatementCheck& c : theory_check.statements)
    if (!c.pass && failing.empty()) failing = c.label;
  report.add("model_satisfies_theory", theory_check.all_pass, failing);

  const std::uint32_t n = algebra.element_count();
  std::vector<Subset> image(n, 0);
  for (std::uint32_t m = 0; m < n; ++m)
    for (int i = 0; i < k; ++i) {
      int idx = i;
      double v = model.rel_value("R_" + stone_element_name(m), std::span<const int>(&idx, 1));
      if (std::fabs(v - 1.0) <= tol) image[m] |= Subset{1} << i;
    }

  bool injective = true;
  std::string witness;
  for (std::uint32_t a = 0; a < n && injective; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) {
      double sym_diff_mass = model.space.weight_of(image[a] ^ image[b]);
      if (image[a] == image[b] || sym_diff_mass <= tol) {
        injective = false;
        witness = "phi(" + stone_element_name(a) + ") ~ phi(" + stone_element_name(b) +
                  "), symmetric-difference mass " + format_real(sym_diff_mass);
        break;
      }
    }
  report.add("phi_injective", injective, witness);

  SetAlgebra generated = SetAlgebra::generated(k, full_mask(k), image);
  bool surjective = generated.members().size() == n;
  witness.clear();
  for (Subset member : generated.members()) {
    if (std::find(image.begin(), image.end(), member) == image.end()) {
      surjective = false;
      witness = "generated member " + std::to_string(member) + " has no preimage";
      break;
    }
  }
  report.add("phi_surjective", surjective, witness);

  bool measures = true;
  witness.clear();
  for (std::uint32_t m = 0; m < n; ++m) {
    double lhs = algebra.measure_of(m);
    double rhs = model.space.weight_of(image[m]);
    if (std::fabs(lhs - rhs) > tol) {
      measures = false;
      witness = "mu(" + stone_element_name(m) + ") = " + format_real(lhs) +
                " but image mass = " + format_real(rhs);
      break;
    }
  }
  report.add("measure_preserving", measures, witness);

  bool joins = true, meets = true;
  std::string join_witness, meet_witness;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (joins && image[a | b] != (image[a] | image[b])) {
        joins = false;
        join_witness = "phi(" + stone_element_name(a | b) + ") != phi(" +
                       stone_element_name(a) + ") | phi(" + stone_element_name(b) + ")";
      }
      if (meets && image[a & b] != (image[a] & image[b])) {
        meets = false;
        meet_witness = "phi(" + stone_element_name(a & b) + ") != phi(" +
                       stone_element_name(a) + ") & phi(" + stone_element_name(b) + ")";
      }
    }
  report.add("join_preserving", joins, join_witness);
  report.add("meet_preserving", meets, meet_witness);

  bool complements = true;
  witness.clear();
  const std::uint32_t full = n - 1;
  for (std::uint32_t m = 0; m < n; ++m) {
    if (image[full ^ m] != (full_mask(k) ^ image[m])) {
      complements = false;
      witness = "phi(" + stone_element_name(full ^ m) + ") is not the complement of phi(" +
                stone_element_name(m) + ")";
      break;
    }
  }
  report.add("complement_preserving", complements, witness);

  bool chains = true;
  witness.clear();
  Subset running = image[0];
  std::uint32_t sup = 0;
  for (int i = 0; i < k && chains; ++i) {
    sup |= 1u << i;
    running |= image[sup];
    if (image[sup] != running) {
      chains = false;
      witness = "canonical chain breaks at " + stone_element_name(sup);
    }
  }
  for (std::uint32_t a = 0; a < n && chains; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) {
      Subset chain_union = image[a & b] | image[a] | image[a | b];
      if (chain_union != image[a | b]) {
        chains = false;
        witness = "chain through " + stone_element_name(a) + ", " + stone_element_name(b) +
                  " has a sup mismatch";
        break;
      }
    }
  report.add("chain_suprema", chains, witness);

  return report;
}

}  // namespace intlog
