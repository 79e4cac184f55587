#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "intlog/io.hpp"
#include "intlog/parser.hpp"

namespace intlog {

namespace {

struct Line {
  int number = 0;
  std::string raw;                  // trimmed, comments stripped
  std::vector<std::string> tokens;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, 0, "cannot open file");
  std::vector<Line> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string text = trim(raw);
    if (text.empty()) continue;
    Line line;
    line.number = number;
    line.raw = text;
    std::istringstream split(text);
    std::string tok;
    while (split >> tok) line.tokens.push_back(tok);
    out.push_back(std::move(line));
  }
  return out;
}

bool is_section(const Line& line) {
  return line.raw.size() >= 2 && line.raw.front() == '[' && line.raw.back() == ']';
}

std::string section_name(const Line& line) { return line.raw.substr(1, line.raw.size() - 2); }

double need_double(const std::string& path, const Line& line, const std::string& token,
                   const std::string& what) {
  double value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw IoError(path, line.number, "expected a number for " + what + ", got '" + token + "'");
  if (!std::isfinite(value))
    throw IoError(path, line.number, what + " must be finite");
  return value;
}

void need_tokens(const std::string& path, const Line& line, std::size_t count,
                 const std::string& shape) {
  if (line.tokens.size() != count)
    throw IoError(path, line.number, "expected '" + shape + "'");
}

// Runs the deferred semantic constructor, converting its exceptions into
// file-level diagnostics.
template <typename F>
auto semantic(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& ex) {
    throw IoError(path, 1, ex.what());
  }
}

}  // namespace

InterpretedStructure load_structure(const std::string& path, double tol) {
  std::vector<std::string> point_ids;
  std::vector<double> weights;
  std::vector<Symbol> symbols;
  std::map<std::string, RelTable> tables;
  std::map<std::string, std::string> constant_points;
  std::set<std::string> names;
  std::string section;

  for (const Line& line : read_lines(path)) {
    if (is_section(line)) {
      section = section_name(line);
      if (section != "space" && section != "relations" && section != "constants")
        throw IoError(path, line.number, "unknown section [" + section + "]");
      continue;
    }
    const std::string& kw = line.tokens.front();
    if (section == "space" && kw == "point") {
      need_tokens(path, line, 3, "point <id> <weight>");
      point_ids.push_back(line.tokens[1]);
      weights.push_back(need_double(path, line, line.tokens[2], "point weight"));
    } else if (section == "relations" && (kw == "rel" || kw == "rel2")) {
      if (point_ids.empty())
        throw IoError(path, line.number, "relation lines before the [space] section");
      int arity = kw == "rel" ? 1 : 2;
      std::size_t n = point_ids.size();
      std::size_t cells = arity == 1 ? n : n * n;
      if (line.tokens.size() != 3 + cells)
        throw IoError(path, line.number,
                      "expected '" + kw + " <name> <bound> <" + std::to_string(cells) +
                          " values>'");
      const std::string& name = line.tokens[1];
      if (!names.insert(name).second)
        throw IoError(path, line.number, "duplicate symbol: " + name);
      double bound = need_double(path, line, line.tokens[2], "relation bound");
      RelTable table;
      table.arity = arity;
      for (std::size_t i = 0; i < cells; ++i)
        table.values.push_back(need_double(path, line, line.tokens[3 + i], "table value"));
      symbols.push_back(Symbol{name, SymbolKind::relation, arity, bound});
      tables[name] = std::move(table);
    } else if (section == "constants" && kw == "const") {
      need_tokens(path, line, 3, "const <name> <point-id>");
      const std::string& name = line.tokens[1];
      if (!names.insert(name).second)
        throw IoError(path, line.number, "duplicate symbol: " + name);
      symbols.push_back(Symbol{name, SymbolKind::constant, 0, 1.0});
      constant_points[name] = line.tokens[2];
    } else if (section.empty()) {
      throw IoError(path, line.number, "content before the first section header");
    } else {
      throw IoError(path, line.number, "unexpected line in [" + section + "]: " + kw);
    }
  }
  if (point_ids.empty()) throw IoError(path, 1, "structure file has no points");

  return semantic(path, [&] {
    FiniteMeasureSpace space = FiniteMeasureSpace::make(point_ids, weights);
    std::map<std::string, int> constants;
    for (const auto& [name, pid] : constant_points) {
      int idx = space.index_of(pid);
      if (idx < 0) throw std::invalid_argument("constant " + name + " names unknown point " + pid);
      constants[name] = idx;
    }
    return InterpretedStructure::make(std::move(space), Language(symbols), std::move(tables),
                                      std::move(constants), tol);
  });
}

void write_structure(const std::string& path, const InterpretedStructure& structure) {
  std::ostringstream out;
  out << "[space]\n";
  for (std::size_t i = 0; i < structure.space.points.size(); ++i)
    out << "point " << structure.space.points[i] << ' '
        << format_real(structure.space.weights[i]) << '\n';
  out << "[relations]\n";
  for (const auto& [name, table] : structure.tables) {
    if (name == "e") continue;  // rebuilt as the diagonal on load
    out << (table.arity == 1 ? "rel " : "rel2 ") << name << ' '
        << format_real(structure.language.at(name).bound);
    for (double v : table.values) out << ' ' << format_real(v);
    out << '\n';
  }
  out << "[constants]\n";
  for (const auto& [name, idx] : structure.constants)
    out << "const " << name << ' ' << structure.space.points[static_cast<std::size_t>(idx)]
        << '\n';
  std::ofstream file(path);
  if (!file) throw IoError(path, 0, "cannot write file");
  file << out.str();
}

Theory load_theory(const std::string& path, const Language& language) {
  Theory theory;
  for (const Line& line : read_lines(path)) {
    if (is_section(line)) {
      if (section_name(line) != "statements")
        throw IoError(path, line.number, "unknown section [" + section_name(line) + "]");
      continue;
    }
    if (line.tokens.front() != "stmt" || line.tokens.size() < 3)
      throw IoError(path, line.number, "expected 'stmt <label> <statement>'");
    const std::string& label = line.tokens[1];
    std::size_t at = line.raw.find(label, 4);
    std::string body = trim(line.raw.substr(at + label.size()));
    try {
      Statement st = parse_statement(body, language);
      st.label = label;
      theory.push_back(std::move(st));
    } catch (const ParseError& ex) {
      throw IoError(path, line.number,
                    std::string(ex.what()) + " (column " + std::to_string(ex.column()) + ")");
    } catch (const std::exception& ex) {
      throw IoError(path, line.number, ex.what());
    }
  }
  return theory;
}

void write_theory(const std::string& path, const Theory& theory) {
  std::ofstream file(path);
  if (!file) throw IoError(path, 0, "cannot write file");
  file << "[statements]\n";
  for (std::size_t i = 0; i < theory.size(); ++i) {
    const Statement& st = theory[i];
    std::string label = st.label.empty() ? "stmt" + std::to_string(i) : st.label;
    file << "stmt " << label << ' ' << render_statement(st) << '\n';
  }
}

FiniteProbabilityAlgebra load_stone_instance(const std::string& path, double tol) {
  std::vector<double> masses;
  std::string section;
  for (const Line& line : read_lines(path)) {
    if (is_section(line)) {
      section = section_name(line);
      if (section != "algebra")
        throw IoError(path, line.number, "unknown section [" + section + "]");
      continue;
    }
    if (section != "algebra" || line.tokens.front() != "atom")
      throw IoError(path, line.number, "expected 'atom <mass>' lines in [algebra]");
    need_tokens(path, line, 2, "atom <mass>");
    masses.push_back(need_double(path, line, line.tokens[1], "atom mass"));
  }
  if (masses.empty()) throw IoError(path, 1, "no atoms given");
  return semantic(path, [&] { return FiniteProbabilityAlgebra::make(masses, tol); });
}

namespace {

DaniellInstance load_daniell_sections(const std::string& path, const std::vector<Line>& lines,
                                      bool allow_grid, std::map<std::string, double>* grid_out) {
  DaniellInstance inst;
  bool saw_hidden = false;
  std::string section;
  for (const Line& line : lines) {
    if (is_section(line)) {
      section = section_name(line);
      bool known = section == "space" || section == "generators" || section == "combos" ||
                   section == "functional" || (allow_grid && section == "grid");
      if (!known) throw IoError(path, line.number, "unknown section [" + section + "]");
      continue;
    }
    const std::string& kw = line.tokens.front();
    if (section == "space" && kw == "point") {
      need_tokens(path, line, 2, "point <id>");
      inst.point_ids.push_back(line.tokens[1]);
    } else if (section == "generators" && kw == "gen") {
      if (inst.point_ids.empty())
        throw IoError(path, line.number, "generator lines before the [space] section");
      std::size_t n = inst.point_ids.size();
      if (line.tokens.size() != 2 + n)
        throw IoError(path, line.number,
                      "expected 'gen <name> <" + std::to_string(n) + " values>'");
      NamedFn f;
      f.name = line.tokens[1];
      std::vector<double> values;
      for (std::size_t i = 0; i < n; ++i)
        values.push_back(need_double(path, line, line.tokens[2 + i], "generator value"));
      f.fn = LatticeFn{std::move(values)};
      inst.generators.push_back(std::move(f));
    } else if (section == "combos" && kw == "combo") {
      if (line.tokens.size() < 3)
        throw IoError(path, line.number, "expected 'combo <name> <op> ...'");
      Combo combo;
      combo.name = line.tokens[1];
      const std::string& op = line.tokens[2];
      if (op == "const") {
        need_tokens(path, line, 4, "combo <name> const <value>");
        combo.expr.kind = LatticeExpr::Kind::constant;
        combo.expr.scalar = need_double(path, line, line.tokens[3], "combo constant");
      } else if (op == "sum") {
        need_tokens(path, line, 5, "combo <name> sum <a> <b>");
        combo.expr.kind = LatticeExpr::Kind::sum;
        combo.expr.a = line.tokens[3];
        combo.expr.b = line.tokens[4];
      } else if (op == "scale") {
        need_tokens(path, line, 5, "combo <name> scale <factor> <a>");
        combo.expr.kind = LatticeExpr::Kind::scaled;
        combo.expr.scalar = need_double(path, line, line.tokens[3], "combo factor");
        combo.expr.a = line.tokens[4];
      } else if (op == "join") {
        need_tokens(path, line, 5, "combo <name> join <a> <b>");
        combo.expr.kind = LatticeExpr::Kind::join_of;
        combo.expr.a = line.tokens[3];
        combo.expr.b = line.tokens[4];
      } else if (op == "meet") {
        need_tokens(path, line, 5, "combo <name> meet <a> <b>");
        combo.expr.kind = LatticeExpr::Kind::meet_of;
        combo.expr.a = line.tokens[3];
        combo.expr.b = line.tokens[4];
      } else {
        throw IoError(path, line.number, "unknown combo operation: " + op);
      }
      inst.combos.push_back(std::move(combo));
    } else if (section == "functional" && kw == "hidden-weights") {
      if (inst.point_ids.empty())
        throw IoError(path, line.number, "functional before the [space] section");
      std::size_t n = inst.point_ids.size();
      if (line.tokens.size() != 1 + n)
        throw IoError(path, line.number,
                      "expected 'hidden-weights <" + std::to_string(n) + " values>'");
      if (saw_hidden || !inst.functional_table.empty())
        throw IoError(path, line.number, "functional given more than once");
      std::vector<double> weights;
      for (std::size_t i = 0; i < n; ++i)
        weights.push_back(need_double(path, line, line.tokens[1 + i], "weight"));
      inst.functional = semantic(path, [&] {
        return PositiveFunctional::from_weights(std::move(weights));
      });
      saw_hidden = true;
    } else if (section == "functional" && kw == "table") {
      need_tokens(path, line, 3, "table <name> <value>");
      if (saw_hidden) throw IoError(path, line.number, "functional given more than once");
      if (!inst.functional_table.emplace(line.tokens[1],
                                         need_double(path, line, line.tokens[2], "table value"))
               .second)
        throw IoError(path, line.number, "duplicate table entry: " + line.tokens[1]);
    } else if (allow_grid && section == "grid" && kw == "coord") {
      need_tokens(path, line, 3, "coord <id> <position>");
      if (!grid_out->emplace(line.tokens[1],
                             need_double(path, line, line.tokens[2], "grid position"))
               .second)
        throw IoError(path, line.number, "duplicate grid entry: " + line.tokens[1]);
    } else if (section.empty()) {
      throw IoError(path, line.number, "content before the first section header");
    } else {
      throw IoError(path, line.number, "unexpected line in [" + section + "]: " + kw);
    }
  }
  if (inst.point_ids.empty()) throw IoError(path, 1, "instance has no points");
  if (!inst.functional.has_value() && inst.functional_table.empty())
    throw IoError(path, 1, "instance has no [functional] section");
  return inst;
}

}  // namespace

DaniellInstance load_daniell_instance(const std::string& path) {
  return load_daniell_sections(path, read_lines(path), false, nullptr);
}

RieszInstance load_riesz_instance(const std::string& path) {
  std::map<std::string, double> grid_map;
  RieszInstance inst;
  inst.base = load_daniell_sections(path, read_lines(path), true, &grid_map);
  for (const std::string& id : inst.base.point_ids) {
    auto it = grid_map.find(id);
    if (it == grid_map.end()) throw IoError(path, 1, "no grid position for point " + id);
    inst.grid.push_back(it->second);
  }
  if (grid_map.size() != inst.base.point_ids.size())
    throw IoError(path, 1, "grid names a point outside the space");
  return inst;
}

std::string render_check_report(const CheckReport& report) {
  std::ostringstream out;
  out << "statements = " << report.statements.size() << '\n';
  out << "passed = " << report.pass_count << '\n';
  out << "max_residual = " << format_real(report.max_residual) << '\n';
  out << "all_pass = " << (report.all_pass ? "true" : "false") << '\n';
  for (const StatementCheck& st : report.statements) {
    out << "stmt " << st.label << " = " << (st.pass ? "pass" : "FAIL");
    if (!st.error.empty()) {
      out << " error: " << st.error;
    } else {
      out << " value = " << format_real(st.value) << " threshold = "
          << format_real(st.threshold) << " residual = " << format_real(st.residual);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_stone_report(const FiniteProbabilityAlgebra& algebra, const CheckReport& check,
                                const VerificationReport& iso) {
  std::ostringstream out;
  out << "kind = stone\n";
  out << "atoms = " << algebra.atom_count() << '\n';
  out << "elements = " << algebra.element_count() << '\n';
  out << "statements = " << check.statements.size() << '\n';
  out << "residual_max = " << format_real(check.max_residual) << '\n';
  out << "theory = " << (check.all_pass ? "pass" : "FAIL") << '\n';
  for (const StatementCheck& st : check.statements)
    if (!st.pass)
      out << "stmt " << st.label << " = FAIL residual = " << format_real(st.residual) << '\n';
  for (const CheckItem& item : iso.checks) {
    out << "iso " << item.what << " = " << (item.pass ? "pass" : "FAIL");
    if (!item.pass && !item.witness.empty()) out << " (" << item.witness << ")";
    out << '\n';
  }
  out << "isomorphism = " << (iso.all_pass ? "pass" : "FAIL") << '\n';
  out << "all_pass = " << (check.all_pass && iso.all_pass ? "true" : "false") << '\n';
  return out.str();
}

std::string render_construction_report(const std::string& kind, const ConstructionReport& rep) {
  std::ostringstream out;
  out << "kind = " << kind << '\n';
  out << "zero_measure = " << (rep.zero_measure_shortcut ? "true" : "false") << '\n';
  out << "normalization = " << format_real(rep.normalization) << '\n';
  out << "shift = " << format_real(rep.shift) << '\n';
  out << "alpha = " << format_real(rep.alpha) << '\n';
  out << "epsilon = " << format_real(rep.epsilon) << '\n';
  out << "epsilon_internal = " << format_real(rep.epsilon_internal) << '\n';
  out << "endpoints = " << rep.endpoints.size() << '\n';
  out << "cells = " << rep.cells.size() << '\n';
  out << "lambda0_total = " << format_real(rep.lambda0_total) << '\n';
  out << "lambda0_in_band = " << (rep.lambda0_in_band ? "true" : "false") << '\n';
  double residual_max = 0;
  for (const GeneratorResidual& r : rep.residuals) {
    residual_max = std::max(residual_max, r.residual);
    out << "residual " << r.name << " = " << format_real(r.residual)
        << " bound = " << format_real(r.bound) << ' ' << (r.pass ? "pass" : "FAIL") << '\n';
  }
  out << "residual_max = " << format_real(residual_max) << '\n';
  for (const CheckItem& item : rep.dini) {
    out << "dini " << item.what << " = " << (item.pass ? "pass" : "FAIL");
    if (!item.witness.empty()) out << " (" << item.witness << ")";
    out << '\n';
  }
  if (!rep.dini.empty())
    out << "dini_pass = " << (rep.dini_pass ? "true" : "false") << '\n';
  for (const std::string& note : rep.notes) out << "note: " << note << '\n';
  out << "all_pass = " << (rep.all_pass ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace intlog
