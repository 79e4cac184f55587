#pragma once

#include <stdexcept>
#include <string>

#include "intlog/engines.hpp"
#include "intlog/structure.hpp"

namespace intlog {

// File-level failure with a ready-to-print `error: <file>:<line>: <message>`
// diagnostic (line 0 when the failure is not tied to a specific line).
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& file, int line, const std::string& message)
      : std::runtime_error("error: " + file + ":" + std::to_string(line) + ": " + message) {}
};

// Line-oriented plain-text formats. Comments run from `#` to end of line;
// blank lines are ignored; numbers are decimal doubles.
//
// Structure file:
//   [space]      point <id> <weight>
//   [relations]  rel <name> <bound> <n values>   |  rel2 <name> <bound> <n*n values>
//   [constants]  const <name> <point-id>
//
// Theory file: one `stmt <label> <formula ==|>= value>` line per statement,
// parsed against the language of the paired structure.
//
// Stone instance:   [algebra]  atom <mass>
// Daniell instance: [space] point <id>; [generators] gen <name> <n values>;
//   [combos] combo <name> const <r> | sum <a> <b> | scale <r> <a> |
//   join <a> <b> | meet <a> <b>; [functional] hidden-weights <n values>
//   or table <name> <value> lines.
// Grid instance: Daniell sections plus [grid] coord <id> <position>.

InterpretedStructure load_structure(const std::string& path, double tol = kDefaultTol);
void write_structure(const std::string& path, const InterpretedStructure& structure);

Theory load_theory(const std::string& path, const Language& language);
void write_theory(const std::string& path, const Theory& theory);

FiniteProbabilityAlgebra load_stone_instance(const std::string& path, double tol = kDefaultTol);
DaniellInstance load_daniell_instance(const std::string& path);  // epsilon left to the caller
RieszInstance load_riesz_instance(const std::string& path);

// Deterministic report texts: key = value lines, no timestamps.
std::string render_check_report(const CheckReport& report);
std::string render_stone_report(const FiniteProbabilityAlgebra& algebra, const CheckReport& check,
                                const VerificationReport& iso);
std::string render_construction_report(const std::string& kind, const ConstructionReport& report);

}  // namespace intlog
