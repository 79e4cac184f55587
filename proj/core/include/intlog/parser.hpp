#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "intlog/formula.hpp"

namespace intlog {

// Raised for any malformed input text. `column` is 1-based within the parsed
// line; `line` is filled in by multi-line loaders (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int column)
      : std::runtime_error(std::move(message)), column_(column) {}

  int column() const { return column_; }

 private:
  int column_;
};

// Grammar (operators left-associative, `-` and `/ literal` are sugar):
//   formula   := term (('+' | '-') term)*
//   term      := factor (('*' factor) | ('/' signed_real))*
//   factor    := signed_real | IDENT '(' term_args ')' | '|' formula '|'
//              | '(' formula ')' | 'max(' formula ',' formula ')'
//              | 'min(' formula ',' formula ')' | 'int[' IDENT '](' formula ')'
//   statement := formula ('==' | '>=') signed_real
Formula parse_formula(std::string_view text, const Language& language);

// A bare statement line, without label prefix.
Statement parse_statement(std::string_view text, const Language& language);

}  // namespace intlog
