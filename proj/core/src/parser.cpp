#include "intlog/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace intlog {

namespace {

struct Token {
  enum class Type {
    ident, real, plus, minus, star, slash, lpar, rpar,
    bar, comma, lbrack, rbrack, eqeq, geq, end
  };
  Type type = Type::end;
  std::string text;
  double num = 0.0;
  int col = 0;
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return static_cast<int>(at) + 1; };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    Token tok;
    tok.col = col(i);
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j])))
          throw ParseError("malformed real literal", tok.col);
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k >= text.size() || !std::isdigit(static_cast<unsigned char>(text[k])))
          throw ParseError("malformed exponent in real literal", tok.col);
        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        j = k;
      }
      tok.type = Token::Type::real;
      tok.text = std::string(text.substr(i, j - i));
      double value = 0.0;
      auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
      if (res.ec == std::errc::result_out_of_range || !std::isfinite(value))
        throw ParseError("real literal out of range: " + tok.text, tok.col);
      if (res.ec != std::errc() || res.ptr != tok.text.data() + tok.text.size())
        throw ParseError("malformed real literal: " + tok.text, tok.col);
      tok.num = value;
      i = j;
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      tok.type = Token::Type::ident;
      tok.text = std::string(text.substr(i, j - i));
      i = j;
      out.push_back(std::move(tok));
      continue;
    }
    switch (c) {
      case '+': tok.type = Token::Type::plus; break;
      case '-': tok.type = Token::Type::minus; break;
      case '*': tok.type = Token::Type::star; break;
      case '/': tok.type = Token::Type::slash; break;
      case '(': tok.type = Token::Type::lpar; break;
      case ')': tok.type = Token::Type::rpar; break;
      case '|': tok.type = Token::Type::bar; break;
      case ',': tok.type = Token::Type::comma; break;
      case '[': tok.type = Token::Type::lbrack; break;
      case ']': tok.type = Token::Type::rbrack; break;
      case '=':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          tok.type = Token::Type::eqeq;
          ++i;
          break;
        }
        throw ParseError("expected == (single = is not an operator)", tok.col);
      case '>':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          tok.type = Token::Type::geq;
          ++i;
          break;
        }
        throw ParseError("expected >= (strict > is not an operator)", tok.col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok.col);
    }
    ++i;
    out.push_back(std::move(tok));
  }
  Token end;
  end.type = Token::Type::end;
  end.col = col(text.size());
  out.push_back(std::move(end));
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Language& language)
      : tokens_(lex(text)), language_(language) {}

  Formula formula_only() {
    Formula f = parse_sum();
    expect(Token::Type::end, "unexpected trailing input");
    return f;
  }

  Statement statement() {
    Statement s;
    s.formula = parse_sum();
    const Token& op = peek();
    if (op.type == Token::Type::eqeq)
      s.rel = StatementRel::equal;
    else if (op.type == Token::Type::geq)
      s.rel = StatementRel::at_least;
    else
      throw ParseError("expected == or >= after formula", op.col);
    advance();
    s.threshold = signed_literal();
    expect(Token::Type::end, "unexpected trailing input");
    return s;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  void expect(Token::Type t, const char* message) {
    if (peek().type != t) throw ParseError(message, peek().col);
    advance();
  }

  double signed_literal() {
    double sign = 1.0;
    if (peek().type == Token::Type::minus) {
      sign = -1.0;
      advance();
    } else if (peek().type == Token::Type::plus) {
      advance();
    }
    if (peek().type != Token::Type::real)
      throw ParseError("expected a real literal", peek().col);
    return sign * advance().num;
  }

  Formula parse_sum() {
    Formula acc = parse_product();
    while (peek().type == Token::Type::plus || peek().type == Token::Type::minus) {
      bool minus = advance().type == Token::Type::minus;
      Formula rhs = parse_product();
      if (minus) rhs = Formula::mul(Formula::real(-1.0), std::move(rhs));
      acc = Formula::add(std::move(acc), std::move(rhs));
    }
    return acc;
  }

  Formula parse_product() {
    Formula acc = parse_factor();
    while (peek().type == Token::Type::star || peek().type == Token::Type::slash) {
      bool divide = advance().type == Token::Type::slash;
      if (divide) {
        int col = peek().col;
        double d = signed_literal();
        if (d == 0.0) throw ParseError("division by zero literal", col);
        acc = Formula::mul(std::move(acc), Formula::real(1.0 / d));
      } else {
        acc = Formula::mul(std::move(acc), parse_factor());
      }
    }
    return acc;
  }

  Formula parse_factor() {
    const Token& tok = peek();
    switch (tok.type) {
      case Token::Type::plus:
      case Token::Type::minus:
        return Formula::real(signed_literal());
      case Token::Type::real:
        return Formula::real(advance().num);
      case Token::Type::bar: {
        advance();
        Formula f = parse_sum();
        expect(Token::Type::bar, "expected closing |");
        return Formula::abs(std::move(f));
      }
      case Token::Type::lpar: {
        advance();
        Formula f = parse_sum();
        expect(Token::Type::rpar, "expected closing )");
        return f;
      }
      case Token::Type::ident:
        return parse_ident();
      default:
        throw ParseError("expected a formula", tok.col);
    }
  }

  Formula parse_ident() {
    Token tok = advance();
    const std::string& name = tok.text;
    if (name == "max" || name == "min") {
      expect(Token::Type::lpar, "expected ( after max/min");
      Formula a = parse_sum();
      expect(Token::Type::comma, "expected , between max/min arguments");
      Formula b = parse_sum();
      expect(Token::Type::rpar, "expected closing )");
      return derive_lattice(name == "max" ? LatticeKind::max : LatticeKind::min, a, b);
    }
    if (name == "int") {
      expect(Token::Type::lbrack, "expected [ after int");
      if (peek().type != Token::Type::ident)
        throw ParseError("expected integral variable name", peek().col);
      Token var = advance();
      if (Language::reserved(var.text))
        throw ParseError("reserved word used as integral variable: " + var.text, var.col);
      if (const Symbol* s = language_.find(var.text))
        throw ParseError((s->kind == SymbolKind::constant
                              ? "constant symbol used as integral variable: "
                              : "relation symbol used as integral variable: ") +
                             var.text,
                         var.col);
      for (const std::string& b : binders_)
        if (b == var.text)
          throw ParseError("variable " + var.text + " is already bound", var.col);
      expect(Token::Type::rbrack, "expected ] after integral variable");
      expect(Token::Type::lpar, "expected ( after int[...]");
      binders_.push_back(var.text);
      Formula body = parse_sum();
      binders_.pop_back();
      expect(Token::Type::rpar, "expected closing )");
      return Formula::integral(std::move(body), var.text);
    }
    if (name == "inf" || name == "infinity" || name == "nan")
      throw ParseError("non-finite real literal: " + name, tok.col);
    const Symbol* sym = language_.find(name);
    if (!sym) throw ParseError("unknown symbol: " + name, tok.col);
    if (sym->kind == SymbolKind::constant)
      throw ParseError("constant symbol used as a formula: " + name, tok.col);
    expect(Token::Type::lpar, "expected ( after relation symbol");
    std::vector<Term> args;
    if (peek().type != Token::Type::rpar) {
      args.push_back(parse_term());
      while (peek().type == Token::Type::comma) {
        advance();
        args.push_back(parse_term());
      }
    }
    const Token& close = peek();
    expect(Token::Type::rpar, "expected closing ) after arguments");
    if (static_cast<int>(args.size()) != sym->arity)
      throw ParseError("arity mismatch for " + name + ": expected " +
                           std::to_string(sym->arity) + " arguments, got " +
                           std::to_string(args.size()),
                       close.col);
    return Formula::rel(*sym, std::move(args));
  }

  Term parse_term() {
    if (peek().type != Token::Type::ident)
      throw ParseError("expected a variable or constant name", peek().col);
    Token tok = advance();
    if (const Symbol* s = language_.find(tok.text)) {
      if (s->kind == SymbolKind::relation)
        throw ParseError("relation symbol used as a term: " + tok.text, tok.col);
      return Term::cons(tok.text);
    }
    if (Language::reserved(tok.text))
      throw ParseError("reserved word used as a variable: " + tok.text, tok.col);
    return Term::var(tok.text);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Language& language_;
  std::vector<std::string> binders_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Language& language) {
  return Parser(text, language).formula_only();
}

Statement parse_statement(std::string_view text, const Language& language) {
  return Parser(text, language).statement();
}

}  // namespace intlog
