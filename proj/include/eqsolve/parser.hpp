#pragma once

// Parser and printer for the line-oriented constraint file format:
//
//   # comment
//   var <name>...
//   param <name>=<real>...
//   eq <name>: <expression> = <expression>
//   eq <name>: uses <name>...
//   domain <name> in [<lo>, <hi>]
//
// Expression grammar (precedence low to high): + -, * /, unary -, ^ with an
// integer literal exponent, atoms (number, identifier, sin/cos/sqrt call,
// parenthesized expression). Names must be declared before use. A file is
// either fully expressional or fully structural-only.

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eqsolve/errors.hpp"
#include "eqsolve/system.hpp"

namespace eqsolve {

namespace detail {

inline const std::set<std::string, std::less<>> kReservedWords = {
    "var", "param", "eq", "domain", "in", "uses", "sin", "cos", "sqrt"};

struct Token {
  enum class Kind { Identifier, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  double number = 0.0;
  int column = 0;  // 1-based
};

class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& message, int column) const {
    throw ParseError(line_no_, column, message);
  }
  [[noreturn]] void fail_here(const std::string& message) const {
    fail(message, current_.kind == Token::Kind::End ? static_cast<int>(line_.size()) + 1
                                                    : current_.column);
  }

  int line_number() const { return line_no_; }

 private:
  void advance() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    current_ = Token{};
    current_.column = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size()) {
      current_.kind = Token::Kind::End;
      return;
    }
    char c = line_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
        ++pos_;
      current_.kind = Token::Kind::Identifier;
      current_.text = std::string(line_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < line_.size() &&
         std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      if (pos_ < line_.size() && line_[pos_] == '.') {
        ++pos_;
        while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      }
      if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E')) {
        size_t mark = pos_++;
        if (pos_ < line_.size() && (line_[pos_] == '+' || line_[pos_] == '-')) ++pos_;
        if (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
          while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        } else {
          pos_ = mark;  // 'e' belongs to a following identifier, not this number
        }
      }
      current_.kind = Token::Kind::Number;
      current_.text = std::string(line_.substr(start, pos_ - start));
      auto res = std::from_chars(current_.text.data(), current_.text.data() + current_.text.size(),
                                 current_.number);
      if (res.ec != std::errc())
        throw ParseError(line_no_, current_.column, "malformed number '" + current_.text + "'");
      return;
    }
    current_.kind = Token::Kind::Symbol;
    current_.text = std::string(1, c);
    ++pos_;
  }

  std::string_view line_;
  int line_no_;
  size_t pos_ = 0;
  Token current_;
};

class SystemParser {
 public:
  EquationSystem parse(std::string_view text) {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t eol = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
      ++line_no;
      if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      parse_line(line, line_no);
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
    return std::move(sys_);
  }

 private:
  void parse_line(std::string_view line, int line_no) {
    LineLexer lex(line, line_no);
    if (lex.peek().kind == Token::Kind::End) return;
    if (lex.peek().kind != Token::Kind::Identifier)
      lex.fail_here("expected a declaration (var, param, eq or domain)");
    Token head = lex.take();
    if (head.text == "var")
      parse_var(lex);
    else if (head.text == "param")
      parse_param(lex);
    else if (head.text == "eq")
      parse_eq(lex);
    else if (head.text == "domain")
      parse_domain(lex);
    else
      lex.fail("unknown declaration '" + head.text + "'", head.column);
  }

  std::string take_name(LineLexer& lex, const char* what) {
    if (lex.peek().kind != Token::Kind::Identifier)
      lex.fail_here(std::string("expected ") + what);
    Token t = lex.take();
    if (kReservedWords.count(t.text))
      lex.fail("'" + t.text + "' is a reserved word", t.column);
    return t.text;
  }

  void declare_variable(LineLexer& lex, const std::string& name, int column) {
    if (sys_.unknown_index(name) || sys_.parameter_index(name))
      lex.fail("duplicate name '" + name + "'", column);
  }

  void parse_var(LineLexer& lex) {
    if (lex.peek().kind == Token::Kind::End) lex.fail_here("expected at least one unknown name");
    while (lex.peek().kind != Token::Kind::End) {
      int column = lex.peek().column;
      std::string name = take_name(lex, "an unknown name");
      declare_variable(lex, name, column);
      sys_.unknowns.push_back(name);
      sys_.domains.push_back(kDefaultDomain);
      explicit_domain_.push_back(false);
    }
  }

  void parse_param(LineLexer& lex) {
    if (lex.peek().kind == Token::Kind::End) lex.fail_here("expected at least one parameter");
    while (lex.peek().kind != Token::Kind::End) {
      int column = lex.peek().column;
      std::string name = take_name(lex, "a parameter name");
      declare_variable(lex, name, column);
      expect_symbol(lex, "=");
      sys_.parameters.push_back(name);
      sys_.parameter_values.push_back(take_real(lex));
    }
  }

  void parse_eq(LineLexer& lex) {
    int name_col = lex.peek().column;
    std::string name = take_name(lex, "an equation name");
    for (const Equation& eq : sys_.equations)
      if (eq.name == name) lex.fail("duplicate equation name '" + name + "'", name_col);
    expect_symbol(lex, ":");

    Equation eq;
    eq.name = name;
    if (lex.peek().kind == Token::Kind::Identifier && lex.peek().text == "uses") {
      if (seen_expression_)
        lex.fail_here("cannot mix expression equations and structural-only equations in one file");
      seen_structural_ = true;
      sys_.structural_only = true;
      lex.take();
      std::set<int> used;
      if (lex.peek().kind == Token::Kind::End) lex.fail_here("expected at least one unknown after 'uses'");
      while (lex.peek().kind != Token::Kind::End) {
        Token t = lex.take();
        if (t.kind != Token::Kind::Identifier) lex.fail("expected an unknown name", t.column);
        auto u = sys_.unknown_index(t.text);
        if (!u) lex.fail("'" + t.text + "' is not a declared unknown", t.column);
        used.insert(*u);
      }
      eq.structural_uses.assign(used.begin(), used.end());
    } else {
      if (seen_structural_)
        lex.fail_here("cannot mix expression equations and structural-only equations in one file");
      seen_expression_ = true;
      Expr lhs = parse_expression(lex);
      expect_symbol(lex, "=");
      Expr rhs = parse_expression(lex);
      if (lex.peek().kind != Token::Kind::End) lex.fail_here("unexpected trailing input");
      // Normalize lhs = rhs to lhs - rhs = 0; a literal 0 right-hand side
      // adds no subtraction node.
      eq.expr = is_constant(rhs, 0.0) ? lhs : make_binary(BinaryOp::Subtract, lhs, rhs);
    }
    sys_.equations.push_back(std::move(eq));
  }

  void parse_domain(LineLexer& lex) {
    Token t = lex.peek();
    std::string name = take_name(lex, "an unknown name");
    auto u = sys_.unknown_index(name);
    if (!u) {
      if (sys_.parameter_index(name))
        lex.fail("'" + name + "' is a parameter; domains apply to unknowns", t.column);
      lex.fail("'" + name + "' is not a declared unknown", t.column);
    }
    if (explicit_domain_[*u]) lex.fail("duplicate domain for '" + name + "'", t.column);
    if (!(lex.peek().kind == Token::Kind::Identifier && lex.peek().text == "in"))
      lex.fail_here("expected 'in'");
    lex.take();
    expect_symbol(lex, "[");
    double lo = take_real(lex);
    expect_symbol(lex, ",");
    double hi = take_real(lex);
    expect_symbol(lex, "]");
    if (lex.peek().kind != Token::Kind::End) lex.fail_here("unexpected trailing input");
    if (!(lo <= hi)) lex.fail("empty domain: lower bound exceeds upper bound", t.column);
    sys_.domains[*u] = {lo, hi};
    explicit_domain_[*u] = true;
  }

  void expect_symbol(LineLexer& lex, std::string_view sym) {
    if (lex.peek().kind != Token::Kind::Symbol || lex.peek().text != sym)
      lex.fail_here("expected '" + std::string(sym) + "'");
    lex.take();
  }

  double take_real(LineLexer& lex) {
    double sign = 1.0;
    while (lex.peek().kind == Token::Kind::Symbol &&
           (lex.peek().text == "-" || lex.peek().text == "+")) {
      if (lex.take().text == "-") sign = -sign;
    }
    if (lex.peek().kind != Token::Kind::Number) lex.fail_here("expected a number");
    return sign * lex.take().number;
  }

  // expression := term (('+'|'-') term)*
  Expr parse_expression(LineLexer& lex) {
    Expr e = parse_term(lex);
    while (lex.peek().kind == Token::Kind::Symbol &&
           (lex.peek().text == "+" || lex.peek().text == "-")) {
      BinaryOp op = lex.take().text == "+" ? BinaryOp::Add : BinaryOp::Subtract;
      e = make_binary(op, std::move(e), parse_term(lex));
    }
    return e;
  }

  // term := factor (('*'|'/') factor)*
  Expr parse_term(LineLexer& lex) {
    Expr e = parse_factor(lex);
    while (lex.peek().kind == Token::Kind::Symbol &&
           (lex.peek().text == "*" || lex.peek().text == "/")) {
      BinaryOp op = lex.take().text == "*" ? BinaryOp::Multiply : BinaryOp::Divide;
      e = make_binary(op, std::move(e), parse_factor(lex));
    }
    return e;
  }

  // factor := '-' factor | power
  Expr parse_factor(LineLexer& lex) {
    if (lex.peek().kind == Token::Kind::Symbol && lex.peek().text == "-") {
      lex.take();
      return make_unary(UnaryOp::Negate, parse_factor(lex));
    }
    return parse_power(lex);
  }

  // power := atom ['^' exponent]; exponent chains are right-associative and
  // fold to one integer (x^2^3 = x^(2^3) = x^8).
  Expr parse_power(LineLexer& lex) {
    Expr base = parse_atom(lex);
    if (!(lex.peek().kind == Token::Kind::Symbol && lex.peek().text == "^")) return base;
    lex.take();
    return make_power(std::move(base), parse_exponent(lex));
  }

  int parse_exponent(LineLexer& lex) {
    int sign = 1;
    if (lex.peek().kind == Token::Kind::Symbol &&
        (lex.peek().text == "-" || lex.peek().text == "+")) {
      if (lex.take().text == "-") sign = -1;
    }
    Token t = lex.peek();
    if (t.kind != Token::Kind::Number) lex.fail_here("exponent must be an integer literal");
    double v = t.number;
    if (v != static_cast<double>(static_cast<long long>(v)) || std::abs(v) > 1e9)
      lex.fail("non-integer exponent '" + t.text + "'", t.column);
    lex.take();
    if (lex.peek().kind == Token::Kind::Symbol && lex.peek().text == "^") {
      lex.take();
      double folded = std::pow(v, parse_exponent(lex));
      if (folded != static_cast<double>(static_cast<long long>(folded)) || std::abs(folded) > 1e9)
        lex.fail("non-integer exponent after folding '" + t.text + "^...'", t.column);
      v = folded;
    }
    return sign * static_cast<int>(v);
  }

  Expr parse_atom(LineLexer& lex) {
    const Token& t = lex.peek();
    if (t.kind == Token::Kind::Number) return make_constant(lex.take().number);
    if (t.kind == Token::Kind::Symbol && t.text == "(") {
      lex.take();
      Expr e = parse_expression(lex);
      expect_symbol(lex, ")");
      return e;
    }
    if (t.kind == Token::Kind::Identifier) {
      Token id = lex.take();
      if (id.text == "sin" || id.text == "cos" || id.text == "sqrt") {
        UnaryOp op = id.text == "sin" ? UnaryOp::Sin : id.text == "cos" ? UnaryOp::Cos : UnaryOp::Sqrt;
        expect_symbol(lex, "(");
        Expr arg = parse_expression(lex);
        expect_symbol(lex, ")");
        return make_unary(op, std::move(arg));
      }
      if (kReservedWords.count(id.text)) lex.fail("'" + id.text + "' is a reserved word", id.column);
      if (auto u = sys_.unknown_index(id.text)) return make_variable(VarKind::Unknown, *u);
      if (auto p = sys_.parameter_index(id.text)) return make_variable(VarKind::Parameter, *p);
      lex.fail("undeclared identifier '" + id.text + "'", id.column);
    }
    lex.fail_here("expected an expression");
  }

  EquationSystem sys_;
  std::vector<bool> explicit_domain_;
  bool seen_expression_ = false;
  bool seen_structural_ = false;
};

}  // namespace detail

inline EquationSystem parse_system(std::string_view text) {
  return detail::SystemParser().parse(text);
}

inline EquationSystem parse_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

/// Prints a system in the constraint file format; re-parsing the result
/// reproduces the system (expressions compare structurally equal).
inline std::string print_system(const EquationSystem& s) {
  std::string out;
  if (!s.unknowns.empty()) {
    out += "var";
    for (const auto& name : s.unknowns) {
      out += ' ';
      out += name;
    }
    out += '\n';
  }
  if (!s.parameters.empty()) {
    out += "param";
    for (size_t i = 0; i < s.parameters.size(); ++i) {
      out += ' ';
      out += s.parameters[i];
      out += '=';
      out += detail::format_double(s.parameter_values[i]);
    }
    out += '\n';
  }
  for (const Equation& eq : s.equations) {
    out += "eq ";
    out += eq.name;
    out += ": ";
    if (eq.expr) {
      out += to_string(s, eq.expr);
      out += " = 0";
    } else {
      out += "uses";
      for (int u : eq.structural_uses) {
        out += ' ';
        out += s.unknowns[u];
      }
    }
    out += '\n';
  }
  for (size_t u = 0; u < s.domains.size(); ++u) {
    if (s.domains[u] == kDefaultDomain) continue;
    out += "domain ";
    out += s.unknowns[u];
    out += " in [";
    out += detail::format_double(s.domains[u].lo);
    out += ", ";
    out += detail::format_double(s.domains[u].hi);
    out += "]\n";
  }
  return out;
}

}  // namespace eqsolve
