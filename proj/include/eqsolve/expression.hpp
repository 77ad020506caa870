#pragma once

// Expression trees for algebraic equations: constants, variables (unknowns
// or fixed parameters), negate/sin/cos/sqrt, the four arithmetic operators,
// and integer powers. Trees are immutable and shared.

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqsolve/errors.hpp"
#include "eqsolve/interval.hpp"

namespace eqsolve {

enum class VarKind { Unknown, Parameter };

struct VarRef {
  VarKind kind = VarKind::Unknown;
  int index = 0;
  bool operator==(const VarRef&) const = default;
};

enum class UnaryOp { Negate, Sin, Cos, Sqrt };
enum class BinaryOp { Add, Subtract, Multiply, Divide };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Constant, Variable, Unary, Binary, Power };
  Kind kind;
  double value = 0.0;    // Constant
  VarRef var{};          // Variable
  UnaryOp unary_op{};    // Unary
  BinaryOp binary_op{};  // Binary
  Expr a;                // unary operand, binary lhs, power base
  Expr b;                // binary rhs
  int exponent = 0;      // Power
};

inline Expr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Constant;
  n->value = v;
  return n;
}

inline Expr make_variable(VarKind kind, int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Variable;
  n->var = {kind, index};
  return n;
}

inline Expr make_unary(UnaryOp op, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Unary;
  n->unary_op = op;
  n->a = std::move(operand);
  return n;
}

inline Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Binary;
  n->binary_op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return n;
}

inline Expr make_power(Expr base, int exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Power;
  n->a = std::move(base);
  n->exponent = exponent;
  return n;
}

inline bool is_constant(const Expr& e, double v) {
  return e->kind == ExprNode::Kind::Constant && e->value == v;
}

inline bool expr_equal(const Expr& x, const Expr& y) {
  if (x == y) return true;
  if (!x || !y || x->kind != y->kind) return false;
  switch (x->kind) {
    case ExprNode::Kind::Constant: return x->value == y->value;
    case ExprNode::Kind::Variable: return x->var == y->var;
    case ExprNode::Kind::Unary: return x->unary_op == y->unary_op && expr_equal(x->a, y->a);
    case ExprNode::Kind::Binary:
      return x->binary_op == y->binary_op && expr_equal(x->a, y->a) && expr_equal(x->b, y->b);
    case ExprNode::Kind::Power: return x->exponent == y->exponent && expr_equal(x->a, y->a);
  }
  return false;
}

// Simplifying constructors used when deriving expressions. Only identities
// that hold for all real inputs are applied (no 0/x -> 0, which would erase
// a division-by-zero).
namespace simp {

inline Expr add(Expr a, Expr b) {
  if (is_constant(a, 0.0)) return b;
  if (is_constant(b, 0.0)) return a;
  if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
    return make_constant(a->value + b->value);
  return make_binary(BinaryOp::Add, std::move(a), std::move(b));
}

inline Expr neg(Expr a) {
  if (a->kind == ExprNode::Kind::Constant) return make_constant(-a->value);
  if (a->kind == ExprNode::Kind::Unary && a->unary_op == UnaryOp::Negate) return a->a;
  return make_unary(UnaryOp::Negate, std::move(a));
}

inline Expr sub(Expr a, Expr b) {
  if (is_constant(b, 0.0)) return a;
  if (is_constant(a, 0.0)) return neg(std::move(b));
  if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
    return make_constant(a->value - b->value);
  return make_binary(BinaryOp::Subtract, std::move(a), std::move(b));
}

inline Expr mul(Expr a, Expr b) {
  if (is_constant(a, 0.0) || is_constant(b, 0.0)) return make_constant(0.0);
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
    return make_constant(a->value * b->value);
  return make_binary(BinaryOp::Multiply, std::move(a), std::move(b));
}

inline Expr div(Expr a, Expr b) {
  if (is_constant(b, 1.0)) return a;
  if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant && b->value != 0.0)
    return make_constant(a->value / b->value);
  return make_binary(BinaryOp::Divide, std::move(a), std::move(b));
}

inline Expr pow(Expr base, int n) {
  if (n == 1) return base;
  if (n == 0) return make_constant(1.0);
  if (base->kind == ExprNode::Kind::Constant) return make_constant(std::pow(base->value, n));
  return make_power(std::move(base), n);
}

}  // namespace simp

/// Symbolic partial derivative with respect to one variable, with trivial
/// simplifications (0*x -> 0, x+0 -> x, x^1 -> x).
inline Expr differentiate(const Expr& e, VarRef v) {
  switch (e->kind) {
    case ExprNode::Kind::Constant: return make_constant(0.0);
    case ExprNode::Kind::Variable: return make_constant(e->var == v ? 1.0 : 0.0);
    case ExprNode::Kind::Unary: {
      Expr da = differentiate(e->a, v);
      switch (e->unary_op) {
        case UnaryOp::Negate: return simp::neg(std::move(da));
        case UnaryOp::Sin: return simp::mul(make_unary(UnaryOp::Cos, e->a), std::move(da));
        case UnaryOp::Cos: return simp::neg(simp::mul(make_unary(UnaryOp::Sin, e->a), std::move(da)));
        case UnaryOp::Sqrt:
          return simp::div(std::move(da),
                           simp::mul(make_constant(2.0), make_unary(UnaryOp::Sqrt, e->a)));
      }
      break;
    }
    case ExprNode::Kind::Binary: {
      Expr da = differentiate(e->a, v);
      Expr db = differentiate(e->b, v);
      switch (e->binary_op) {
        case BinaryOp::Add: return simp::add(std::move(da), std::move(db));
        case BinaryOp::Subtract: return simp::sub(std::move(da), std::move(db));
        case BinaryOp::Multiply:
          return simp::add(simp::mul(std::move(da), e->b), simp::mul(e->a, std::move(db)));
        case BinaryOp::Divide:
          return simp::div(simp::sub(simp::mul(std::move(da), e->b), simp::mul(e->a, std::move(db))),
                           simp::pow(e->b, 2));
      }
      break;
    }
    case ExprNode::Kind::Power: {
      Expr da = differentiate(e->a, v);
      return simp::mul(simp::mul(make_constant(static_cast<double>(e->exponent)),
                                 simp::pow(e->a, e->exponent - 1)),
                       std::move(da));
    }
  }
  throw Error(ErrorKind::Internal, "unhandled expression node");
}

/// Point-evaluation failure; carries the offending subexpression.
class EvalError : public Error {
 public:
  EvalError(const std::string& message, Expr node)
      : Error(ErrorKind::Evaluation, message), node_(std::move(node)) {}
  const Expr& node() const { return node_; }

 private:
  Expr node_;
};

/// Real evaluation over dense value vectors indexed by VarRef. A NaN binding
/// is treated as "unbound" and rejected.
inline double evaluate_raw(const Expr& e, std::span<const double> unknowns,
                           std::span<const double> parameters) {
  switch (e->kind) {
    case ExprNode::Kind::Constant: return e->value;
    case ExprNode::Kind::Variable: {
      double v = e->var.kind == VarKind::Unknown ? unknowns[e->var.index]
                                                 : parameters[e->var.index];
      if (std::isnan(v)) throw EvalError("unbound variable", e);
      return v;
    }
    case ExprNode::Kind::Unary: {
      double a = evaluate_raw(e->a, unknowns, parameters);
      switch (e->unary_op) {
        case UnaryOp::Negate: return -a;
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Sqrt:
          if (a < 0.0) throw EvalError("square root of a negative value", e);
          return std::sqrt(a);
      }
      break;
    }
    case ExprNode::Kind::Binary: {
      double a = evaluate_raw(e->a, unknowns, parameters);
      double b = evaluate_raw(e->b, unknowns, parameters);
      switch (e->binary_op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Subtract: return a - b;
        case BinaryOp::Multiply: return a * b;
        case BinaryOp::Divide:
          if (b == 0.0) throw EvalError("division by zero", e);
          return a / b;
      }
      break;
    }
    case ExprNode::Kind::Power: {
      double a = evaluate_raw(e->a, unknowns, parameters);
      if (e->exponent < 0 && a == 0.0) throw EvalError("zero raised to a negative power", e);
      return std::pow(a, e->exponent);
    }
  }
  throw Error(ErrorKind::Internal, "unhandled expression node");
}

/// Interval evaluation over dense interval vectors. Returns an enclosure of
/// the range; empty when the expression is undefined over the whole box;
/// nullopt when an interval division straddles zero (split required).
inline std::optional<Interval> try_interval_evaluate_raw(const Expr& e,
                                                         std::span<const Interval> unknowns,
                                                         std::span<const Interval> parameters) {
  switch (e->kind) {
    case ExprNode::Kind::Constant: return Interval::point(e->value);
    case ExprNode::Kind::Variable:
      return e->var.kind == VarKind::Unknown ? unknowns[e->var.index] : parameters[e->var.index];
    case ExprNode::Kind::Unary: {
      auto a = try_interval_evaluate_raw(e->a, unknowns, parameters);
      if (!a) return std::nullopt;
      switch (e->unary_op) {
        case UnaryOp::Negate: return neg(*a);
        case UnaryOp::Sin: return sin_iv(*a);
        case UnaryOp::Cos: return cos_iv(*a);
        case UnaryOp::Sqrt: return sqrt_iv(*a);
      }
      break;
    }
    case ExprNode::Kind::Binary: {
      auto a = try_interval_evaluate_raw(e->a, unknowns, parameters);
      if (!a) return std::nullopt;
      auto b = try_interval_evaluate_raw(e->b, unknowns, parameters);
      if (!b) return std::nullopt;
      switch (e->binary_op) {
        case BinaryOp::Add: return add(*a, *b);
        case BinaryOp::Subtract: return sub(*a, *b);
        case BinaryOp::Multiply: return mul(*a, *b);
        case BinaryOp::Divide: return try_div(*a, *b);
      }
      break;
    }
    case ExprNode::Kind::Power: {
      auto a = try_interval_evaluate_raw(e->a, unknowns, parameters);
      if (!a) return std::nullopt;
      return try_pow(*a, e->exponent);
    }
  }
  throw Error(ErrorKind::Internal, "unhandled expression node");
}

/// Collects the distinct variables of the given kind, in index order.
inline void collect_variables(const Expr& e, VarKind kind, std::vector<char>& present) {
  switch (e->kind) {
    case ExprNode::Kind::Constant: return;
    case ExprNode::Kind::Variable:
      if (e->var.kind == kind) present[e->var.index] = 1;
      return;
    case ExprNode::Kind::Unary:
    case ExprNode::Kind::Power: collect_variables(e->a, kind, present); return;
    case ExprNode::Kind::Binary:
      collect_variables(e->a, kind, present);
      collect_variables(e->b, kind, present);
      return;
  }
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence levels: additive 1, multiplicative 2, unary minus 3, power 4.
inline void print_expr(const Expr& e, int parent_prec, const std::function<std::string(VarRef)>& name_of,
                       std::string& out) {
  switch (e->kind) {
    case ExprNode::Kind::Constant: {
      if (e->value < 0.0) {
        // Negative literals only arise from folded ASTs; keep them reparseable.
        bool parens = parent_prec > 1;
        if (parens) out += '(';
        out += format_double(e->value);
        if (parens) out += ')';
      } else {
        out += format_double(e->value);
      }
      return;
    }
    case ExprNode::Kind::Variable: out += name_of(e->var); return;
    case ExprNode::Kind::Unary: {
      if (e->unary_op == UnaryOp::Negate) {
        bool parens = parent_prec > 3;
        if (parens) out += '(';
        out += '-';
        print_expr(e->a, 3, name_of, out);
        if (parens) out += ')';
      } else {
        out += e->unary_op == UnaryOp::Sin ? "sin" : e->unary_op == UnaryOp::Cos ? "cos" : "sqrt";
        out += '(';
        print_expr(e->a, 0, name_of, out);
        out += ')';
      }
      return;
    }
    case ExprNode::Kind::Binary: {
      int prec = (e->binary_op == BinaryOp::Add || e->binary_op == BinaryOp::Subtract) ? 1 : 2;
      bool parens = parent_prec > prec;
      if (parens) out += '(';
      print_expr(e->a, prec, name_of, out);
      out += e->binary_op == BinaryOp::Add        ? " + "
             : e->binary_op == BinaryOp::Subtract ? " - "
             : e->binary_op == BinaryOp::Multiply ? " * "
                                                  : " / ";
      print_expr(e->b, prec + 1, name_of, out);  // left-associative
      if (parens) out += ')';
      return;
    }
    case ExprNode::Kind::Power: {
      bool parens = parent_prec > 4;
      if (parens) out += '(';
      print_expr(e->a, 5, name_of, out);  // base must be atomic or parenthesized
      out += '^';
      out += std::to_string(e->exponent);
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e, const std::function<std::string(VarRef)>& name_of) {
  std::string out;
  detail::print_expr(e, 0, name_of, out);
  return out;
}

}  // namespace eqsolve
