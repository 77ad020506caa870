#pragma once

// A parsed constraint system: named unknowns, fixed parameters, equations
// (each interpreted as expression = 0), optional per-unknown search domains.
// A system is either fully expressional or fully structural-only (incidence
// lists without evaluable expressions).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqsolve/errors.hpp"
#include "eqsolve/expression.hpp"
#include "eqsolve/graph.hpp"
#include "eqsolve/interval.hpp"

namespace eqsolve {

inline constexpr Interval kDefaultDomain{-1e3, 1e3};

struct Equation {
  std::string name;
  Expr expr;                        // null in structural-only mode
  std::vector<int> structural_uses; // sorted unknown indices (structural-only mode)
};

struct EquationSystem {
  std::vector<std::string> unknowns;
  std::vector<std::string> parameters;
  std::vector<double> parameter_values;
  std::vector<Equation> equations;
  std::vector<Interval> domains;  // per unknown
  bool structural_only = false;

  std::optional<int> unknown_index(std::string_view name) const {
    for (int i = 0; i < static_cast<int>(unknowns.size()); ++i)
      if (unknowns[i] == name) return i;
    return std::nullopt;
  }
  std::optional<int> parameter_index(std::string_view name) const {
    for (int i = 0; i < static_cast<int>(parameters.size()); ++i)
      if (parameters[i] == name) return i;
    return std::nullopt;
  }
  std::string variable_name(VarRef v) const {
    return v.kind == VarKind::Unknown ? unknowns[v.index] : parameters[v.index];
  }
};

/// Per-equation sorted sets of the unknowns that occur syntactically in it
/// (parameters excluded). Feeds build_graph.
inline std::vector<std::pair<int, std::vector<int>>> incidence(const EquationSystem& s) {
  std::vector<std::pair<int, std::vector<int>>> out;
  for (int i = 0; i < static_cast<int>(s.equations.size()); ++i) {
    const Equation& eq = s.equations[i];
    std::vector<int> used;
    if (eq.expr) {
      std::vector<char> present(s.unknowns.size(), 0);
      collect_variables(eq.expr, VarKind::Unknown, present);
      for (int u = 0; u < static_cast<int>(present.size()); ++u)
        if (present[u]) used.push_back(u);
    } else {
      used = eq.structural_uses;
    }
    out.emplace_back(i, std::move(used));
  }
  return out;
}

inline BipartiteGraph to_graph(const EquationSystem& s) {
  return build_graph(static_cast<int>(s.equations.size()), static_cast<int>(s.unknowns.size()),
                     incidence(s));
}

/// Real evaluation at a named point. The point must bind every unknown
/// occurring in the expression; parameters fall back to their declared
/// values unless the point overrides them.
inline double evaluate(const EquationSystem& s, const Expr& e,
                       const std::map<std::string, double>& point) {
  std::vector<double> unknowns(s.unknowns.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> params = s.parameter_values;
  for (const auto& [name, value] : point) {
    if (auto u = s.unknown_index(name))
      unknowns[*u] = value;
    else if (auto p = s.parameter_index(name))
      params[*p] = value;
    else
      throw Error(ErrorKind::Input, "point binds undeclared variable '" + name + "'");
  }
  std::vector<char> present(s.unknowns.size(), 0);
  collect_variables(e, VarKind::Unknown, present);
  for (int u = 0; u < static_cast<int>(present.size()); ++u)
    if (present[u] && std::isnan(unknowns[u]))
      throw Error(ErrorKind::Input, "point does not bind unknown '" + s.unknowns[u] + "'");
  return evaluate_raw(e, unknowns, params);
}

/// Interval evaluation over a named box; throws when an interval division
/// straddles zero (the caller must split the box).
inline Interval interval_evaluate(const EquationSystem& s, const Expr& e,
                                  const std::map<std::string, Interval>& box) {
  std::vector<Interval> unknowns(s.unknowns.size(), Interval::empty());
  std::vector<Interval> params(s.parameters.size());
  for (size_t p = 0; p < params.size(); ++p) params[p] = Interval::point(s.parameter_values[p]);
  std::vector<char> bound(s.unknowns.size(), 0);
  for (const auto& [name, value] : box) {
    if (auto u = s.unknown_index(name)) {
      unknowns[*u] = value;
      bound[*u] = 1;
    } else if (auto p = s.parameter_index(name)) {
      params[*p] = value;
    } else {
      throw Error(ErrorKind::Input, "box binds undeclared variable '" + name + "'");
    }
  }
  std::vector<char> present(s.unknowns.size(), 0);
  collect_variables(e, VarKind::Unknown, present);
  for (int u = 0; u < static_cast<int>(present.size()); ++u)
    if (present[u] && !bound[u])
      throw Error(ErrorKind::Input, "box does not bind unknown '" + s.unknowns[u] + "'");
  auto r = try_interval_evaluate_raw(e, unknowns, params);
  if (!r)
    throw Error(ErrorKind::SplitRequired, "interval division by an interval containing zero");
  return *r;
}

/// Symbolic partial derivative with respect to a named variable.
inline Expr differentiate(const EquationSystem& s, const Expr& e, std::string_view name) {
  if (auto u = s.unknown_index(name)) return differentiate(e, VarRef{VarKind::Unknown, *u});
  if (auto p = s.parameter_index(name)) return differentiate(e, VarRef{VarKind::Parameter, *p});
  throw Error(ErrorKind::Input, "undeclared variable '" + std::string(name) + "'");
}

inline std::string to_string(const EquationSystem& s, const Expr& e) {
  return to_string(e, [&s](VarRef v) { return s.variable_name(v); });
}

inline bool systems_equal(const EquationSystem& a, const EquationSystem& b) {
  if (a.unknowns != b.unknowns || a.parameters != b.parameters ||
      a.parameter_values != b.parameter_values || a.structural_only != b.structural_only)
    return false;
  if (a.domains.size() != b.domains.size() || a.equations.size() != b.equations.size()) return false;
  for (size_t i = 0; i < a.domains.size(); ++i)
    if (!(a.domains[i] == b.domains[i])) return false;
  for (size_t i = 0; i < a.equations.size(); ++i) {
    const Equation& x = a.equations[i];
    const Equation& y = b.equations[i];
    if (x.name != y.name || x.structural_uses != y.structural_uses) return false;
    if (static_cast<bool>(x.expr) != static_cast<bool>(y.expr)) return false;
    if (x.expr && !expr_equal(x.expr, y.expr)) return false;
  }
  return true;
}

}  // namespace eqsolve
