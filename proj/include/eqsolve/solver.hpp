#pragma once

// Interval-Newton solving of square equation blocks: a branch-and-prune
// bisection driven by the Krawczyk operator
//
//   K(y, X) = y - Y f(y) + (I - Y F'(X)) (X - y)
//
// with y the box midpoint and Y the inverse of the midpoint Jacobian, plus
// plan execution that solves blocks in dependency order, substitutes
// upstream solutions as point bindings, and verifies discarded equations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eqsolve/decomposition.hpp"
#include "eqsolve/errors.hpp"
#include "eqsolve/expression.hpp"
#include "eqsolve/interval.hpp"
#include "eqsolve/system.hpp"

namespace eqsolve {

struct SolverConfig {
  double tol_width = 1e-8;     // emit an enclosure once its max width is below this
  double tol_residual = 1e-6;  // per-equation residual bound at emitted points
  std::int64_t max_boxes = 1'000'000;
};

struct Box {
  std::vector<Interval> coords;

  double max_width() const {
    double w = 0.0;
    for (const Interval& c : coords) w = std::max(w, c.width());
    return w;
  }
  std::vector<double> midpoint() const {
    std::vector<double> m(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) m[i] = coords[i].mid();
    return m;
  }
};

struct BlockSolution {
  std::vector<double> point;  // per block unknown, midpoint of the enclosure
  Box enclosure;
  bool certified_unique = false;  // Krawczyk image mapped strictly inside a box
};

enum class KrawczykOutcome { Empty, Unique, Shrunk, NoProgress };

struct KrawczykResult {
  KrawczykOutcome outcome = KrawczykOutcome::NoProgress;
  Box box;  // contracted box for Unique/Shrunk
};

namespace detail {

/// Gauss-Jordan inverse with partial pivoting; a is n*n row-major and is
/// replaced by its inverse. Returns false when singular to working precision.
inline bool invert_dense(std::vector<double>& a, int n) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  const double tiny = scale * n * 1e-14;

  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) <= tiny) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a[pivot * n + c], a[col * n + c]);
        std::swap(inv[pivot * n + c], inv[col * n + c]);
      }
    }
    double d = a[col * n + col];
    for (int c = 0; c < n; ++c) {
      a[col * n + c] /= d;
      inv[col * n + c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[r * n + c] -= f * a[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  a = std::move(inv);
  return true;
}

inline std::string describe_box(const std::vector<std::string>& names, const Box& box) {
  std::ostringstream out;
  for (size_t i = 0; i < box.coords.size(); ++i) {
    if (i) out << ", ";
    out << names[i] << " in [" << box.coords[i].lo << ", " << box.coords[i].hi << "]";
  }
  return out.str();
}

}  // namespace detail

/// One square block prepared for solving: its equations, the symbolic
/// Jacobian with respect to the block unknowns, point bindings for every
/// non-block unknown the equations mention, and parameter values.
class BlockProblem {
 public:
  BlockProblem(const EquationSystem& system, std::vector<int> equation_ids,
               std::vector<int> unknown_ids, std::vector<double> bound_unknowns,
               std::vector<double> parameter_values)
      : system_(&system),
        equation_ids_(std::move(equation_ids)),
        unknown_ids_(std::move(unknown_ids)),
        bound_unknowns_(std::move(bound_unknowns)),
        parameter_values_(std::move(parameter_values)) {
    if (equation_ids_.size() != unknown_ids_.size())
      throw Error(ErrorKind::Contract, "block is not square");
    if (bound_unknowns_.size() != system.unknowns.size() ||
        parameter_values_.size() != system.parameters.size())
      throw Error(ErrorKind::Contract, "binding vectors do not match the system");

    const int n = dimension();
    std::vector<int> local_of(system.unknowns.size(), -1);
    for (int j = 0; j < n; ++j) local_of[unknown_ids_[j]] = j;
    for (int e : equation_ids_) {
      const Equation& eq = system.equations.at(e);
      if (!eq.expr) throw Error(ErrorKind::Contract, "structural-only equation cannot be solved");
      equations_.push_back(eq.expr);
      std::vector<char> present(system.unknowns.size(), 0);
      collect_variables(eq.expr, VarKind::Unknown, present);
      for (int u = 0; u < static_cast<int>(present.size()); ++u)
        if (present[u] && local_of[u] < 0 && std::isnan(bound_unknowns_[u]))
          throw Error(ErrorKind::Internal,
                      "block scheduled before its dependency '" + system.unknowns[u] + "' was bound");
    }
    jacobian_.resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        jacobian_[i].push_back(differentiate(equations_[i], VarRef{VarKind::Unknown, unknown_ids_[j]}));

    parameter_intervals_.resize(parameter_values_.size());
    for (size_t p = 0; p < parameter_values_.size(); ++p)
      parameter_intervals_[p] = Interval::point(parameter_values_[p]);
  }

  /// Reusable evaluation buffers; one per solving thread. The problem itself
  /// stays immutable.
  struct Workspace {
    std::vector<double> point;
    std::vector<Interval> box;
  };

  Workspace make_workspace() const {
    Workspace w;
    w.point = bound_unknowns_;
    w.box.assign(bound_unknowns_.size(), Interval::empty());
    for (size_t u = 0; u < bound_unknowns_.size(); ++u)
      if (!std::isnan(bound_unknowns_[u])) w.box[u] = Interval::point(bound_unknowns_[u]);
    return w;
  }

  int dimension() const { return static_cast<int>(unknown_ids_.size()); }
  const std::vector<int>& equation_ids() const { return equation_ids_; }
  const std::vector<int>& unknown_ids() const { return unknown_ids_; }
  const EquationSystem& system() const { return *system_; }

  std::vector<std::string> unknown_names() const {
    std::vector<std::string> names;
    for (int u : unknown_ids_) names.push_back(system_->unknowns[u]);
    return names;
  }

  /// Initial search box from the per-unknown domain declarations.
  Box initial_box() const {
    Box box;
    for (int u : unknown_ids_) box.coords.push_back(system_->domains[u]);
    return box;
  }

  std::optional<double> eval_point(const Expr& e, const std::vector<double>& block_values,
                                   Workspace& w) const {
    for (int j = 0; j < dimension(); ++j) w.point[unknown_ids_[j]] = block_values[j];
    try {
      double v = evaluate_raw(e, w.point, parameter_values_);
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }

  std::optional<double> residual(int i, const std::vector<double>& block_values, Workspace& w) const {
    return eval_point(equations_[i], block_values, w);
  }

  std::optional<double> jacobian_entry(int i, int j, const std::vector<double>& block_values,
                                       Workspace& w) const {
    return eval_point(jacobian_[i][j], block_values, w);
  }

  /// nullopt = split required; empty interval = undefined over the box.
  std::optional<Interval> eval_interval(const Expr& e, const Box& box, Workspace& w) const {
    for (int j = 0; j < dimension(); ++j) w.box[unknown_ids_[j]] = box.coords[j];
    return try_interval_evaluate_raw(e, w.box, parameter_intervals_);
  }

  std::optional<Interval> residual_range(int i, const Box& box, Workspace& w) const {
    return eval_interval(equations_[i], box, w);
  }

  std::optional<Interval> jacobian_range(int i, int j, const Box& box, Workspace& w) const {
    return eval_interval(jacobian_[i][j], box, w);
  }

 private:
  const EquationSystem* system_;
  std::vector<int> equation_ids_;
  std::vector<int> unknown_ids_;
  std::vector<double> bound_unknowns_;
  std::vector<double> parameter_values_;
  std::vector<Expr> equations_;
  std::vector<std::vector<Expr>> jacobian_;
  std::vector<Interval> parameter_intervals_;
};

/// One Krawczyk contraction step on a box. Empty: K and X are disjoint, no
/// root in X. Unique: K lies strictly inside X, exactly one root, enclosed
/// by the returned box. Shrunk: K ∩ X is strictly smaller than X.
/// NoProgress: no conclusion (including a singular midpoint Jacobian or any
/// local evaluation failure) — the caller should bisect.
inline KrawczykResult krawczyk_step(const BlockProblem& problem, const Box& box,
                                    BlockProblem::Workspace& w) {
  const int n = problem.dimension();
  if (static_cast<int>(box.coords.size()) != n)
    throw Error(ErrorKind::Contract, "box dimension does not match the block");

  const std::vector<double> y = box.midpoint();
  std::vector<double> fy(n);
  for (int i = 0; i < n; ++i) {
    auto v = problem.residual(i, y, w);
    if (!v) return {KrawczykOutcome::NoProgress, {}};
    fy[i] = *v;
  }
  std::vector<double> jac(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = problem.jacobian_entry(i, j, y, w);
      if (!v) return {KrawczykOutcome::NoProgress, {}};
      jac[i * n + j] = *v;
    }
  if (!detail::invert_dense(jac, n)) return {KrawczykOutcome::NoProgress, {}};
  const std::vector<double>& inv = jac;

  std::vector<Interval> jac_range(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto r = problem.jacobian_range(i, j, box, w);
      if (!r || r->is_empty() || !r->is_finite()) return {KrawczykOutcome::NoProgress, {}};
      jac_range[i * n + j] = *r;
    }

  // K_i = y_i - (Y f(y))_i + sum_j (I - Y F'(X))_ij (X_j - y_j)
  std::vector<Interval> dx(n);
  for (int j = 0; j < n; ++j) dx[j] = sub(box.coords[j], Interval::point(y[j]));
  Box k;
  k.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    for (int j = 0; j < n; ++j) r += inv[i * n + j] * fy[j];
    Interval acc = Interval::point(y[i] - r);
    for (int j = 0; j < n; ++j) {
      Interval c{i == j ? 1.0 : 0.0, i == j ? 1.0 : 0.0};
      for (int l = 0; l < n; ++l)
        c = sub(c, mul(Interval::point(inv[i * n + l]), jac_range[l * n + j]));
      acc = add(acc, mul(c, dx[j]));
    }
    if (!(acc.lo == acc.lo) || !(acc.hi == acc.hi)) return {KrawczykOutcome::NoProgress, {}};
    k.coords[i] = acc;
  }

  bool disjoint = false, interior = true, shrunk = false;
  Box clipped;
  clipped.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    const Interval& x = box.coords[i];
    const Interval& ki = k.coords[i];
    if (ki.hi < x.lo || ki.lo > x.hi) disjoint = true;
    if (!(ki.lo > x.lo && ki.hi < x.hi)) interior = false;
    clipped.coords[i] = intersect(ki, x);
    if (!disjoint && (clipped.coords[i].lo > x.lo || clipped.coords[i].hi < x.hi)) shrunk = true;
  }
  if (disjoint) return {KrawczykOutcome::Empty, {}};
  if (interior) return {KrawczykOutcome::Unique, std::move(k)};
  if (shrunk) return {KrawczykOutcome::Shrunk, std::move(clipped)};
  return {KrawczykOutcome::NoProgress, {}};
}

inline KrawczykResult krawczyk_step(const BlockProblem& problem, const Box& box) {
  BlockProblem::Workspace w = problem.make_workspace();
  return krawczyk_step(problem, box, w);
}

/// Branch-and-prune over the initial box: prune boxes whose residual range
/// excludes zero, contract with krawczyk_step, bisect the widest coordinate
/// on NoProgress, emit enclosures below tol_width, merge duplicates, and
/// order results by lexicographic midpoint.
inline std::vector<BlockSolution> solve_block(const BlockProblem& problem, const Box& initial,
                                              const SolverConfig& config) {
  const int n = problem.dimension();
  if (static_cast<int>(initial.coords.size()) != n)
    throw Error(ErrorKind::Contract, "box dimension does not match the block");
  for (const Interval& c : initial.coords)
    if (c.is_empty() || !c.is_finite())
      throw Error(ErrorKind::Contract, "initial box must be nonempty and finite");

  struct WorkItem {
    Box box;
    bool certified;
  };
  std::vector<WorkItem> stack{{initial, false}};
  std::vector<BlockSolution> candidates;
  std::int64_t processed = 0;
  BlockProblem::Workspace w = problem.make_workspace();

  auto bisect_into = [&](const Box& box, bool certified) {
    int widest = 0;
    for (int i = 1; i < n; ++i)
      if (box.coords[i].width() > box.coords[widest].width()) widest = i;
    double m = box.coords[widest].mid();
    Box low = box, high = box;
    low.coords[widest].hi = m;
    high.coords[widest].lo = m;
    stack.push_back({std::move(high), certified});
    stack.push_back({std::move(low), certified});
  };

  while (!stack.empty()) {
    WorkItem item = std::move(stack.back());
    stack.pop_back();
    if (++processed > config.max_boxes)
      throw Error(ErrorKind::Resource,
                  "box budget exceeded; unresolved region: " +
                      detail::describe_box(problem.unknown_names(), item.box));

    // Exclusion test: discard the box if some residual range misses zero or
    // some equation is undefined over the whole box.
    bool discard = false;
    for (int i = 0; i < n && !discard; ++i) {
      auto range = problem.residual_range(i, item.box, w);
      if (!range) continue;  // split required; no conclusion from this equation
      if (range->is_empty() || range->lo > 0.0 || range->hi < 0.0) discard = true;
    }
    if (discard) continue;

    if (item.box.max_width() < config.tol_width) {
      std::vector<double> mid = item.box.midpoint();
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        auto r = problem.residual(i, mid, w);
        ok = r && std::abs(*r) <= config.tol_residual;
      }
      if (ok) candidates.push_back({std::move(mid), std::move(item.box), item.certified});
      continue;
    }

    KrawczykResult step = krawczyk_step(problem, item.box, w);
    switch (step.outcome) {
      case KrawczykOutcome::Empty: break;
      case KrawczykOutcome::Unique:
        stack.push_back({std::move(step.box), true});
        break;
      case KrawczykOutcome::Shrunk:
        // Keep contracting while the step pays for itself; otherwise keep
        // the tightened box but split it.
        if (step.box.max_width() <= 0.75 * item.box.max_width())
          stack.push_back({std::move(step.box), item.certified});
        else
          bisect_into(step.box, item.certified);
        break;
      case KrawczykOutcome::NoProgress: bisect_into(item.box, item.certified); break;
    }
  }

  // Merge duplicate enclosures of the same root: cluster candidates whose
  // midpoints agree within 10*tol_width in every coordinate and keep the
  // best representative (certified first, then smallest width).
  const double merge_radius = 10.0 * config.tol_width;
  std::vector<int> cluster(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) cluster[i] = static_cast<int>(i);
  auto find = [&](int i) {
    while (cluster[i] != i) i = cluster[i] = cluster[cluster[i]];
    return i;
  };
  for (size_t i = 0; i < candidates.size(); ++i)
    for (size_t j = i + 1; j < candidates.size(); ++j) {
      bool close = true;
      for (int c = 0; c < n && close; ++c)
        close = std::abs(candidates[i].point[c] - candidates[j].point[c]) < merge_radius;
      if (close) cluster[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  std::map<int, BlockSolution> merged;
  for (size_t i = 0; i < candidates.size(); ++i) {
    int root = find(static_cast<int>(i));
    auto it = merged.find(root);
    if (it == merged.end()) {
      merged.emplace(root, std::move(candidates[i]));
      continue;
    }
    BlockSolution& kept = it->second;
    const BlockSolution& other = candidates[i];
    bool better = (other.certified_unique && !kept.certified_unique) ||
                  (other.certified_unique == kept.certified_unique &&
                   other.enclosure.max_width() < kept.enclosure.max_width());
    bool certified = kept.certified_unique || other.certified_unique;
    if (better) kept = other;
    kept.certified_unique = certified;
  }

  std::vector<BlockSolution> solutions;
  for (auto& [root, sol] : merged) solutions.push_back(std::move(sol));
  std::sort(solutions.begin(), solutions.end(), [](const BlockSolution& a, const BlockSolution& b) {
    return a.point < b.point;
  });
  return solutions;
}

struct SystemSolution {
  std::vector<std::pair<std::string, double>> assignment;       // every unknown, declaration order
  std::vector<std::pair<std::string, double>> residual_report;  // every equation, declaration order
  bool discarded_ok = true;
  std::vector<std::string> failed_discarded;  // discarded equations out of tolerance
};

namespace detail {

inline std::vector<double> resolve_parameters(const EquationSystem& system,
                                              const ResolutionPlan& plan,
                                              const std::map<std::string, double>& overrides,
                                              std::vector<double>& unknown_values) {
  std::vector<double> params = system.parameter_values;
  std::vector<char> is_free(system.unknowns.size(), 0);
  for (int u : plan.free_parameters) is_free[u] = 1;

  std::vector<std::string> unbound;
  for (int u : plan.free_parameters)
    if (!overrides.count(system.unknowns[u])) unbound.push_back(system.unknowns[u]);
  if (!unbound.empty()) {
    std::string list;
    for (const auto& name : unbound) list += (list.empty() ? "" : ", ") + name;
    throw Error(ErrorKind::Usage, "unbound free parameter(s): " + list);
  }
  for (const auto& [name, value] : overrides) {
    if (auto u = system.unknown_index(name)) {
      if (!is_free[*u])
        throw Error(ErrorKind::Usage, "'" + name + "' is determined by the system; only free parameters and declared parameters can be set");
      unknown_values[*u] = value;
    } else if (auto p = system.parameter_index(name)) {
      params[*p] = value;
    } else {
      throw Error(ErrorKind::Usage, "unknown parameter '" + name + "'");
    }
  }
  return params;
}

inline SystemSolution finish_solution(const EquationSystem& system,
                                      const std::vector<double>& unknown_values,
                                      const std::vector<double>& params,
                                      const std::vector<int>& discarded, double tol_residual) {
  SystemSolution sol;
  for (size_t u = 0; u < system.unknowns.size(); ++u)
    sol.assignment.emplace_back(system.unknowns[u], unknown_values[u]);
  std::vector<char> is_discarded(system.equations.size(), 0);
  for (int e : discarded) is_discarded[e] = 1;
  for (size_t e = 0; e < system.equations.size(); ++e) {
    double r;
    try {
      r = evaluate_raw(system.equations[e].expr, unknown_values, params);
    } catch (const EvalError&) {
      r = std::numeric_limits<double>::quiet_NaN();
    }
    sol.residual_report.emplace_back(system.equations[e].name, r);
    if (is_discarded[e] && !(std::abs(r) <= tol_residual)) {
      sol.discarded_ok = false;
      sol.failed_discarded.push_back(system.equations[e].name);
    }
  }
  return sol;
}

}  // namespace detail

/// Solves the plan's blocks in order, branching over each block's solution
/// list (depth-first product), then evaluates every discarded equation at
/// each complete assignment. Free parameters must be bound via overrides;
/// overrides may also re-bind declared parameters.
inline std::vector<SystemSolution> execute_plan(const ResolutionPlan& plan,
                                                const EquationSystem& system,
                                                const std::map<std::string, double>& overrides,
                                                const SolverConfig& config = {}) {
  if (system.structural_only)
    throw Error(ErrorKind::Usage, "structural-only systems cannot be solved");
  std::vector<double> unknown_values(system.unknowns.size(),
                                     std::numeric_limits<double>::quiet_NaN());
  std::vector<double> params = detail::resolve_parameters(system, plan, overrides, unknown_values);

  std::vector<SystemSolution> out;
  auto recurse = [&](auto&& self, size_t block_index) -> void {
    if (block_index == plan.blocks.size()) {
      out.push_back(detail::finish_solution(system, unknown_values, params,
                                            plan.discarded_equations, config.tol_residual));
      return;
    }
    const IrreducibleBlock& block = plan.blocks[block_index];
    BlockProblem problem(system, block.equations, block.unknowns, unknown_values, params);
    std::vector<BlockSolution> sols = solve_block(problem, problem.initial_box(), config);
    for (const BlockSolution& sol : sols) {
      for (size_t j = 0; j < block.unknowns.size(); ++j)
        unknown_values[block.unknowns[j]] = sol.point[j];
      self(self, block_index + 1);
    }
    for (int u : block.unknowns) unknown_values[u] = std::numeric_limits<double>::quiet_NaN();
  };
  recurse(recurse, 0);
  return out;
}

/// Baseline: the whole system as a single block. Requires a square,
/// expressional system.
inline std::vector<SystemSolution> solve_monolithic(const EquationSystem& system,
                                                    const SolverConfig& config = {}) {
  if (system.structural_only)
    throw Error(ErrorKind::Usage, "structural-only systems cannot be solved");
  if (system.equations.size() != system.unknowns.size())
    throw Error(ErrorKind::Usage, "monolithic solving requires a square system");

  std::vector<int> eqs(system.equations.size()), unks(system.unknowns.size());
  for (size_t i = 0; i < eqs.size(); ++i) eqs[i] = static_cast<int>(i);
  for (size_t i = 0; i < unks.size(); ++i) unks[i] = static_cast<int>(i);
  std::vector<double> unbound(system.unknowns.size(), std::numeric_limits<double>::quiet_NaN());
  BlockProblem problem(system, eqs, unks, unbound, system.parameter_values);

  std::vector<SystemSolution> out;
  for (const BlockSolution& sol : solve_block(problem, problem.initial_box(), config)) {
    std::vector<double> values = sol.point;
    out.push_back(detail::finish_solution(system, values, system.parameter_values, {},
                                          config.tol_residual));
  }
  return out;
}

}  // namespace eqsolve
