#pragma once

// Deterministic random instance generators shared by the unit and
// acceptance suites.

#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "eqsolve/expression.hpp"
#include "eqsolve/graph.hpp"

namespace eqsolve::testing {

inline BipartiteGraph make_graph(int ny, int nx, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::pair<int, std::vector<int>>> occ;
  for (const auto& [e, u] : edges) occ.push_back({e, {u}});
  return build_graph(ny, nx, occ);
}

inline BipartiteGraph random_bipartite(std::mt19937& rng, int max_ny, int max_nx) {
  std::uniform_int_distribution<int> ny_dist(0, max_ny), nx_dist(0, max_nx);
  int ny = ny_dist(rng), nx = nx_dist(rng);
  std::uniform_real_distribution<double> p_dist(0.1, 0.9);
  double p = p_dist(rng);
  std::bernoulli_distribution edge(p);
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < ny; ++e)
    for (int u = 0; u < nx; ++u)
      if (edge(rng)) edges.emplace_back(e, u);
  return make_graph(ny, nx, edges);
}

/// Square graph with a planted perfect matching plus random extra edges.
inline BipartiteGraph random_well_constrained(std::mt19937& rng, int max_n) {
  std::uniform_int_distribution<int> n_dist(1, max_n);
  int n = n_dist(rng);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < n; ++e) edges.emplace_back(e, perm[e]);
  std::uniform_real_distribution<double> p_dist(0.0, 0.5);
  std::bernoulli_distribution extra(p_dist(rng));
  for (int e = 0; e < n; ++e)
    for (int u = 0; u < n; ++u)
      if (u != perm[e] && extra(rng)) edges.emplace_back(e, u);
  return make_graph(n, n, edges);
}

/// Relabels equations by sigma and unknowns by tau (old id -> new id).
inline BipartiteGraph permute_graph(const BipartiteGraph& g, const std::vector<int>& sigma,
                                    const std::vector<int>& tau) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& [e, u] : g.edges) edges.emplace_back(sigma[e], tau[u]);
  return make_graph(g.equation_count, g.unknown_count, edges);
}

inline std::vector<int> random_permutation(std::mt19937& rng, int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Random expression over the first n_unknowns unknowns and n_params
/// parameters. Guarded mode wraps division denominators and sqrt arguments
/// as e^2 + c with c > 0, so the expression is defined everywhere.
inline Expr random_expression(std::mt19937& rng, int depth, int n_unknowns, int n_params,
                              bool guarded) {
  std::uniform_real_distribution<double> const_dist(0.2, 2.5);
  std::uniform_int_distribution<int> leaf_dist(0, n_params > 0 ? 2 : 1);
  if (depth == 0) {
    int kind = n_unknowns > 0 ? leaf_dist(rng) : 0;
    if (kind == 0) return make_constant(const_dist(rng));
    if (kind == 1 || n_params == 0)
      return make_variable(VarKind::Unknown,
                           std::uniform_int_distribution<int>(0, n_unknowns - 1)(rng));
    return make_variable(VarKind::Parameter, std::uniform_int_distribution<int>(0, n_params - 1)(rng));
  }
  auto sub = [&](int d) { return random_expression(rng, d, n_unknowns, n_params, guarded); };
  auto positive = [&](int d) {
    // e^2 + c with c > 0: strictly positive everywhere.
    return make_binary(BinaryOp::Add, make_power(sub(d), 2),
                       make_constant(const_dist(rng) + 0.3));
  };
  switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
    case 0: return make_binary(BinaryOp::Add, sub(depth - 1), sub(depth - 1));
    case 1: return make_binary(BinaryOp::Subtract, sub(depth - 1), sub(depth - 1));
    case 2:
    case 3: return make_binary(BinaryOp::Multiply, sub(depth - 1), sub(depth - 1));
    case 4:
      return make_binary(BinaryOp::Divide, sub(depth - 1),
                         guarded ? positive(depth - 2 < 0 ? 0 : depth - 2) : sub(depth - 1));
    case 5: return make_unary(UnaryOp::Negate, sub(depth - 1));
    case 6: return make_unary(UnaryOp::Sin, sub(depth - 1));
    case 7: return make_unary(UnaryOp::Cos, sub(depth - 1));
    case 8:
      return make_unary(UnaryOp::Sqrt,
                        guarded ? positive(depth - 2 < 0 ? 0 : depth - 2) : sub(depth - 1));
    default:
      return make_power(sub(depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
  }
}

}  // namespace eqsolve::testing
