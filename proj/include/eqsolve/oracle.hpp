#pragma once

// Brute-force oracles used to validate the structural algorithms. All of
// them enumerate exhaustively and refuse oversized instances; none of them
// share code with the fast implementations they check.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "eqsolve/decomposition.hpp"
#include "eqsolve/errors.hpp"
#include "eqsolve/graph.hpp"

namespace eqsolve {

namespace detail {

/// Visits every matching of g exactly once (including the empty one).
/// The visitor receives pair_of_equation / pair_of_unknown and the size.
template <typename Visitor>
void enumerate_matchings(const BipartiteGraph& g, Visitor&& visit) {
  std::vector<int> pair_eq(g.equation_count, -1), pair_unk(g.unknown_count, -1);
  int size = 0;
  auto recurse = [&](auto&& self, int y) -> void {
    if (y == g.equation_count) {
      visit(pair_eq, pair_unk, size);
      return;
    }
    self(self, y + 1);  // leave y unmatched
    for (int x : g.eq_adj[y]) {
      if (pair_unk[x] >= 0) continue;
      pair_eq[y] = x;
      pair_unk[x] = y;
      ++size;
      self(self, y + 1);
      --size;
      pair_eq[y] = -1;
      pair_unk[x] = -1;
    }
  };
  recurse(recurse, 0);
}

}  // namespace detail

/// Maximum matching cardinality by exhaustive enumeration.
inline int bruteforce_maximum_matching_size(const BipartiteGraph& g) {
  if (g.equation_count + g.unknown_count > 16)
    throw Error(ErrorKind::SizeLimit, "graph too large for brute-force matching enumeration");
  int best = 0;
  detail::enumerate_matchings(g, [&](const auto&, const auto&, int size) { best = std::max(best, size); });
  return best;
}

/// DM partition from first principles: enumerate all maximum matchings,
/// D = vertices unsaturated in at least one of them, A = the neighbors of D
/// outside D, C = the rest. Test support only; refuses |Y|+|X| > 14.
inline DMDecomposition dm_bruteforce_oracle(const BipartiteGraph& g) {
  if (g.equation_count + g.unknown_count > 14)
    throw Error(ErrorKind::SizeLimit, "graph too large for the brute-force DM oracle");

  int best = -1;
  std::vector<char> eq_missed(g.equation_count, 0), unk_missed(g.unknown_count, 0);
  std::vector<int> first_eq, first_unk;
  detail::enumerate_matchings(g, [&](const std::vector<int>& pe, const std::vector<int>& pu, int size) {
    if (size > best) {
      best = size;
      std::fill(eq_missed.begin(), eq_missed.end(), 0);
      std::fill(unk_missed.begin(), unk_missed.end(), 0);
      first_eq = pe;
      first_unk = pu;
    }
    if (size == best) {
      for (int e = 0; e < g.equation_count; ++e)
        if (pe[e] < 0) eq_missed[e] = 1;
      for (int u = 0; u < g.unknown_count; ++u)
        if (pu[u] < 0) unk_missed[u] = 1;
    }
  });

  // A-side: vertices outside D adjacent to some vertex of D.
  std::vector<char> eq_adjacent(g.equation_count, 0), unk_adjacent(g.unknown_count, 0);
  for (const auto& [e, u] : g.edges) {
    if (unk_missed[u] && !eq_missed[e]) eq_adjacent[e] = 1;
    if (eq_missed[e] && !unk_missed[u]) unk_adjacent[u] = 1;
  }

  DMDecomposition dm;
  dm.matching.pair_of_equation = first_eq;
  dm.matching.pair_of_unknown = first_unk;
  dm.matching.size = best;
  for (int e = 0; e < g.equation_count; ++e) {
    if (eq_missed[e])
      dm.d1.push_back(e);
    else if (eq_adjacent[e])
      dm.a1.push_back(e);
    else
      dm.c1.push_back(e);
  }
  for (int u = 0; u < g.unknown_count; ++u) {
    if (unk_missed[u])
      dm.d2.push_back(u);
    else if (unk_adjacent[u])
      dm.a2.push_back(u);
    else
      dm.c2.push_back(u);
  }

  std::vector<char> eq_part(g.equation_count), unk_part(g.unknown_count);
  for (int e : dm.c1) eq_part[e] = 1;
  for (int e : dm.d1) eq_part[e] = 2;
  for (int e : dm.a1) eq_part[e] = 3;
  for (int u : dm.c2) unk_part[u] = 1;
  for (int u : dm.a2) unk_part[u] = 2;
  for (int u : dm.d2) unk_part[u] = 3;
  for (const auto& edge : g.edges) {
    if (eq_part[edge.first] != unk_part[edge.second]) continue;
    (eq_part[edge.first] == 1 ? dm.e1 : eq_part[edge.first] == 2 ? dm.e2 : dm.e3).push_back(edge);
  }
  return dm;
}

/// Structural irreducibility by subset enumeration: true iff every proper
/// nonempty subset Z of the equations satisfies |neighborhood(Z)| > |Z|.
/// Caller guarantees g has a perfect matching. Refuses |Y| > 12.
inline bool is_irreducible_bruteforce(const BipartiteGraph& g) {
  const int ny = g.equation_count;
  if (ny > 12)
    throw Error(ErrorKind::SizeLimit, "graph too large for brute-force irreducibility check");
  std::vector<unsigned> neighbor_mask(ny, 0);
  for (int e = 0; e < ny; ++e)
    for (int u : g.eq_adj[e]) neighbor_mask[e] |= 1u << u;
  for (unsigned z = 1; z + 1 < (1u << ny); ++z) {
    unsigned gamma = 0;
    int count = 0;
    for (int e = 0; e < ny; ++e)
      if (z & (1u << e)) {
        gamma |= neighbor_mask[e];
        ++count;
      }
    if (__builtin_popcount(gamma) <= count) return false;
  }
  return true;
}

/// Edges that belong to at least one perfect matching, plus the number of
/// perfect matchings, by exhaustive enumeration. Requires a square graph;
/// refuses |Y| > 10.
struct PerfectMatchingSummary {
  long long count = 0;
  std::vector<std::pair<int, int>> covered_edges;  // sorted
};

inline PerfectMatchingSummary enumerate_perfect_matchings(const BipartiteGraph& g) {
  if (g.equation_count != g.unknown_count)
    throw Error(ErrorKind::Contract, "perfect matching enumeration needs a square graph");
  if (g.equation_count > 10)
    throw Error(ErrorKind::SizeLimit, "graph too large for perfect-matching enumeration");
  PerfectMatchingSummary summary;
  std::vector<char> used(g.unknown_count, 0);
  std::vector<int> choice(g.equation_count, -1);
  std::vector<std::vector<char>> covered(g.equation_count, std::vector<char>(g.unknown_count, 0));
  auto recurse = [&](auto&& self, int y) -> void {
    if (y == g.equation_count) {
      ++summary.count;
      for (int e = 0; e < g.equation_count; ++e) covered[e][choice[e]] = 1;
      return;
    }
    for (int x : g.eq_adj[y]) {
      if (used[x]) continue;
      used[x] = 1;
      choice[y] = x;
      self(self, y + 1);
      used[x] = 0;
    }
  };
  recurse(recurse, 0);
  for (int e = 0; e < g.equation_count; ++e)
    for (int u = 0; u < g.unknown_count; ++u)
      if (covered[e][u]) summary.covered_edges.emplace_back(e, u);
  return summary;
}

/// Exhaustive check of the saturation condition: every subset Y' of the
/// equations has at least |Y'| neighboring unknowns. Equivalent to the
/// existence of a matching saturating Y. Refuses |Y| > 20.
inline bool konig_hall_holds(const BipartiteGraph& g) {
  const int ny = g.equation_count;
  if (ny > 20) throw Error(ErrorKind::SizeLimit, "graph too large for the subset condition check");
  std::vector<unsigned long long> neighbor_mask(ny, 0);
  for (int e = 0; e < ny; ++e)
    for (int u : g.eq_adj[e]) neighbor_mask[e] |= 1ull << u;
  for (unsigned z = 1; z < (1u << ny); ++z) {
    unsigned long long gamma = 0;
    int count = 0;
    for (int e = 0; e < ny; ++e)
      if (z & (1u << e)) {
        gamma |= neighbor_mask[e];
        ++count;
      }
    if (__builtin_popcountll(gamma) < count) return false;
  }
  return true;
}

}  // namespace eqsolve
