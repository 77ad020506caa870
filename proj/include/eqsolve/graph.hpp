#pragma once

// Bipartite and directed graph primitives for structural analysis of
// equation systems: maximum matching (Hopcroft-Karp), matching-based
// orientation, strongly connected components (Tarjan), condensation,
// reachability and topological ordering.
//
// Equation vertices (side Y) and unknown vertices (side X) are dense
// 0-based indices within their side. Directed graphs derived from a
// bipartite graph use combined vertex ids: equation e -> e, unknown
// u -> equation_count + u.

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "eqsolve/errors.hpp"

namespace eqsolve {

/// Incidence graph of an equation system: one vertex per equation, one per
/// unknown, an edge when the unknown appears in the equation.
struct BipartiteGraph {
  int equation_count = 0;
  int unknown_count = 0;
  std::vector<std::pair<int, int>> edges;  // (equation, unknown), sorted, unique
  std::vector<std::vector<int>> eq_adj;    // sorted unknown ids per equation
  std::vector<std::vector<int>> unk_adj;   // sorted equation ids per unknown

  int edge_count() const { return static_cast<int>(edges.size()); }

  bool has_edge(int equation, int unknown) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(equation, unknown));
  }
};

/// Builds the graph from per-equation unknown occurrence lists. Duplicate
/// occurrences of an unknown within one equation collapse to a single edge.
inline BipartiteGraph build_graph(int equation_count, int unknown_count,
                                  const std::vector<std::pair<int, std::vector<int>>>& occurrences) {
  if (equation_count < 0 || unknown_count < 0)
    throw Error(ErrorKind::Input, "vertex counts must be non-negative");
  BipartiteGraph g;
  g.equation_count = equation_count;
  g.unknown_count = unknown_count;
  g.eq_adj.resize(equation_count);
  g.unk_adj.resize(unknown_count);
  for (const auto& [eq, unknowns] : occurrences) {
    if (eq < 0 || eq >= equation_count)
      throw Error(ErrorKind::Input, "equation id " + std::to_string(eq) + " out of range");
    for (int u : unknowns) {
      if (u < 0 || u >= unknown_count)
        throw Error(ErrorKind::Input, "equation " + std::to_string(eq) + " references unknown " +
                                          std::to_string(u) + " out of range");
      g.edges.emplace_back(eq, u);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  for (const auto& [eq, u] : g.edges) {
    g.eq_adj[eq].push_back(u);
    g.unk_adj[u].push_back(eq);
  }
  return g;
}

/// A set of vertex-disjoint edges, stored as mutually inverse partial maps.
/// -1 marks an unsaturated vertex.
struct Matching {
  std::vector<int> pair_of_equation;
  std::vector<int> pair_of_unknown;
  int size = 0;

  bool saturates_equation(int e) const { return pair_of_equation[e] >= 0; }
  bool saturates_unknown(int u) const { return pair_of_unknown[u] >= 0; }

  /// Matched edges as sorted (equation, unknown) pairs.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int e = 0; e < static_cast<int>(pair_of_equation.size()); ++e)
      if (pair_of_equation[e] >= 0) out.emplace_back(e, pair_of_equation[e]);
    return out;
  }
};

/// Maximum-cardinality matching via Hopcroft-Karp. Augmenting-path search
/// visits neighbors in sorted id order, so the result is a deterministic
/// function of the graph.
inline Matching maximum_matching(const BipartiteGraph& g) {
  const int ny = g.equation_count;
  Matching m;
  m.pair_of_equation.assign(ny, -1);
  m.pair_of_unknown.assign(g.unknown_count, -1);

  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(ny, kInf);

  auto bfs = [&]() {
    std::queue<int> q;
    for (int y = 0; y < ny; ++y) {
      if (m.pair_of_equation[y] < 0) {
        dist[y] = 0;
        q.push(y);
      } else {
        dist[y] = kInf;
      }
    }
    bool reached_free = false;
    while (!q.empty()) {
      int y = q.front();
      q.pop();
      for (int x : g.eq_adj[y]) {
        int y2 = m.pair_of_unknown[x];
        if (y2 < 0) {
          reached_free = true;
        } else if (dist[y2] == kInf) {
          dist[y2] = dist[y] + 1;
          q.push(y2);
        }
      }
    }
    return reached_free;
  };

  auto dfs = [&](auto&& self, int y) -> bool {
    for (int x : g.eq_adj[y]) {
      int y2 = m.pair_of_unknown[x];
      if (y2 < 0 || (dist[y2] == dist[y] + 1 && self(self, y2))) {
        m.pair_of_equation[y] = x;
        m.pair_of_unknown[x] = y;
        return true;
      }
    }
    dist[y] = kInf;
    return false;
  };

  while (bfs()) {
    for (int y = 0; y < ny; ++y)
      if (m.pair_of_equation[y] < 0 && dist[y] == 0 && dfs(dfs, y)) ++m.size;
  }
  return m;
}

enum class Direction { Forward, Backward };

/// Directed graph obtained from a bipartite graph and a matching: each
/// matched edge becomes a two-way pair of arcs, every other edge is oriented
/// from the equation side to the unknown side. Vertices use combined ids.
struct OrientedGraph {
  int equation_count = 0;
  int unknown_count = 0;
  std::vector<std::vector<int>> arcs;  // sorted out-neighbors per combined vertex
  std::vector<int> sources;            // unsaturated equation vertices (combined ids)
  std::vector<int> sinks;              // unsaturated unknown vertices (combined ids)

  int vertex_count() const { return equation_count + unknown_count; }
  int equation_vertex(int e) const { return e; }
  int unknown_vertex(int u) const { return equation_count + u; }
  bool is_equation(int v) const { return v < equation_count; }
  int unknown_of(int v) const { return v - equation_count; }
};

inline void check_matching(const BipartiteGraph& g, const Matching& m) {
  if (static_cast<int>(m.pair_of_equation.size()) != g.equation_count ||
      static_cast<int>(m.pair_of_unknown.size()) != g.unknown_count)
    throw Error(ErrorKind::Contract, "matching shape does not fit the graph");
  for (int e = 0; e < g.equation_count; ++e) {
    int u = m.pair_of_equation[e];
    if (u < 0) continue;
    if (u >= g.unknown_count || m.pair_of_unknown[u] != e)
      throw Error(ErrorKind::Contract, "matching maps are not mutually inverse");
    if (!g.has_edge(e, u))
      throw Error(ErrorKind::Contract, "matched pair (" + std::to_string(e) + ", " + std::to_string(u) +
                                           ") is not an edge of the graph");
  }
  for (int u = 0; u < g.unknown_count; ++u) {
    int e = m.pair_of_unknown[u];
    if (e >= 0 && (e >= g.equation_count || m.pair_of_equation[e] != u))
      throw Error(ErrorKind::Contract, "matching maps are not mutually inverse");
  }
}

inline OrientedGraph orient(const BipartiteGraph& g, const Matching& m) {
  check_matching(g, m);
  OrientedGraph og;
  og.equation_count = g.equation_count;
  og.unknown_count = g.unknown_count;
  og.arcs.resize(og.vertex_count());
  for (const auto& [e, u] : g.edges) {
    og.arcs[og.equation_vertex(e)].push_back(og.unknown_vertex(u));
    if (m.pair_of_equation[e] == u)
      og.arcs[og.unknown_vertex(u)].push_back(og.equation_vertex(e));
  }
  for (auto& out : og.arcs) std::sort(out.begin(), out.end());
  for (int e = 0; e < g.equation_count; ++e)
    if (!m.saturates_equation(e)) og.sources.push_back(og.equation_vertex(e));
  for (int u = 0; u < g.unknown_count; ++u)
    if (!m.saturates_unknown(u)) og.sinks.push_back(og.unknown_vertex(u));
  return og;
}

/// Strongly connected components contracted to a DAG. Components are listed
/// in dependency-first order: if dag_arcs contains c1 -> c2 then c2 appears
/// before c1 (solve c2 first); ties broken by smallest contained vertex id.
struct Condensation {
  std::vector<std::vector<int>> components;      // each sorted ascending
  std::vector<int> component_of;                 // per combined vertex
  std::vector<std::pair<int, int>> dag_arcs;     // sorted, unique, no self-arcs
};

namespace detail {

/// Dependency-first order of DAG nodes: every arc a -> b puts b before a;
/// among ready nodes the one with the smallest contained vertex id wins.
/// Components must be sorted so front() is the minimum.
inline std::vector<int> dependency_first_order(const std::vector<std::vector<int>>& components,
                                               const std::vector<std::pair<int, int>>& arcs) {
  const int k = static_cast<int>(components.size());
  std::vector<int> out_degree(k, 0);
  std::vector<std::vector<int>> incoming(k);  // incoming[b] = nodes with an arc into b
  for (const auto& [a, b] : arcs) {
    ++out_degree[a];
    incoming[b].push_back(a);
  }
  using Entry = std::pair<int, int>;  // (min contained vertex, component)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (int c = 0; c < k; ++c)
    if (out_degree[c] == 0) ready.emplace(components[c].empty() ? c : components[c].front(), c);
  std::vector<int> order;
  order.reserve(k);
  while (!ready.empty()) {
    int c = ready.top().second;
    ready.pop();
    order.push_back(c);
    for (int p : incoming[c])
      if (--out_degree[p] == 0) ready.emplace(components[p].empty() ? p : components[p].front(), p);
  }
  if (static_cast<int>(order.size()) != k)
    throw Error(ErrorKind::Internal, "cycle detected in condensation DAG");
  return order;
}

}  // namespace detail

/// Tarjan SCCs plus condensation; emission order is canonicalized to the
/// dependency-first order described on Condensation.
inline Condensation strongly_connected_components(const OrientedGraph& dg) {
  const int n = dg.vertex_count();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> raw_components;
  int counter = 0;

  struct Frame {
    int v;
    size_t child;
  };
  std::vector<Frame> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      int v = f.v;
      if (f.child < dg.arcs[v].size()) {
        int w = dg.arcs[v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<int> vertices;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = static_cast<int>(raw_components.size());
            vertices.push_back(w);
            if (w == v) break;
          }
          std::sort(vertices.begin(), vertices.end());
          raw_components.push_back(std::move(vertices));
        }
        frames.pop_back();
        if (!frames.empty()) {
          int parent = frames.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }

  std::vector<std::pair<int, int>> raw_arcs;
  for (int v = 0; v < n; ++v)
    for (int w : dg.arcs[v])
      if (comp[v] != comp[w]) raw_arcs.emplace_back(comp[v], comp[w]);
  std::sort(raw_arcs.begin(), raw_arcs.end());
  raw_arcs.erase(std::unique(raw_arcs.begin(), raw_arcs.end()), raw_arcs.end());

  std::vector<int> order = detail::dependency_first_order(raw_components, raw_arcs);
  std::vector<int> position(order.size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) position[order[i]] = i;

  Condensation c;
  c.components.resize(raw_components.size());
  for (size_t old = 0; old < raw_components.size(); ++old)
    c.components[position[old]] = std::move(raw_components[old]);
  c.component_of.resize(n);
  for (int v = 0; v < n; ++v) c.component_of[v] = position[comp[v]];
  c.dag_arcs.reserve(raw_arcs.size());
  for (const auto& [a, b] : raw_arcs) c.dag_arcs.emplace_back(position[a], position[b]);
  std::sort(c.dag_arcs.begin(), c.dag_arcs.end());
  return c;
}

/// Dependency-first total order of the condensation: if there is an arc
/// c1 -> c2, c2 appears before c1 in the result.
inline std::vector<int> topological_order(const Condensation& c) {
  return detail::dependency_first_order(c.components, c.dag_arcs);
}

/// Closure of a seed set under arcs (Forward: descendants including seeds,
/// Backward: ancestors including seeds). Result is sorted.
inline std::vector<int> reachable(const OrientedGraph& dg, const std::vector<int>& seeds,
                                  Direction direction) {
  const int n = dg.vertex_count();
  std::vector<std::vector<int>> rev;
  if (direction == Direction::Backward) {
    rev.resize(n);
    for (int v = 0; v < n; ++v)
      for (int w : dg.arcs[v]) rev[w].push_back(v);
  }
  const auto& adj = direction == Direction::Forward ? dg.arcs : rev;
  std::vector<char> seen(n, 0);
  std::vector<int> queue;
  for (int s : seeds) {
    if (s < 0 || s >= n) throw Error(ErrorKind::Contract, "seed vertex out of range");
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  for (size_t i = 0; i < queue.size(); ++i)
    for (int w : adj[queue[i]])
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

/// One connected component of a bipartite subgraph, split by side.
struct SubgraphComponent {
  std::vector<int> equations;
  std::vector<int> unknowns;
};

/// Undirected connected components of the subgraph induced by the given
/// vertex sets. Components come out ordered by their smallest combined
/// vertex id; ids are in terms of the original graph.
inline std::vector<SubgraphComponent> connected_components(const BipartiteGraph& g,
                                                           const std::vector<int>& equations,
                                                           const std::vector<int>& unknowns) {
  std::vector<char> in_eq(g.equation_count, 0), in_unk(g.unknown_count, 0);
  for (int e : equations) in_eq[e] = 1;
  for (int u : unknowns) in_unk[u] = 1;

  std::vector<char> seen_eq(g.equation_count, 0), seen_unk(g.unknown_count, 0);
  std::vector<SubgraphComponent> out;

  auto explore = [&](int e0, int u0) {
    SubgraphComponent comp;
    std::vector<std::pair<bool, int>> queue;  // (is_equation, id)
    if (e0 >= 0) {
      seen_eq[e0] = 1;
      queue.emplace_back(true, e0);
    } else {
      seen_unk[u0] = 1;
      queue.emplace_back(false, u0);
    }
    for (size_t i = 0; i < queue.size(); ++i) {
      auto [is_eq, id] = queue[i];
      if (is_eq) {
        comp.equations.push_back(id);
        for (int u : g.eq_adj[id])
          if (in_unk[u] && !seen_unk[u]) {
            seen_unk[u] = 1;
            queue.emplace_back(false, u);
          }
      } else {
        comp.unknowns.push_back(id);
        for (int e : g.unk_adj[id])
          if (in_eq[e] && !seen_eq[e]) {
            seen_eq[e] = 1;
            queue.emplace_back(true, e);
          }
      }
    }
    std::sort(comp.equations.begin(), comp.equations.end());
    std::sort(comp.unknowns.begin(), comp.unknowns.end());
    out.push_back(std::move(comp));
  };

  // Scan in combined-id order so component order is deterministic.
  for (int e = 0; e < g.equation_count; ++e)
    if (in_eq[e] && !seen_eq[e]) explore(e, -1);
  for (int u = 0; u < g.unknown_count; ++u)
    if (in_unk[u] && !seen_unk[u]) explore(-1, u);
  std::sort(out.begin(), out.end(), [&](const SubgraphComponent& a, const SubgraphComponent& b) {
    auto key = [&](const SubgraphComponent& s) {
      int e = s.equations.empty() ? std::numeric_limits<int>::max() : s.equations.front();
      int u = s.unknowns.empty() ? std::numeric_limits<int>::max()
                                 : g.equation_count + s.unknowns.front();
      return std::min(e, u);
    };
    return key(a) < key(b);
  });
  return out;
}

/// Subgraph induced by equation/unknown subsets, with dense local ids and
/// the maps back to the original ids.
struct InducedSubgraph {
  BipartiteGraph graph;
  std::vector<int> equation_ids;  // local -> original
  std::vector<int> unknown_ids;
};

inline InducedSubgraph induced_subgraph(const BipartiteGraph& g, const std::vector<int>& equations,
                                        const std::vector<int>& unknowns) {
  InducedSubgraph sub;
  sub.equation_ids = equations;
  sub.unknown_ids = unknowns;
  std::sort(sub.equation_ids.begin(), sub.equation_ids.end());
  std::sort(sub.unknown_ids.begin(), sub.unknown_ids.end());
  std::vector<int> eq_local(g.equation_count, -1), unk_local(g.unknown_count, -1);
  for (int i = 0; i < static_cast<int>(sub.equation_ids.size()); ++i)
    eq_local[sub.equation_ids[i]] = i;
  for (int i = 0; i < static_cast<int>(sub.unknown_ids.size()); ++i)
    unk_local[sub.unknown_ids[i]] = i;

  std::vector<std::pair<int, std::vector<int>>> occurrences;
  for (const auto& [e, u] : g.edges)
    if (eq_local[e] >= 0 && unk_local[u] >= 0)
      occurrences.push_back({eq_local[e], {unk_local[u]}});
  sub.graph = build_graph(static_cast<int>(sub.equation_ids.size()),
                          static_cast<int>(sub.unknown_ids.size()), occurrences);
  return sub;
}

}  // namespace eqsolve
