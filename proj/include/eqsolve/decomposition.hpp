#pragma once

// Dulmage-Mendelsohn partition of a bipartite constraint graph into its
// well- (G1), over- (G2) and under-constrained (G3) parts, irreducible
// decomposition of well-constrained graphs, and resolution planning.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "eqsolve/errors.hpp"
#include "eqsolve/graph.hpp"

namespace eqsolve {

/// The six Dulmage-Mendelsohn classes plus the matching that produced them.
/// {c1, d1, a1} partition the equations; {c2, a2, d2} partition the unknowns.
/// G1 = (c1, c2, e1), G2 = (d1, a2, e2), G3 = (a1, d2, e3).
struct DMDecomposition {
  Matching matching;
  std::vector<int> c1, c2;  // well-constrained equations / unknowns
  std::vector<int> d1, a2;  // over-constrained equations / unknowns
  std::vector<int> a1, d2;  // under-constrained equations / unknowns
  std::vector<std::pair<int, int>> e1, e2, e3;  // induced edges per part
};

/// DM partition: take a maximum matching, orient, and close the unsaturated
/// equation vertices forward (G2) and the unsaturated unknown vertices
/// backward (G3); G1 is the rest. The partition does not depend on which
/// maximum matching was used.
inline DMDecomposition dm_decompose(const BipartiteGraph& g) {
  DMDecomposition dm;
  dm.matching = maximum_matching(g);
  OrientedGraph og = orient(g, dm.matching);

  std::vector<int> over = reachable(og, og.sources, Direction::Forward);
  std::vector<int> under = reachable(og, og.sinks, Direction::Backward);

  const int n = og.vertex_count();
  enum : char { kWell = 0, kOver = 1, kUnder = 2 };
  std::vector<char> part(n, kWell);
  for (int v : over) part[v] = kOver;
  for (int v : under) {
    // A vertex reachable both from a source and into a sink would break the
    // D1/D2 separation of the partition theorem.
    if (part[v] == kOver)
      throw Error(ErrorKind::Internal, "vertex lies in both the over- and under-constrained closure");
    part[v] = kUnder;
  }

  for (int e = 0; e < g.equation_count; ++e) {
    char p = part[og.equation_vertex(e)];
    (p == kWell ? dm.c1 : p == kOver ? dm.d1 : dm.a1).push_back(e);
  }
  for (int u = 0; u < g.unknown_count; ++u) {
    char p = part[og.unknown_vertex(u)];
    (p == kWell ? dm.c2 : p == kOver ? dm.a2 : dm.d2).push_back(u);
  }
  for (const auto& edge : g.edges) {
    char pe = part[og.equation_vertex(edge.first)];
    char pu = part[og.unknown_vertex(edge.second)];
    if (pe != pu) continue;
    (pe == kWell ? dm.e1 : pe == kOver ? dm.e2 : dm.e3).push_back(edge);
  }
  return dm;
}

/// A structurally irreducible square subsystem: every proper nonempty subset
/// of its equations sees strictly more unknowns than it has equations.
struct IrreducibleBlock {
  std::vector<int> equations;                       // sorted original ids
  std::vector<int> unknowns;                        // sorted original ids
  std::vector<std::pair<int, int>> internal_matching;  // perfect on the block
};

struct IrreducibleDecomposition {
  std::vector<IrreducibleBlock> blocks;  // dependency-first order
  Condensation condensation;             // over the oriented graph of the input
};

/// Decomposes a well-constrained graph into its irreducible components: the
/// strongly connected components of the matching-oriented graph, listed in
/// dependency-first order. The block partition is independent of which
/// perfect matching is supplied.
inline IrreducibleDecomposition irreducible_decomposition(const BipartiteGraph& g,
                                                          const Matching& perfect) {
  check_matching(g, perfect);
  for (int e = 0; e < g.equation_count; ++e)
    if (perfect.pair_of_equation[e] < 0)
      throw Error(ErrorKind::Contract, "matching does not saturate equation " + std::to_string(e));
  for (int u = 0; u < g.unknown_count; ++u)
    if (perfect.pair_of_unknown[u] < 0)
      throw Error(ErrorKind::Contract, "matching does not saturate unknown " + std::to_string(u));

  OrientedGraph og = orient(g, perfect);
  IrreducibleDecomposition dec;
  dec.condensation = strongly_connected_components(og);
  for (const auto& component : dec.condensation.components) {
    IrreducibleBlock block;
    for (int v : component) {
      if (og.is_equation(v))
        block.equations.push_back(v);
      else
        block.unknowns.push_back(og.unknown_of(v));
    }
    if (block.equations.size() != block.unknowns.size())
      throw Error(ErrorKind::Internal, "strongly connected component is not square");
    for (int e : block.equations) block.internal_matching.emplace_back(e, perfect.pair_of_equation[e]);
    dec.blocks.push_back(std::move(block));
  }
  return dec;
}

enum class Verdict { Well, Over, Under, Mixed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Well: return "well";
    case Verdict::Over: return "over";
    case Verdict::Under: return "under";
    case Verdict::Mixed: return "mixed";
  }
  return "?";
}

/// Informational rollup of the DM partition: overall verdict, the partition
/// itself, per-part connected components, and the candidate conflicting
/// equations of the over-constrained part (its unsaturated vertices).
struct Diagnosis {
  Verdict verdict = Verdict::Well;
  DMDecomposition dm;
  std::vector<SubgraphComponent> g1_components, g2_components, g3_components;
  std::vector<int> conflict_candidates;  // unsaturated equations of d1
};

inline Diagnosis classify_decomposition(const BipartiteGraph& g, DMDecomposition dm) {
  Diagnosis d;
  bool over = !dm.d1.empty() || !dm.a2.empty();
  bool under = !dm.a1.empty() || !dm.d2.empty();
  d.verdict = over && under ? Verdict::Mixed
              : over        ? Verdict::Over
              : under       ? Verdict::Under
                            : Verdict::Well;
  d.g1_components = connected_components(g, dm.c1, dm.c2);
  d.g2_components = connected_components(g, dm.d1, dm.a2);
  d.g3_components = connected_components(g, dm.a1, dm.d2);
  for (int e : dm.d1)
    if (!dm.matching.saturates_equation(e)) d.conflict_candidates.push_back(e);
  d.dm = std::move(dm);
  return d;
}

inline Diagnosis classify(const BipartiteGraph& g) {
  return classify_decomposition(g, dm_decompose(g));
}

/// Full structural resolution plan: irreducible blocks in dependency-first
/// order, the block dependency DAG, the unknowns that must be bound
/// externally, and the equations rejected for post-hoc verification.
struct ResolutionPlan {
  Diagnosis diagnosis;
  std::vector<IrreducibleBlock> blocks;          // original ids, dependency-first
  std::vector<std::pair<int, int>> dependencies;  // (i, j): block i needs block j; j < i
  std::vector<int> free_parameters;               // unsaturated unknowns of d2, sorted
  std::vector<int> discarded_equations;           // unsaturated equations of d1, sorted
};

/// Plans resolution of an arbitrary graph: reject the unsaturated equations
/// of the over-constrained part, bind the unsaturated unknowns of the
/// under-constrained part, and decompose the remaining (perfectly matched)
/// subgraph into ordered irreducible blocks.
inline ResolutionPlan resolution_plan(const BipartiteGraph& g) {
  ResolutionPlan plan;
  plan.diagnosis = classify(g);
  const DMDecomposition& dm = plan.diagnosis.dm;

  std::vector<int> kept_equations = dm.c1;
  for (int e : dm.d1) {
    if (dm.matching.saturates_equation(e))
      kept_equations.push_back(e);
    else
      plan.discarded_equations.push_back(e);
  }
  kept_equations.insert(kept_equations.end(), dm.a1.begin(), dm.a1.end());

  std::vector<int> kept_unknowns = dm.c2;
  kept_unknowns.insert(kept_unknowns.end(), dm.a2.begin(), dm.a2.end());
  for (int u : dm.d2) {
    if (dm.matching.saturates_unknown(u))
      kept_unknowns.push_back(u);
    else
      plan.free_parameters.push_back(u);
  }
  std::sort(plan.discarded_equations.begin(), plan.discarded_equations.end());
  std::sort(plan.free_parameters.begin(), plan.free_parameters.end());

  InducedSubgraph sub = induced_subgraph(g, kept_equations, kept_unknowns);

  // The matching restricted to the kept vertices is perfect on them: every
  // kept vertex is saturated and its partner is kept too.
  Matching restricted;
  restricted.pair_of_equation.assign(sub.graph.equation_count, -1);
  restricted.pair_of_unknown.assign(sub.graph.unknown_count, -1);
  std::vector<int> unk_local(g.unknown_count, -1);
  for (int i = 0; i < static_cast<int>(sub.unknown_ids.size()); ++i) unk_local[sub.unknown_ids[i]] = i;
  for (int i = 0; i < static_cast<int>(sub.equation_ids.size()); ++i) {
    int partner = dm.matching.pair_of_equation[sub.equation_ids[i]];
    int local = partner >= 0 ? unk_local[partner] : -1;
    if (local < 0)
      throw Error(ErrorKind::Internal, "kept equation has no kept matching partner");
    restricted.pair_of_equation[i] = local;
    restricted.pair_of_unknown[local] = i;
    ++restricted.size;
  }

  IrreducibleDecomposition dec = irreducible_decomposition(sub.graph, restricted);
  for (auto& block : dec.blocks) {
    IrreducibleBlock mapped;
    for (int e : block.equations) mapped.equations.push_back(sub.equation_ids[e]);
    for (int u : block.unknowns) mapped.unknowns.push_back(sub.unknown_ids[u]);
    for (auto& [e, u] : block.internal_matching)
      mapped.internal_matching.emplace_back(sub.equation_ids[e], sub.unknown_ids[u]);
    std::sort(mapped.equations.begin(), mapped.equations.end());
    std::sort(mapped.unknowns.begin(), mapped.unknowns.end());
    std::sort(mapped.internal_matching.begin(), mapped.internal_matching.end());
    plan.blocks.push_back(std::move(mapped));
  }
  plan.dependencies = dec.condensation.dag_arcs;
  for (const auto& [i, j] : plan.dependencies)
    if (j >= i) throw Error(ErrorKind::Internal, "dependency arc does not point backwards in the plan");
  return plan;
}

}  // namespace eqsolve
