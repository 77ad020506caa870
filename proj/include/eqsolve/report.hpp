#pragma once

// Serialization of analysis results: the JSON report (schema_version 1),
// the aligned text summary, the plan listing, and Graphviz DOT exports of
// the bipartite graph, the oriented graph and the condensation.

#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqsolve/decomposition.hpp"
#include "eqsolve/graph.hpp"
#include "eqsolve/solver.hpp"
#include "eqsolve/system.hpp"

namespace eqsolve {

struct Timings {
  double decompose_ms = 0.0;
  double solve_ms = 0.0;
};

using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> equation_names(const EquationSystem& s, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int e : ids) out.push_back(s.equations[e].name);
  return out;
}

inline std::vector<std::string> unknown_names(const EquationSystem& s, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int u : ids) out.push_back(s.unknowns[u]);
  return out;
}

inline Json part_json(const EquationSystem& s, const std::vector<int>& eqs,
                      const std::vector<int>& unks, const std::vector<SubgraphComponent>& comps) {
  Json part;
  part["equations"] = equation_names(s, eqs);
  part["unknowns"] = unknown_names(s, unks);
  Json components = Json::array();
  for (const SubgraphComponent& c : comps) {
    Json comp;
    comp["equations"] = equation_names(s, c.equations);
    comp["unknowns"] = unknown_names(s, c.unknowns);
    components.push_back(std::move(comp));
  }
  part["components"] = std::move(components);
  return part;
}

}  // namespace detail

/// The machine-readable analysis report. Every field is always present;
/// empty parts serialize as empty arrays.
inline Json report_json(const EquationSystem& s, const ResolutionPlan& plan,
                        const std::vector<SystemSolution>& solutions, const Timings& timings) {
  const Diagnosis& d = plan.diagnosis;
  const DMDecomposition& dm = d.dm;
  Json report;
  report["schema_version"] = 1;
  report["verdict"] = to_string(d.verdict);
  Json parts;
  parts["g1"] = detail::part_json(s, dm.c1, dm.c2, d.g1_components);
  parts["g2"] = detail::part_json(s, dm.d1, dm.a2, d.g2_components);
  parts["g3"] = detail::part_json(s, dm.a1, dm.d2, d.g3_components);
  report["parts"] = std::move(parts);

  Json blocks = Json::array();
  for (const IrreducibleBlock& block : plan.blocks) {
    Json b;
    b["equations"] = detail::equation_names(s, block.equations);
    b["unknowns"] = detail::unknown_names(s, block.unknowns);
    blocks.push_back(std::move(b));
  }
  report["blocks"] = std::move(blocks);

  Json deps = Json::array();
  for (const auto& [i, j] : plan.dependencies) deps.push_back(Json::array({i, j}));
  report["dependencies"] = std::move(deps);
  report["free_parameters"] = detail::unknown_names(s, plan.free_parameters);
  report["discarded_equations"] = detail::equation_names(s, plan.discarded_equations);

  Json matching = Json::array();
  for (const auto& [e, u] : dm.matching.edges())
    matching.push_back(Json::array({s.equations[e].name, s.unknowns[u]}));
  report["matching"] = std::move(matching);

  Json sols = Json::array();
  for (const SystemSolution& sol : solutions) {
    Json js;
    Json assignment;
    for (const auto& [name, value] : sol.assignment) assignment[name] = value;
    js["assignment"] = std::move(assignment);
    Json residuals;
    for (const auto& [name, value] : sol.residual_report) residuals[name] = value;
    js["residuals"] = std::move(residuals);
    js["discarded_ok"] = sol.discarded_ok;
    js["failed_discarded"] = sol.failed_discarded;
    sols.push_back(std::move(js));
  }
  report["solutions"] = std::move(sols);

  Json t;
  t["decompose_ms"] = timings.decompose_ms;
  t["solve_ms"] = timings.solve_ms;
  report["timings"] = std::move(t);
  return report;
}

namespace detail {

inline std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

inline std::string set_text(const EquationSystem& s, const std::vector<int>& eqs,
                            const std::vector<int>& unks) {
  std::string out = "{" + join(equation_names(s, eqs));
  out += " | ";
  out += join(unknown_names(s, unks)) + "}";
  return out;
}

}  // namespace detail

/// Human-readable analysis summary. Omits timings so repeated runs are
/// byte-identical.
inline void write_text_report(std::ostream& out, const EquationSystem& s,
                              const ResolutionPlan& plan, bool color) {
  const Diagnosis& d = plan.diagnosis;
  const DMDecomposition& dm = d.dm;
  auto paint = [&](const char* code, const std::string& text) {
    return color ? std::string("\033[") + code + "m" + text + "\033[0m" : text;
  };
  const char* code = d.verdict == Verdict::Well    ? "32"
                     : d.verdict == Verdict::Over  ? "31"
                     : d.verdict == Verdict::Under ? "33"
                                                   : "35";
  out << "verdict: " << paint(code, to_string(d.verdict)) << "\n";

  auto part = [&](const char* label, const std::vector<int>& eqs, const std::vector<int>& unks,
                  const std::vector<SubgraphComponent>& comps) {
    out << label << ": " << eqs.size() << " equation(s), " << unks.size() << " unknown(s)\n";
    for (const SubgraphComponent& c : comps)
      out << "  component " << detail::set_text(s, c.equations, c.unknowns) << "\n";
  };
  part("well-constrained (G1)", dm.c1, dm.c2, d.g1_components);
  part("over-constrained (G2)", dm.d1, dm.a2, d.g2_components);
  part("under-constrained (G3)", dm.a1, dm.d2, d.g3_components);
  if (!plan.discarded_equations.empty())
    out << "candidate conflicts (discarded): "
        << detail::join(detail::equation_names(s, plan.discarded_equations)) << "\n";
  if (!plan.free_parameters.empty())
    out << "free parameters: " << detail::join(detail::unknown_names(s, plan.free_parameters))
        << "\n";
  out << "blocks (resolution order):\n";
  for (size_t i = 0; i < plan.blocks.size(); ++i)
    out << "  " << i + 1 << ". "
        << detail::set_text(s, plan.blocks[i].equations, plan.blocks[i].unknowns) << "\n";
}

/// Plan listing: blocks in resolution order plus their dependency arcs.
inline void write_plan_listing(std::ostream& out, const EquationSystem& s,
                               const ResolutionPlan& plan) {
  out << "resolution plan: " << plan.blocks.size() << " block(s)\n";
  for (size_t i = 0; i < plan.blocks.size(); ++i) {
    const IrreducibleBlock& b = plan.blocks[i];
    out << "  block " << i + 1 << ": equations {"
        << detail::join(detail::equation_names(s, b.equations)) << "} unknowns {"
        << detail::join(detail::unknown_names(s, b.unknowns)) << "}\n";
  }
  for (const auto& [i, j] : plan.dependencies)
    out << "  block " << i + 1 << " needs block " << j + 1 << "\n";
  if (!plan.discarded_equations.empty())
    out << "  discarded: " << detail::join(detail::equation_names(s, plan.discarded_equations))
        << "\n";
  if (!plan.free_parameters.empty())
    out << "  free parameters: " << detail::join(detail::unknown_names(s, plan.free_parameters))
        << "\n";
}

namespace detail {
inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}
}  // namespace detail

/// Bipartite graph in DOT: equation vertices ranked above unknown vertices,
/// matching edges bold.
inline void write_dot_bipartite(std::ostream& out, const EquationSystem& s,
                                const BipartiteGraph& g, const Matching& m) {
  out << "graph bipartite {\n  rankdir=TB;\n";
  out << "  { rank=min;";
  for (int e = 0; e < g.equation_count; ++e)
    out << " eq" << e << " [label=" << detail::dot_quote(s.equations[e].name) << " shape=box];";
  out << " }\n";
  out << "  { rank=max;";
  for (int u = 0; u < g.unknown_count; ++u)
    out << " x" << u << " [label=" << detail::dot_quote(s.unknowns[u]) << "];";
  out << " }\n";
  for (const auto& [e, u] : g.edges) {
    out << "  eq" << e << " -- x" << u;
    if (m.pair_of_equation[e] == u) out << " [style=bold]";
    out << ";\n";
  }
  out << "}\n";
}

/// Matching-oriented graph in DOT.
inline void write_dot_oriented(std::ostream& out, const EquationSystem& s, const OrientedGraph& og) {
  auto node = [&](int v) {
    return v < og.equation_count ? "eq" + std::to_string(v)
                                 : "x" + std::to_string(og.unknown_of(v));
  };
  out << "digraph oriented {\n  rankdir=TB;\n";
  for (int e = 0; e < og.equation_count; ++e)
    out << "  eq" << e << " [label=" << detail::dot_quote(s.equations[e].name) << " shape=box];\n";
  for (int u = 0; u < og.unknown_count; ++u)
    out << "  x" << u << " [label=" << detail::dot_quote(s.unknowns[u]) << "];\n";
  for (int v = 0; v < og.vertex_count(); ++v)
    for (int w : og.arcs[v]) out << "  " << node(v) << " -> " << node(w) << ";\n";
  out << "}\n";
}

/// Condensation of the oriented graph in DOT; each node is one strongly
/// connected component labeled with its vertices.
inline void write_dot_condensation(std::ostream& out, const EquationSystem& s,
                                   const OrientedGraph& og, const Condensation& c) {
  out << "digraph condensation {\n";
  for (size_t i = 0; i < c.components.size(); ++i) {
    std::string label;
    for (int v : c.components[i]) {
      if (!label.empty()) label += ", ";
      label += og.is_equation(v) ? s.equations[v].name : s.unknowns[og.unknown_of(v)];
    }
    out << "  c" << i << " [label=" << detail::dot_quote("{" + label + "}") << "];\n";
  }
  for (const auto& [a, b] : c.dag_arcs) out << "  c" << a << " -> c" << b << ";\n";
  out << "}\n";
}

}  // namespace eqsolve
