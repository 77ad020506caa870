#pragma once

// Command-line front end: analyze | plan | solve | dot over a constraint
// file, with JSON reports, plan listings, solution output and DOT exports.
//
// Exit codes: 0 success (analyze: well-constrained), 1 input/usage error,
// 2 over-constrained part present, 3 under-constrained part present,
// 4 both, 5 solutions exist but a discarded equation fails, 6 no solutions.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqsolve/decomposition.hpp"
#include "eqsolve/errors.hpp"
#include "eqsolve/parser.hpp"
#include "eqsolve/report.hpp"
#include "eqsolve/solver.hpp"
#include "eqsolve/system.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace eqsolve {

namespace detail {

inline bool color_enabled(const std::ostream& out) {
  const char* env = std::getenv("EQSOLVE_COLOR");
  if (env && std::string(env) == "never") return false;
#if defined(__unix__) || defined(__APPLE__)
  return &out == &std::cout && isatty(fileno(stdout)) != 0;
#else
  (void)out;
  return false;
#endif
}

inline EquationSystem load_system(const std::string& path) {
  EquationSystem s = parse_system_file(path);
  if (s.equations.empty()) throw Error(ErrorKind::Input, "no equations in '" + path + "'");
  return s;
}

inline int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::Well: return 0;
    case Verdict::Over: return 2;
    case Verdict::Under: return 3;
    case Verdict::Mixed: return 4;
  }
  return 1;
}

inline std::map<std::string, double> parse_param_flags(const std::vector<std::string>& flags) {
  std::map<std::string, double> overrides;
  for (const std::string& flag : flags) {
    size_t eq = flag.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::Usage, "--param expects name=value, got '" + flag + "'");
    std::string name = flag.substr(0, eq);
    std::string value = flag.substr(eq + 1);
    try {
      size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      overrides[name] = v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Usage, "--param " + name + ": bad value '" + value + "'");
    }
  }
  return overrides;
}

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace detail

inline int cmd_analyze(const std::string& path, bool json, std::ostream& out, std::ostream& err) {
  (void)err;
  EquationSystem s = detail::load_system(path);
  auto start = detail::Clock::now();
  ResolutionPlan plan = resolution_plan(to_graph(s));
  Timings timings;
  timings.decompose_ms = detail::ms_since(start);
  if (json)
    out << report_json(s, plan, {}, timings).dump(2) << "\n";
  else
    write_text_report(out, s, plan, detail::color_enabled(out));
  return detail::verdict_exit_code(plan.diagnosis.verdict);
}

inline int cmd_plan(const std::string& path, bool dot, std::ostream& out, std::ostream& err) {
  (void)err;
  EquationSystem s = detail::load_system(path);
  ResolutionPlan plan = resolution_plan(to_graph(s));
  if (dot) {
    // The plan's dependency DAG: one node per block, arc i -> j when block i
    // needs block j solved first.
    out << "digraph plan {\n";
    for (size_t i = 0; i < plan.blocks.size(); ++i) {
      std::string label;
      for (const std::string& n : detail::equation_names(s, plan.blocks[i].equations)) {
        if (!label.empty()) label += ", ";
        label += n;
      }
      out << "  b" << i << " [label=" << detail::dot_quote("{" + label + "}") << "];\n";
    }
    for (const auto& [i, j] : plan.dependencies) out << "  b" << i << " -> b" << j << ";\n";
    out << "}\n";
  } else {
    write_plan_listing(out, s, plan);
  }
  return 0;
}

inline int cmd_solve(const std::string& path, const std::vector<std::string>& param_flags,
                     double tol, std::int64_t max_boxes, bool monolithic, std::ostream& out,
                     std::ostream& err) {
  EquationSystem s = detail::load_system(path);
  std::map<std::string, double> overrides = detail::parse_param_flags(param_flags);

  SolverConfig config;
  if (tol > 0.0) config.tol_width = tol;
  if (max_boxes > 0) config.max_boxes = max_boxes;

  auto t0 = detail::Clock::now();
  ResolutionPlan plan = resolution_plan(to_graph(s));
  Timings timings;
  timings.decompose_ms = detail::ms_since(t0);

  auto t1 = detail::Clock::now();
  std::vector<SystemSolution> solutions;
  if (monolithic) {
    // The monolithic baseline has no free parameters; --param may only
    // rebind declared parameters here.
    EquationSystem adjusted = s;
    for (const auto& [name, value] : overrides) {
      auto p = adjusted.parameter_index(name);
      if (!p)
        throw Error(ErrorKind::Usage,
                    "--param with --monolithic can only rebind declared parameters; '" + name +
                        "' is not one");
      adjusted.parameter_values[*p] = value;
    }
    solutions = solve_monolithic(adjusted, config);
  } else {
    solutions = execute_plan(plan, s, overrides, config);
  }
  timings.solve_ms = detail::ms_since(t1);

  out << report_json(s, plan, solutions, timings).dump(2) << "\n";
  if (solutions.empty()) return 6;
  bool any_ok = false;
  std::set<std::string> failing;
  for (const SystemSolution& sol : solutions) {
    any_ok = any_ok || sol.discarded_ok;
    failing.insert(sol.failed_discarded.begin(), sol.failed_discarded.end());
  }
  if (any_ok) return 0;
  std::string names;
  for (const std::string& n : failing) names += (names.empty() ? "" : ", ") + n;
  err << "conflicting constraints: discarded equation(s) not satisfied: " << names << "\n";
  return 5;
}

inline int cmd_dot(const std::string& path, const std::string& kind, std::ostream& out,
                   std::ostream& err) {
  (void)err;
  EquationSystem s = detail::load_system(path);
  BipartiteGraph g = to_graph(s);
  Matching m = maximum_matching(g);
  if (kind == "bipartite") {
    write_dot_bipartite(out, s, g, m);
  } else if (kind == "oriented") {
    write_dot_oriented(out, s, orient(g, m));
  } else if (kind == "condensation") {
    OrientedGraph og = orient(g, m);
    write_dot_condensation(out, s, og, strongly_connected_components(og));
  } else {
    throw Error(ErrorKind::Usage, "unknown --graph kind '" + kind +
                                      "' (expected bipartite, oriented or condensation)");
  }
  return 0;
}

/// Dispatches a full command line (without the program name). Writes normal
/// output to `out` and diagnostics to `err`; returns the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural analysis and decomposed solving of algebraic constraint systems"};
  app.require_subcommand(1);

  std::string file;
  bool json = false, plan_dot = false, monolithic = false;
  std::vector<std::string> param_flags;
  double tol = 0.0;
  std::int64_t max_boxes = 0;
  std::string graph_kind = "bipartite";

  CLI::App* analyze = app.add_subcommand("analyze", "classify the system and print the partition");
  analyze->add_option("file", file, "constraint file")->required();
  analyze->add_flag("--json", json, "emit the JSON report");

  CLI::App* plan = app.add_subcommand("plan", "print the ordered irreducible blocks");
  plan->add_option("file", file, "constraint file")->required();
  plan->add_flag("--dot", plan_dot, "emit the block dependency DAG in DOT");

  CLI::App* solve = app.add_subcommand("solve", "solve the blocks in dependency order");
  solve->add_option("file", file, "constraint file")->required();
  solve->add_option("--param", param_flags, "bind a free parameter: name=value");
  solve->add_option("--tol", tol, "solution box width tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--max-boxes", max_boxes, "bisection box budget")->check(CLI::PositiveNumber);
  solve->add_flag("--monolithic", monolithic, "solve the whole system as one block");

  CLI::App* dot = app.add_subcommand("dot", "export a graph in DOT format");
  dot->add_option("file", file, "constraint file")->required();
  dot->add_option("--graph", graph_kind, "bipartite | oriented | condensation");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "eqsolve: " << e.what() << "\n";
    return 1;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(file, json, out, err);
    if (plan->parsed()) return cmd_plan(file, plan_dot, out, err);
    if (solve->parsed()) return cmd_solve(file, param_flags, tol, max_boxes, monolithic, out, err);
    if (dot->parsed()) return cmd_dot(file, graph_kind, out, err);
  } catch (const Error& e) {
    err << "eqsolve: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace eqsolve
