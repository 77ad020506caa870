#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eqsolve/cli.hpp"

using namespace eqsolve;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("eqsolve_test_" + std::to_string(++counter) + ".eq");
    std::ofstream(path) << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

const std::string kPointC =
    "var x y\n"
    "param xA=0 yA=0 xB=10 yB=0\n"
    "eq dCA: (x-xA)^2 + (y-yA)^2 - 169 = 0\n"
    "eq dCB: (x-xB)^2 + (y-yB)^2 - 169 = 0\n"
    "domain x in [-100, 100]\n"
    "domain y in [-100, 100]\n";

const std::string kMixed7x7 =
    "var x1 x2 x3 x4 x5 x6 x7\n"
    "eq y1: uses x1\n"
    "eq y2: uses x2\n"
    "eq y3: uses x3\n"
    "eq y4: uses x3\n"
    "eq y5: uses x4\n"
    "eq y6: uses x4\n"
    "eq y7: uses x5 x6 x7\n";

}  // namespace

TEST_CASE("analyze classifies a well-constrained file with exit 0") {
  TempFile f(kPointC);
  CliResult r = run({"analyze", f.str()});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("verdict: well"));
  // Captured streams are never a terminal: no color escapes.
  REQUIRE(r.out.find('\033') == std::string::npos);
}

TEST_CASE("analyze flags over- and under-constrained files") {
  TempFile over("var x\neq a: x - 1 = 0\neq b: x - 2 = 0\n");
  REQUIRE(run({"analyze", over.str()}).code == 2);
  TempFile under("var x y\neq a: x + y = 0\n");
  REQUIRE(run({"analyze", under.str()}).code == 3);
}

TEST_CASE("analyze reports the mixed partition in JSON") {
  TempFile f(kMixed7x7);
  CliResult r = run({"analyze", "--json", f.str()});
  REQUIRE(r.code == 4);
  Json j = Json::parse(r.out);
  REQUIRE(j["verdict"] == "mixed");
  REQUIRE(j["parts"]["g2"]["equations"] == Json::array({"y3", "y4", "y5", "y6"}));
  REQUIRE(j["parts"]["g2"]["unknowns"] == Json::array({"x3", "x4"}));
  REQUIRE(j["parts"]["g2"]["components"].size() == 2);
  REQUIRE(j["parts"]["g3"]["equations"] == Json::array({"y7"}));
  REQUIRE(j["parts"]["g3"]["unknowns"] == Json::array({"x5", "x6", "x7"}));
  REQUIRE(j["parts"]["g1"]["equations"] == Json::array({"y1", "y2"}));
  // Stable field presence.
  for (const char* key :
       {"schema_version", "verdict", "parts", "blocks", "dependencies", "free_parameters",
        "discarded_equations", "matching", "solutions", "timings"})
    REQUIRE(j.contains(key));
}

TEST_CASE("analyze rejects missing, malformed and empty files") {
  REQUIRE(run({"analyze", "/nonexistent/path.eq"}).code == 1);
  TempFile bad("var x\neq e: x +\n");
  CliResult r = run({"analyze", bad.str()});
  REQUIRE(r.code == 1);
  REQUIRE_THAT(r.err, Catch::Matchers::ContainsSubstring("line 2"));
  TempFile empty("");
  CliResult e = run({"analyze", empty.str()});
  REQUIRE(e.code == 1);
  REQUIRE_THAT(e.err, Catch::Matchers::ContainsSubstring("no equations"));
}

TEST_CASE("plan lists a three-point chain as three blocks in order") {
  TempFile f(
      "var xC yC xD yD xE yE\n"
      "param xA=0 yA=0 xB=10 yB=0\n"
      "eq c1: (xC-xA)^2 + (yC-yA)^2 = 169\n"
      "eq c2: (xC-xB)^2 + (yC-yB)^2 = 169\n"
      "eq d1: (xD-xC)^2 + (yD-yC)^2 = 25\n"
      "eq d2: (xD-xA)^2 + (yD-yA)^2 = 169\n"
      "eq e1: (xE-xD)^2 + (yE-yD)^2 = 16\n"
      "eq e2: (xE-xC)^2 + (yE-yC)^2 = 9\n");
  CliResult r = run({"plan", f.str()});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("3 block(s)"));
  size_t c = r.out.find("{c1, c2}");
  size_t d = r.out.find("{d1, d2}");
  size_t e = r.out.find("{e1, e2}");
  REQUIRE(c != std::string::npos);
  REQUIRE(d != std::string::npos);
  REQUIRE(e != std::string::npos);
  REQUIRE(c < d);
  REQUIRE(d < e);
}

TEST_CASE("plan reports one block for an irreducible four-cycle") {
  TempFile f("var x y\neq a: x + y = 1\neq b: x * y = 2\n");
  CliResult r = run({"plan", f.str()});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("1 block(s)"));
}

TEST_CASE("plan --dot emits the block dependency DAG") {
  TempFile f("var x0 x1\neq y0: x0 - 1 = 0\neq y1: x1 - x0 = 0\n");
  CliResult r = run({"plan", "--dot", f.str()});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::StartsWith("digraph plan"));
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("b1 -> b0"));
}

TEST_CASE("plan on an empty file exits 1") {
  TempFile empty("");
  REQUIRE(run({"plan", empty.str()}).code == 1);
}

TEST_CASE("solve emits both placements with exit 0") {
  TempFile f(kPointC);
  CliResult r = run({"solve", f.str()});
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["solutions"].size() == 2);
  for (const auto& sol : j["solutions"]) {
    REQUIRE(sol["discarded_ok"] == true);
    REQUIRE(sol["assignment"].contains("x"));
    REQUIRE(sol["residuals"].contains("dCA"));
  }
  REQUIRE(j["timings"].contains("decompose_ms"));
  REQUIRE(j["timings"].contains("solve_ms"));
}

TEST_CASE("solve verifies redundant constraints and flags contradictions") {
  TempFile redundant("var x\neq a: x - 1 = 0\neq b: 2*x - 2 = 0\n");
  CliResult ok = run({"solve", redundant.str()});
  REQUIRE(ok.code == 0);
  REQUIRE(Json::parse(ok.out)["solutions"][0]["discarded_ok"] == true);

  TempFile contradictory("var x\neq a: x - 1 = 0\neq b: 2*x - 3 = 0\n");
  CliResult bad = run({"solve", contradictory.str()});
  REQUIRE(bad.code == 5);
  REQUIRE_THAT(bad.err, Catch::Matchers::ContainsSubstring("b"));
  Json j = Json::parse(bad.out);
  REQUIRE(j["solutions"][0]["discarded_ok"] == false);
  REQUIRE(j["solutions"][0]["failed_discarded"] == Json::array({"b"}));
}

TEST_CASE("solve exits 6 when no solution exists") {
  TempFile f("var x\neq e: x^2 + 1 = 0\ndomain x in [-5, 5]\n");
  REQUIRE(run({"solve", f.str()}).code == 6);
}

TEST_CASE("solve demands --param for free parameters") {
  TempFile f(
      "var xC yC xE yE\n"
      "param xA=0 yA=0 xB=10 yB=0\n"
      "eq c1: (xC-xA)^2 + (yC-yA)^2 - 169 = 0\n"
      "eq c2: (xC-xB)^2 + (yC-yB)^2 - 169 = 0\n"
      "eq e1: (xE-xC)^2 + (yE-yC)^2 - 25 = 0\n"
      "domain xC in [-50, 50]\ndomain yC in [-50, 50]\n"
      "domain xE in [-50, 50]\ndomain yE in [-50, 50]\n");
  CliResult missing = run({"solve", f.str()});
  REQUIRE(missing.code == 1);
  REQUIRE_THAT(missing.err, Catch::Matchers::ContainsSubstring("yE"));

  CliResult bound = run({"solve", "--param", "yE=16", f.str()});
  REQUIRE(bound.code == 0);
  Json j = Json::parse(bound.out);
  REQUIRE(j["solutions"].size() == 2);
  for (const auto& sol : j["solutions"])
    REQUIRE(sol["assignment"]["yE"] == 16.0);
}

TEST_CASE("solve rejects malformed --param values") {
  TempFile f(kPointC);
  REQUIRE(run({"solve", "--param", "novalue", f.str()}).code == 1);
  REQUIRE(run({"solve", "--param", "x=abc", f.str()}).code == 1);
}

TEST_CASE("solve --monolithic matches the decomposed result") {
  TempFile f(kPointC);
  CliResult dec = run({"solve", f.str()});
  CliResult mono = run({"solve", "--monolithic", f.str()});
  REQUIRE(mono.code == 0);
  REQUIRE(Json::parse(dec.out)["solutions"] == Json::parse(mono.out)["solutions"]);
}

TEST_CASE("dot bipartite shows the matching in bold") {
  TempFile f("var x\neq e: x - 1 = 0\n");
  CliResult r = run({"dot", f.str()});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::StartsWith("graph bipartite"));
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("eq0 -- x0 [style=bold]"));
}

TEST_CASE("dot oriented and condensation exports") {
  TempFile f(kMixed7x7);
  CliResult oriented = run({"dot", "--graph", "oriented", f.str()});
  REQUIRE(oriented.code == 0);
  REQUIRE_THAT(oriented.out, Catch::Matchers::StartsWith("digraph oriented"));

  CliResult cond = run({"dot", "--graph", "condensation", f.str()});
  REQUIRE(cond.code == 0);
  REQUIRE_THAT(cond.out, Catch::Matchers::StartsWith("digraph condensation"));
  // Matched pairs contract into one node per strongly connected component.
  REQUIRE_THAT(cond.out, Catch::Matchers::ContainsSubstring("{y1, x1}"));
  REQUIRE_THAT(cond.out, Catch::Matchers::ContainsSubstring("{y3, x3}"));
  // DAG shape: the unsaturated over-constrained equations feed their matched
  // pairs, the under-constrained pair feeds its two free unknowns.
  size_t arcs = 0;
  for (size_t pos = cond.out.find("->"); pos != std::string::npos; pos = cond.out.find("->", pos + 2))
    ++arcs;
  REQUIRE(arcs == 4);
}

TEST_CASE("dot rejects unknown graph kinds") {
  TempFile f(kPointC);
  CliResult r = run({"dot", "--graph", "sideways", f.str()});
  REQUIRE(r.code == 1);
  REQUIRE_THAT(r.err, Catch::Matchers::ContainsSubstring("sideways"));
}

TEST_CASE("JSON reports round-trip through a parser") {
  TempFile f(kPointC);
  CliResult r = run({"solve", f.str()});
  Json parsed = Json::parse(r.out);
  REQUIRE(parsed.dump(2) + "\n" == r.out);
}

TEST_CASE("repeated runs are byte-identical") {
  TempFile f(kMixed7x7);
  CliResult a = run({"analyze", f.str()});
  CliResult b = run({"analyze", f.str()});
  REQUIRE(a.out == b.out);  // text output carries no timings

  TempFile g(kPointC);
  CliResult ja = run({"solve", g.str()});
  CliResult jb = run({"solve", g.str()});
  Json na = Json::parse(ja.out), nb = Json::parse(jb.out);
  na["timings"] = nullptr;
  nb["timings"] = nullptr;
  REQUIRE(na.dump(2) == nb.dump(2));

  CliResult da = run({"dot", "--graph", "condensation", g.str()});
  CliResult db = run({"dot", "--graph", "condensation", g.str()});
  REQUIRE(da.out == db.out);
}

TEST_CASE("unknown subcommands and missing arguments exit 1") {
  REQUIRE(run({"frobnicate"}).code == 1);
  REQUIRE(run({"analyze"}).code == 1);
  REQUIRE(run({}).code == 1);
}

TEST_CASE("help exits 0") {
  CliResult r = run({"--help"});
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, Catch::Matchers::ContainsSubstring("analyze"));
}
