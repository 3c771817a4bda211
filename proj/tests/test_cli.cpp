#include <doctest.h>

#include "qpm/spec_file.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qpm;

namespace {

const char* const kMinimal =
    "group sl 2\n"
    "surface disc 4\n"
    "build double\n"
    "check quasi_poisson_identity samples=10 tol=1e-8\n";

SyntaxError syntax_error(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SyntaxError& e) {
    return e;
  }
  FAIL("no syntax error for:\n" << text);
  return SyntaxError(0, 0, "");
}

std::string semantic_error(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SemanticError& e) {
    return e.what();
  }
  FAIL("no semantic error for:\n" << text);
  return "";
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / ("qpm_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

struct ToolRun {
  int code = -1;
  std::string out;
};

ToolRun tool(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + std::string(QPM_TOOL_PATH) + "\" " + args + " 2>/dev/null";
  ToolRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("minimal spec file") {
  SpecFile s = parse_spec(kMinimal);
  CHECK(s.group_n == 2);
  CHECK(s.disc_k == 4);
  CHECK(s.build == "double");
  REQUIRE(s.checks.size() == 1);
  CHECK(s.checks[0].id == "quasi_poisson_identity");
  CHECK(s.checks[0].samples == 10);
  CHECK(s.checks[0].tol == 1e-8);
  CHECK_FALSE(s.checks[0].fd);
  CHECK_FALSE(s.seed);
  auto cfg = check_configs(s, 7);
  REQUIRE(cfg.size() == 1);
  CHECK(cfg[0].surface == SurfaceKind::Double);
  CHECK(cfg[0].surface_k == 4);
  CHECK(cfg[0].seed == 7);
}

TEST_CASE("full grammar with comments and options") {
  SpecFile s = parse_spec(
      "# header comment\n"
      "group sl 3   # trailing comment\n"
      "\n"
      "surface disc 3\n"
      "decorate vertex 2 btilde+\n"
      "decorate edge 1 bruhat 213\n"
      "decorate edge 2 B-\n"
      "decorate edge 3 G\n"
      "seed 18446744073709551615\n"
      "check quasi_poisson_identity samples=4 tol=1e-9 fd=2e-3 mutate\n"
      "check fission_axioms samples=2 tol=1e-9\n"
      "output out dir/report.json # comment\n");
  CHECK(s.group_n == 3);
  REQUIRE(s.vertices.size() == 1);
  CHECK(s.vertices[0] == VertexDecoration{2, "btilde+"});
  REQUIRE(s.edges.size() == 3);
  CHECK(s.edges[0] == EdgeDecoration{1, "bruhat", "213"});
  CHECK(s.edges[1] == EdgeDecoration{2, "B-", ""});
  CHECK(*s.seed == 18446744073709551615ull);
  CHECK(*s.checks[0].fd == 2e-3);
  CHECK(s.checks[0].mutate);
  CHECK(s.checks[0].line == 10);
  CHECK(*s.output == "out dir/report.json");
}

TEST_CASE("preset surdec expands to the boundary decoration") {
  SpecFile s = parse_spec("group sl 2\nsurface disc 4\npreset surdec\n");
  const std::vector<VertexDecoration> want = {
      {1, "gstar"}, {2, "btilde+"}, {3, "btilde+"}, {4, "btilde+"}, {5, "gstar-dual"}};
  CHECK(s.vertices == want);
  CHECK_NOTHROW(parse_spec("group sl 2\nsurface disc 3\npreset surdec\ncheck psi_poisson samples=2 tol=1e-8\n"));
}

TEST_CASE("syntax errors carry line and column") {
  SyntaxError e = syntax_error("group sl 2\nsurfase disc 4\n");
  CHECK(e.line == 2);
  CHECK(e.col == 1);
  e = syntax_error("group sl two\n");
  CHECK(e.line == 1);
  CHECK(e.col == 10);
  CHECK(e.expected == "an integer");
  e = syntax_error("group sl 2\nsurface disc 4\n  decorate vertex 1 gorp\n");
  CHECK(e.line == 3);
  CHECK(e.col == 21);
  e = syntax_error("group sl 2\ncheck t2_lift samples=3\n");
  CHECK(e.line == 2);
  CHECK(e.col == 24);
  CHECK(e.expected == "tol=<float>");
  e = syntax_error("group sl 2\ncheck t2_lift samples=3 tol=1e-9 colour=red\n");
  CHECK(e.col == 34);
  e = syntax_error("group sl 2 3\n");
  CHECK(e.col == 12);
  CHECK(e.expected == "end of line");
  e = syntax_error("group sl 2\nseed -4\n");
  CHECK(e.line == 2);
  CHECK(e.col == 6);
  e = syntax_error("group sl 2\nbuild glue\n");
  CHECK(e.col == 7);
}

TEST_CASE("semantic errors") {
  CHECK(semantic_error("group sl 2\nsurface disc 4\ndecorate vertex 99 gstar\n").find("unknown vertex 99") !=
        std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\ndecorate edge 40 G\n").find("unknown edge 40") != std::string::npos);
  CHECK(semantic_error("group sl 2\ngroup sl 3\n").find("duplicate group") != std::string::npos);
  CHECK(semantic_error("surface disc 2\n").find("missing group") != std::string::npos);
  CHECK(semantic_error("group sl 2\ndecorate vertex 1 gstar\n").find("before the surface") != std::string::npos);
  CHECK(semantic_error("group sl 2\ncheck nonsense samples=1 tol=1\n").find("unknown check") != std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\ncheck theta_membership samples=1 tol=1e-9\n")
            .find("build double") != std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\nbuild double\ncheck psi_poisson samples=1 tol=1e-9\n")
            .find("takes no build") != std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\nbuild topological-double\ncheck gauge_invariance samples=1 tol=1\n")
            .find("topological double") != std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\ndecorate vertex 1 btilde+\ncheck psi_poisson samples=1 tol=1\n")
            .find("surdec") != std::string::npos);
  CHECK(semantic_error("group sl 3\nsurface disc 2\ndecorate edge 1 bruhat 21\n").find("length 3") != std::string::npos);
  CHECK(semantic_error("group sl 3\nsurface disc 2\ndecorate edge 1 bruhat 113\n").find("not a permutation") !=
        std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 2\npreset surdec\ndecorate vertex 1 gstar\n").find("twice") !=
        std::string::npos);
  CHECK(semantic_error("group sl 2\nsurface disc 4\n\ndecorate vertex 99 gstar\n").find("line 4") != std::string::npos);
}

TEST_CASE("print then parse reproduces the parsed file") {
  const std::vector<std::string> texts = {
      kMinimal,
      "group sl 3\nsurface disc 3\npreset surdec\ndecorate edge 2 bruhat 321\nseed 5\n"
      "check psi_poisson samples=3 tol=1.0000000000000001e-09 mutate\noutput -\n",
      "group sl 2\nsurface disc 4\nbuild double\ncheck theta_membership samples=2 tol=0.1 split=1 fd=0.3\n",
      "group sl 4\n"};
  for (const std::string& t : texts) {
    SpecFile a = parse_spec(t);
    const std::string printed = print_spec(a);
    SpecFile b = parse_spec(printed);
    CHECK(a == b);
    CHECK(print_spec(b) == printed);
  }
}

TEST_CASE("execute maps check results to exit codes") {
  std::ostringstream out;
  ExecResult ok = execute(parse_spec(kMinimal), 1, out);
  CHECK(ok.exit_code == 0);
  REQUIRE(ok.reports.size() == 1);
  CHECK(ok.reports[0]["pass"] == true);
  CHECK_FALSE(ok.reports[0].contains("runtime_ms"));
  CHECK(nlohmann::json::parse(out.str()) == ok.reports);

  std::ostringstream sink;
  ExecResult bad = execute(parse_spec(std::string(kMinimal) + "check gauge_invariance samples=2 tol=1e-9 mutate\n"),
                           1, sink);
  CHECK(bad.exit_code == 1);
  CHECK(bad.reports.size() == 2);

  ExecResult invalid =
      execute(parse_spec("group sl 2\nsurface disc 3\nbuild double\ncheck t2_lift samples=1 tol=1e-9\n"), 1, sink);
  CHECK(invalid.exit_code == 3);
  CHECK_FALSE(invalid.error.empty());
}

TEST_CASE("tool subcommands and exit codes") {
  const auto minimal = write_file("minimal.spec", kMinimal);
  ToolRun r = tool("run " + minimal.string());
  CHECK(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["check_id"] == "quasi_poisson_identity");

  const auto mutated = write_file("mutated.spec", "group sl 2\nsurface disc 2\n"
                                                  "check quasi_poisson_identity samples=3 tol=1e-9 mutate\n");
  CHECK(tool("run " + mutated.string()).code == 1);

  const auto report = scratch() / "report.json";
  std::filesystem::remove(report);
  const auto to_file =
      write_file("to_file.spec", "group sl 2\nsurface disc 2\ncheck moment_equivariance samples=2 tol=1e-9\noutput " +
                                     report.string() + "\n");
  r = tool("run " + to_file.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(report);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(nlohmann::json::parse(buf.str())[0]["pass"] == true);

  const auto dash = write_file("dash.spec", "group sl 2\ncheck fission_axioms samples=2 tol=1e-9\noutput -\n");
  r = tool("run " + dash.string());
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)[0]["check_id"] == "fission_axioms");

  CHECK(tool("run " + write_file("syntax.spec", "group sl 2\nsurface dsic 4\n").string()).code == 2);
  CHECK(tool("run " + (scratch() / "missing.spec").string()).code == 2);
  CHECK(tool("run " + write_file("semantic.spec", "group sl 2\nsurface disc 4\ndecorate vertex 99 gstar\n").string())
            .code == 3);

  r = tool("list-checks");
  CHECK(r.code == 0);
  CHECK(r.out.find("restricted_morita") != std::string::npos);

  r = tool("dump-surface " + write_file("dump.spec", "group sl 2\nsurface disc 2\npreset surdec\nbuild double\n").string());
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["build"] == "double");
  CHECK(j["decorations"]["vertices"].size() == 3);
  CHECK(j.contains("surface"));
}

TEST_CASE("identical spec and seed give identical reports") {
  const auto spec = write_file("det.spec", "group sl 2\nsurface disc 3\n"
                                           "check quasi_poisson_identity samples=3 tol=1e-9\n"
                                           "check psi_poisson samples=3 tol=1e-8\n");
  ToolRun a = tool("run " + spec.string());
  ToolRun b = tool("run " + spec.string());
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  ToolRun c = tool("run " + spec.string(), "QPM_SEED=42");
  ToolRun d = tool("run " + spec.string(), "QPM_SEED=42");
  CHECK(c.out == d.out);
  CHECK(c.out != a.out);
  CHECK(nlohmann::json::parse(c.out)[0]["config"]["seed"] == 42);
  const auto seeded = write_file("seeded.spec", "group sl 2\nsurface disc 3\nseed 42\n"
                                                "check quasi_poisson_identity samples=3 tol=1e-9\n"
                                                "check psi_poisson samples=3 tol=1e-8\n");
  CHECK(tool("run " + seeded.string(), "QPM_SEED=7").out == c.out);
}
