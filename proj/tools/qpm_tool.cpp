// Command-line driver: run spec files, list the checks, dump surfaces.

#include "qpm/spec_file.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

// Reads and parses a spec file; returns the exit code on failure.
int load(const std::string& path, qpm::SpecFile& out) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot read " << path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    out = qpm::parse_spec(buf.str());
  } catch (const qpm::SyntaxError& e) {
    std::cerr << path << ": syntax error: " << e.what() << "\n";
    return 2;
  } catch (const qpm::SemanticError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 3;
  }
  return 0;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("QPM_SEED");
  std::uint64_t v = 1;
  if (env) {
    const std::string s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      std::cerr << "warning: ignoring QPM_SEED='" << s << "' (not an unsigned integer)\n";
      v = 1;
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decorated moduli spaces of flat SL(n) connections: numerical verification driver"};
  app.require_subcommand(1);

  std::string spec_path;
  bool timing = false;
  auto* run = app.add_subcommand("run", "run the checks of a spec file and write the JSON report array");
  run->add_option("spec", spec_path, "spec file")->required();
  run->add_flag("--timing", timing, "add runtime_ms to each report (reports are then no longer byte-identical)");

  auto* list = app.add_subcommand("list-checks", "print the check catalog");

  std::string dump_path;
  auto* dump = app.add_subcommand("dump-surface", "print the built surface and decorations as JSON");
  dump->add_option("spec", dump_path, "spec file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*list) {
    for (const qpm::CheckInfo& c : qpm::catalog())
      std::cout << c.id << "\t" << qpm::surface_kind_name(c.surface) << "\t" << c.summary << "\t" << c.defect << "\n";
    return 0;
  }

  if (*dump) {
    qpm::SpecFile s;
    if (int rc = load(dump_path, s)) return rc;
    try {
      std::cout << qpm::dump_surface(s).dump(2) << "\n";
    } catch (const qpm::SemanticError& e) {
      std::cerr << dump_path << ": " << e.what() << "\n";
      return 3;
    }
    return 0;
  }

  qpm::SpecFile s;
  if (int rc = load(spec_path, s)) return rc;
  qpm::ExecResult r = qpm::execute(s, default_seed(), std::cout, timing);
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  return r.exit_code;
}
