#pragma once

#include "qpm/surface.hpp"
#include "qpm/verify.hpp"

#include <json.hpp>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qpm {

/// Malformed line; `expected` names what the tokenizer was looking for.
struct SyntaxError : Error {
  SyntaxError(int line, int col, std::string expected);
  int line;
  int col;
  std::string expected;
};

/// Well-formed but meaningless input, such as an unknown vertex or a second
/// group directive. `line` is 0 for whole-file conditions.
struct SemanticError : Error {
  SemanticError(int line, const std::string& what);
  int line;
};

struct VertexDecoration {
  int vertex = 0;   ///< 1-based, v_i of the disc
  std::string tag;  ///< gstar, gstar-dual or btilde+
  bool operator==(const VertexDecoration&) const = default;
};

struct EdgeDecoration {
  int edge = 0;      ///< 1-based index into the disc's edge list
  std::string kind;  ///< G, B- or bruhat
  std::string word;  ///< one-line permutation for bruhat, empty otherwise
  bool operator==(const EdgeDecoration&) const = default;
};

struct CheckDirective {
  std::string id;
  int samples = 0;
  double tol = 0;
  std::optional<double> fd;
  int split = 0;
  bool mutate = false;
  int line = 0;
  bool operator==(const CheckDirective& o) const {
    return id == o.id && samples == o.samples && tol == o.tol && fd == o.fd && split == o.split && mutate == o.mutate;
  }
};

struct SpecFile {
  int group_n = 0;
  int disc_k = 0;  ///< 0 when no surface directive was given
  std::vector<VertexDecoration> vertices;
  std::vector<EdgeDecoration> edges;
  std::string build;  ///< empty, "double" or "topological-double"
  std::optional<std::uint64_t> seed;
  std::vector<CheckDirective> checks;
  std::optional<std::string> output;
  bool operator==(const SpecFile&) const = default;
};

/// Single pass over the lines of `text`; throws SyntaxError or SemanticError.
SpecFile parse_spec(const std::string& text);
/// Canonical text; parse_spec(print_spec(s)) == s.
std::string print_spec(const SpecFile& s);

/// The surface the checks run on (the disc, or its double).
MarkedSurface build_surface(const SpecFile& s);
nlohmann::json dump_surface(const SpecFile& s);

/// One CheckConfig per check directive; the seed defaults to `default_seed`.
std::vector<CheckConfig> check_configs(const SpecFile& s, std::uint64_t default_seed);

struct ExecResult {
  int exit_code = 0;  ///< 0 all pass, 1 a check failed, 3 semantic, 4 construction
  nlohmann::json reports = nlohmann::json::array();
  std::string error;
};

/// Runs the checks in order. Reports are written to the output directive
/// ("-" or no directive means `out`).
ExecResult execute(const SpecFile& s, std::uint64_t default_seed, std::ostream& out, bool with_runtime = false);

}  // namespace qpm
