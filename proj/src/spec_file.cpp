#include "qpm/spec_file.hpp"

#include "qpm/double_groupoid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace qpm {

SyntaxError::SyntaxError(int line_, int col_, std::string expected_)
    : Error("line " + std::to_string(line_) + ", column " + std::to_string(col_) + ": expected " + expected_),
      line(line_),
      col(col_),
      expected(std::move(expected_)) {}

SemanticError::SemanticError(int line_, const std::string& what)
    : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what : what), line(line_) {}

namespace {

struct Token {
  std::string text;
  int col = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

template <class T>
bool parse_int(const std::string& s, T& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_float(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

const char* const kDirectives = "a directive (group, surface, decorate, preset, build, seed, check, output)";

class Parser {
 public:
  SpecFile run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      toks_ = tokenize(raw);
      end_col_ = static_cast<int>(raw.size()) + 1;
      if (toks_.empty()) continue;
      directive(raw);
    }
    finish();
    return s_;
  }

 private:
  SpecFile s_;
  std::vector<Token> toks_;
  int line_ = 0;
  int end_col_ = 1;
  int group_line_ = 0, surface_line_ = 0, build_line_ = 0, seed_line_ = 0, output_line_ = 0;
  std::set<int> decorated_vertices_, decorated_edges_;

  [[noreturn]] void expected(std::size_t i, const std::string& what) const {
    throw SyntaxError(line_, i < toks_.size() ? toks_[i].col : end_col_, what);
  }
  const std::string& need(std::size_t i, const std::string& what) const {
    if (i >= toks_.size()) expected(i, what);
    return toks_[i].text;
  }
  void keyword(std::size_t i, const std::string& kw) const {
    if (need(i, "'" + kw + "'") != kw) expected(i, "'" + kw + "'");
  }
  int integer(std::size_t i) const {
    int v = 0;
    if (!parse_int(need(i, "an integer"), v)) expected(i, "an integer");
    return v;
  }
  void end_of_line(std::size_t i) const {
    if (i < toks_.size()) expected(i, "end of line");
  }
  void once(int& seen, const char* what) const {
    if (seen) throw SemanticError(line_, std::string("duplicate ") + what + " directive (first on line " +
                                             std::to_string(seen) + ")");
    seen = line_;
  }
  void need_surface(const char* what) const {
    if (!s_.disc_k) throw SemanticError(line_, std::string(what) + " before the surface directive");
  }

  void directive(const std::string& raw) {
    const std::string& head = toks_[0].text;
    if (head == "group") group();
    else if (head == "surface") surface();
    else if (head == "decorate") decorate();
    else if (head == "preset") preset();
    else if (head == "build") build();
    else if (head == "seed") seed();
    else if (head == "check") check();
    else if (head == "output") output(raw);
    else expected(0, kDirectives);
  }

  void group() {
    keyword(1, "sl");
    const int n = integer(2);
    end_of_line(3);
    once(group_line_, "group");
    if (n < 2 || n > 4) throw SemanticError(line_, "sl n needs 2 <= n <= 4");
    s_.group_n = n;
  }

  void surface() {
    keyword(1, "disc");
    const int k = integer(2);
    end_of_line(3);
    once(surface_line_, "surface");
    if (k < 1) throw SemanticError(line_, "a disc needs at least one marked vertex pair (k >= 1)");
    s_.disc_k = k;
  }

  int edge_count() const { return static_cast<int>(disc(s_.disc_k).edges.size()); }

  void decorate() {
    const std::string& what = need(1, "'vertex' or 'edge'");
    if (what == "vertex") {
      const int v = integer(2);
      const std::string& tag = need(3, "gstar, gstar-dual or btilde+");
      if (tag != "gstar" && tag != "gstar-dual" && tag != "btilde+") expected(3, "gstar, gstar-dual or btilde+");
      end_of_line(4);
      need_surface("decoration");
      add_vertex(v, tag);
    } else if (what == "edge") {
      const int e = integer(2);
      const std::string& kind = need(3, "G, B- or bruhat");
      EdgeDecoration d{e, kind, ""};
      std::size_t next = 4;
      if (kind == "bruhat") {
        d.word = need(4, "a permutation word");
        next = 5;
      } else if (kind != "G" && kind != "B-") {
        expected(3, "G, B- or bruhat");
      }
      end_of_line(next);
      need_surface("decoration");
      if (e < 1 || e > edge_count())
        throw SemanticError(line_, "unknown edge " + std::to_string(e) + " (disc " + std::to_string(s_.disc_k) +
                                       " has " + std::to_string(edge_count()) + " edges)");
      if (!decorated_edges_.insert(e).second) throw SemanticError(line_, "edge " + std::to_string(e) + " decorated twice");
      if (kind == "bruhat") check_word(d.word);
      s_.edges.push_back(d);
    } else {
      expected(1, "'vertex' or 'edge'");
    }
  }

  void check_word(const std::string& w) const {
    if (!s_.group_n) throw SemanticError(line_, "bruhat word before the group directive");
    if (static_cast<int>(w.size()) != s_.group_n)
      throw SemanticError(line_, "bruhat word '" + w + "' must have length " + std::to_string(s_.group_n));
    std::set<char> seen(w.begin(), w.end());
    bool ok = static_cast<int>(seen.size()) == s_.group_n;
    for (char ch : w) ok = ok && ch >= '1' && ch < '1' + s_.group_n;
    if (!ok) throw SemanticError(line_, "bruhat word '" + w + "' is not a permutation of 1.." + std::to_string(s_.group_n));
  }

  void add_vertex(int v, const std::string& tag) {
    if (v < 1 || v > s_.disc_k + 1)
      throw SemanticError(line_, "unknown vertex " + std::to_string(v) + " (disc " + std::to_string(s_.disc_k) +
                                     " has vertices 1.." + std::to_string(s_.disc_k + 1) + ")");
    if (!decorated_vertices_.insert(v).second)
      throw SemanticError(line_, "vertex " + std::to_string(v) + " decorated twice");
    s_.vertices.push_back({v, tag});
  }

  void preset() {
    const std::string& name = need(1, "a preset name (surdec)");
    if (name != "surdec") expected(1, "a preset name (surdec)");
    end_of_line(2);
    need_surface("preset");
    for (int v = 1; v <= s_.disc_k + 1; ++v)
      add_vertex(v, v == 1 ? "gstar" : v == s_.disc_k + 1 ? "gstar-dual" : "btilde+");
  }

  void build() {
    const std::string& kind = need(1, "double or topological-double");
    if (kind != "double" && kind != "topological-double") expected(1, "double or topological-double");
    end_of_line(2);
    once(build_line_, "build");
    need_surface("build");
    s_.build = kind;
  }

  void seed() {
    std::uint64_t v = 0;
    if (!parse_int(need(1, "an unsigned 64-bit integer"), v)) expected(1, "an unsigned 64-bit integer");
    end_of_line(2);
    once(seed_line_, "seed");
    s_.seed = v;
  }

  void check() {
    CheckDirective c;
    c.id = need(1, "a check id");
    c.line = line_;
    bool have_samples = false, have_tol = false;
    std::set<std::string> keys;
    for (std::size_t i = 2; i < toks_.size(); ++i) {
      const std::string& t = toks_[i].text;
      if (t == "mutate") {
        if (!keys.insert(t).second) expected(i, "an option not given before");
        c.mutate = true;
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) expected(i, "samples=, tol=, fd=, split= or mutate");
      const std::string key = t.substr(0, eq), val = t.substr(eq + 1);
      if (!keys.insert(key).second) expected(i, "an option not given before");
      if (key == "samples") {
        if (!parse_int(val, c.samples)) expected(i, "samples=<integer>");
        have_samples = true;
      } else if (key == "tol") {
        if (!parse_float(val, c.tol)) expected(i, "tol=<float>");
        have_tol = true;
      } else if (key == "fd") {
        double f = 0;
        if (!parse_float(val, f)) expected(i, "fd=<float>");
        c.fd = f;
      } else if (key == "split") {
        if (!parse_int(val, c.split)) expected(i, "split=<integer>");
      } else {
        expected(i, "samples=, tol=, fd=, split= or mutate");
      }
    }
    if (!have_samples) expected(toks_.size(), "samples=<N>");
    if (!have_tol) expected(toks_.size(), "tol=<float>");
    const auto ids = check_ids();
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) throw SemanticError(line_, "unknown check " + c.id);
    s_.checks.push_back(c);
  }

  void output(const std::string& raw) {
    if (toks_.size() < 2) expected(1, "an output path");
    once(output_line_, "output");
    // The path runs to the end of the line (a trailing comment is not part of it).
    std::string path = raw.substr(toks_[1].col - 1);
    const auto hash = path.find('#');
    if (hash != std::string::npos) path = path.substr(0, hash);
    while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back()))) path.pop_back();
    s_.output = path;
  }

  void finish() const {
    if (!s_.group_n) throw SemanticError(0, "missing group directive");
    for (const CheckDirective& c : s_.checks) {
      const CheckInfo& info = find_check(c.id);
      if (info.surface == SurfaceKind::None) continue;
      if (!s_.disc_k) throw SemanticError(c.line, c.id + " needs a surface directive");
      if (s_.build == "topological-double")
        throw SemanticError(c.line, c.id + " does not run on a topological double");
      if (info.surface == SurfaceKind::Double && s_.build != "double")
        throw SemanticError(c.line, c.id + " runs on a doubled disc and needs 'build double'");
      if (info.surface == SurfaceKind::Disc && !s_.build.empty() && !info.any_surface)
        throw SemanticError(c.line, c.id + " runs on the plain disc and takes no build directive");
      if (c.id == "psi_poisson" && !s_.vertices.empty()) {
        for (const VertexDecoration& v : s_.vertices) {
          const std::string want = v.vertex == 1 ? "gstar" : v.vertex == s_.disc_k + 1 ? "gstar-dual" : "btilde+";
          if (v.tag != want)
            throw SemanticError(c.line, "psi_poisson needs the surdec decoration (vertex " + std::to_string(v.vertex) +
                                            " is " + v.tag + ")");
        }
      }
    }
  }
};

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SpecFile parse_spec(const std::string& text) { return Parser().run(text); }

std::string print_spec(const SpecFile& s) {
  std::ostringstream o;
  o << "group sl " << s.group_n << "\n";
  if (s.disc_k) o << "surface disc " << s.disc_k << "\n";
  for (const VertexDecoration& v : s.vertices) o << "decorate vertex " << v.vertex << " " << v.tag << "\n";
  for (const EdgeDecoration& e : s.edges) {
    o << "decorate edge " << e.edge << " " << e.kind;
    if (e.kind == "bruhat") o << " " << e.word;
    o << "\n";
  }
  if (!s.build.empty()) o << "build " << s.build << "\n";
  if (s.seed) o << "seed " << *s.seed << "\n";
  for (const CheckDirective& c : s.checks) {
    o << "check " << c.id << " samples=" << c.samples << " tol=" << format_double(c.tol);
    if (c.fd) o << " fd=" << format_double(*c.fd);
    if (c.split) o << " split=" << c.split;
    if (c.mutate) o << " mutate";
    o << "\n";
  }
  if (s.output) o << "output " << *s.output << "\n";
  return o.str();
}

MarkedSurface build_surface(const SpecFile& s) {
  if (!s.disc_k) throw SemanticError(0, "no surface directive");
  MarkedSurface d = disc(s.disc_k);
  if (s.build == "double") return double_along_arcs(d);
  if (s.build == "topological-double") return topological_double(d);
  return d;
}

nlohmann::json dump_surface(const SpecFile& s) {
  nlohmann::json j;
  j["group"] = "sl" + std::to_string(s.group_n);
  j["build"] = s.build.empty() ? "none" : s.build;
  j["surface"] = surface_to_json(build_surface(s));
  nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array();
  for (const VertexDecoration& v : s.vertices) vs.push_back({{"vertex", "v" + std::to_string(v.vertex)}, {"tag", v.tag}});
  for (const EdgeDecoration& e : s.edges) {
    nlohmann::json d = {{"edge", e.edge}, {"kind", e.kind}};
    if (e.kind == "bruhat") d["word"] = e.word;
    es.push_back(d);
  }
  j["decorations"] = {{"vertices", vs}, {"edges", es}};
  return j;
}

std::vector<CheckConfig> check_configs(const SpecFile& s, std::uint64_t default_seed) {
  std::vector<CheckConfig> out;
  for (const CheckDirective& d : s.checks) {
    const CheckInfo& info = find_check(d.id);
    CheckConfig c;
    c.check_id = d.id;
    c.group_n = s.group_n;
    c.surface = info.surface == SurfaceKind::None ? SurfaceKind::None
                : s.build == "double"             ? SurfaceKind::Double
                                                  : SurfaceKind::Disc;
    c.surface_k = s.disc_k ? s.disc_k : 2;
    c.split = d.split;
    c.samples = d.samples;
    c.tol = d.tol;
    if (d.fd) c.fd_step = *d.fd;
    c.seed = s.seed.value_or(default_seed);
    c.mutate = d.mutate;
    out.push_back(c);
  }
  return out;
}

ExecResult execute(const SpecFile& s, std::uint64_t default_seed, std::ostream& out, bool with_runtime) {
  ExecResult r;
  bool all_pass = true;
  try {
    for (const CheckConfig& c : check_configs(s, default_seed)) {
      Report rep = run_check(c);
      all_pass = all_pass && rep.pass;
      r.reports.push_back(to_json(rep, with_runtime));
    }
  } catch (const ConstructionFailed& e) {
    r.exit_code = 4;
    r.error = e.what();
    return r;
  } catch (const Error& e) {
    r.exit_code = 3;
    r.error = e.what();
    return r;
  }
  const std::string text = r.reports.dump(2) + "\n";
  if (!s.output || *s.output == "-") {
    out << text;
  } else {
    std::ofstream f(*s.output);
    if (!(f << text)) {
      r.exit_code = 2;
      r.error = "cannot write " + *s.output;
      return r;
    }
  }
  r.exit_code = all_pass ? 0 : 1;
  return r;
}

}  // namespace qpm
