#include "qpm/surface.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <set>

namespace qpm {

Word inverse_word(const Word& w) {
  Word r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back({it->id, -it->sign});
  return r;
}

Word reduce_word(const Word& w) {
  Word r;
  for (const Letter& l : w) {
    if (!r.empty() && r.back().id == l.id && r.back().sign == -l.sign)
      r.pop_back();
    else
      r.push_back(l);
  }
  return r;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return reduce_word(r);
}

int MarkedSurface::vertex_id(const std::string& name) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].name == name) return static_cast<int>(i);
  throw Error("no vertex named '" + name + "'");
}

int MarkedSurface::edge_id(const std::string& name) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].name == name) return static_cast<int>(i);
  throw Error("no edge named '" + name + "'");
}

std::vector<int> MarkedSurface::boundary_edges() const {
  std::vector<int> uses(edges.size(), 0);
  for (const Path& f : faces)
    for (const Letter& l : f) ++uses[l.id];
  std::vector<int> out;
  for (size_t e = 0; e < edges.size(); ++e)
    if (uses[e] == 1) out.push_back(static_cast<int>(e));
  return out;
}

std::vector<Path> MarkedSurface::boundary_letter_cycles() const {
  std::vector<int> bnd = boundary_edges();
  std::set<int> isb(bnd.begin(), bnd.end());
  std::vector<Letter> letters;
  for (const Path& f : faces)
    for (const Letter& l : f)
      if (isb.count(l.id)) letters.push_back(l);
  std::vector<bool> used(letters.size(), false);
  std::vector<Path> cycles;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (used[i]) continue;
    Path c;
    size_t cur = i;
    while (!used[cur]) {
      used[cur] = true;
      c.push_back(letters[cur]);
      int v = end(letters[cur]);
      size_t nxt = cur;
      for (size_t j = 0; j < letters.size(); ++j)
        if (!used[j] && start(letters[j]) == v) {
          nxt = j;
          break;
        }
      if (nxt == cur) break;
      cur = nxt;
    }
    cycles.push_back(c);
  }
  return cycles;
}

std::vector<std::vector<int>> MarkedSurface::boundary_cycles() const {
  std::vector<std::vector<int>> out;
  for (const Path& c : boundary_letter_cycles()) {
    std::vector<int> vs;
    for (const Letter& l : c) vs.push_back(start(l));
    out.push_back(vs);
  }
  return out;
}

std::vector<int> MarkedSurface::marked_vertices() const {
  std::vector<int> out;
  for (size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].marked) out.push_back(static_cast<int>(v));
  return out;
}

int MarkedSurface::euler_characteristic() const {
  return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(faces.size());
}

int MarkedSurface::num_components() const {
  std::vector<int> p(vertices.size());
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) { return p[x] == x ? x : p[x] = find(p[x]); };
  for (const Edge& e : edges) p[find(e.S)] = find(e.T);
  std::set<int> roots;
  for (size_t v = 0; v < vertices.size(); ++v) roots.insert(find(static_cast<int>(v)));
  return static_cast<int>(roots.size());
}

int MarkedSurface::rank_h1() const { return num_components() - euler_characteristic(); }

namespace {

struct Corner {
  HalfEdge in;
  HalfEdge out;
  int vertex;
};

std::vector<Corner> corners(const MarkedSurface& S) {
  std::vector<Corner> cs;
  for (const Path& f : S.faces) {
    const size_t N = f.size();
    for (size_t j = 0; j < N; ++j) {
      const Letter& a = f[j];
      const Letter& b = f[(j + 1) % N];
      cs.push_back({HalfEdge{a.id, a.sign > 0}, HalfEdge{b.id, b.sign < 0}, S.end(a)});
    }
  }
  return cs;
}

std::vector<HalfEdge> half_edges_at(const MarkedSurface& S, int v) {
  std::vector<HalfEdge> hs;
  for (size_t e = 0; e < S.edges.size(); ++e) {
    if (S.edges[e].S == v) hs.push_back({static_cast<int>(e), false});
    if (S.edges[e].T == v) hs.push_back({static_cast<int>(e), true});
  }
  return hs;
}

int he_key(const HalfEdge& h) { return 2 * h.edge + (h.at_target ? 1 : 0); }

}  // namespace

std::vector<HalfEdge> rotation(const MarkedSurface& S, int v) {
  std::map<int, HalfEdge> succ;
  std::set<int> has_pred;
  for (const Corner& c : corners(S)) {
    if (c.vertex != v) continue;
    succ[he_key(c.out)] = c.in;
    has_pred.insert(he_key(c.in));
  }
  std::vector<HalfEdge> hs = half_edges_at(S, v);
  if (hs.empty()) return {};
  HalfEdge start = hs.front();
  for (const HalfEdge& h : hs)
    if (!has_pred.count(he_key(h))) {
      start = h;
      break;
    }
  std::vector<HalfEdge> order;
  std::set<int> seen;
  HalfEdge cur = start;
  while (!seen.count(he_key(cur))) {
    seen.insert(he_key(cur));
    order.push_back(cur);
    auto it = succ.find(he_key(cur));
    if (it == succ.end()) break;
    cur = it->second;
  }
  if (order.size() != hs.size()) throw Error("vertex " + S.vertices[v].name + " does not have a disc-like link");
  return order;
}

void MarkedSurface::validate() const {
  std::vector<std::vector<int>> signs(edges.size());
  for (const Path& f : faces) {
    if (f.empty()) throw Error("empty face");
    for (size_t j = 0; j < f.size(); ++j)
      if (end(f[j]) != start(f[(j + 1) % f.size()])) throw Error("face is not a closed cycle");
    for (const Letter& l : f) signs[l.id].push_back(l.sign);
  }
  for (size_t e = 0; e < edges.size(); ++e) {
    if (signs[e].empty() || signs[e].size() > 2) throw Error("edge " + edges[e].name + " is not used by 1 or 2 faces");
    if (signs[e].size() == 2 && signs[e][0] == signs[e][1])
      throw Error("edge " + edges[e].name + " is not consistently oriented");
  }
  for (size_t v = 0; v < vertices.size(); ++v) rotation(*this, static_cast<int>(v));
  auto cycles = boundary_cycles();
  std::set<int> on_boundary;
  for (const auto& c : cycles) {
    bool any = false;
    for (int v : c) {
      on_boundary.insert(v);
      any = any || vertices[v].marked;
    }
    if (!any) throw Error("a boundary circle carries no marked point");
  }
  for (size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].marked && !on_boundary.count(static_cast<int>(v)))
      throw Error("marked vertex " + vertices[v].name + " is not on the boundary");
  // genus 0: chi = 2 - b on every component, summed
  const int b = static_cast<int>(cycles.size());
  if (euler_characteristic() != 2 * num_components() - b) throw Error("surface is not planar");
}

MarkedSurface disc(int k) {
  if (k < 1) throw Error("disc needs k >= 1");
  MarkedSurface S;
  S.family = Family::Disc;
  S.param = k;
  S.provenance = "disc(" + std::to_string(k) + ")";
  for (int i = 1; i <= k + 1; ++i) S.vertices.push_back({"v" + std::to_string(i), true});
  auto v = [](int i) { return i - 1; };
  for (int i = 1; i <= k; ++i) S.edges.push_back({"a" + std::to_string(i), v(i + 1), v(i)});
  S.edges.push_back({"a" + std::to_string(k + 1), v(1), v(k + 1)});
  for (int i = 1; i <= k; ++i) S.edges.push_back({"x" + std::to_string(i), v(i + 1), v(1)});
  auto a = [](int i) { return i - 1; };
  auto x = [k](int i) { return k + 1 + i - 1; };
  S.faces.push_back({{a(1), -1}, {x(1), +1}});
  for (int i = 1; i < k; ++i) S.faces.push_back({{x(i), -1}, {a(i + 1), -1}, {x(i + 1), +1}});
  S.faces.push_back({{a(k + 1), -1}, {x(k), -1}});
  return S;
}

namespace {

MarkedSurface doubled_disc(int k, Family fam, const std::string& prov) {
  MarkedSurface S;
  S.family = fam;
  S.param = k;
  S.provenance = prov;
  const int H = k + 1;
  for (int i = 1; i <= H; ++i) S.vertices.push_back({"b" + std::to_string(i), true});
  for (int i = 1; i <= H; ++i) S.vertices.push_back({"t" + std::to_string(i), true});
  auto b = [](int i) { return i - 1; };
  auto t = [H](int i) { return H + i - 1; };
  for (int i = 1; i <= k; ++i) S.edges.push_back({"g" + std::to_string(i), b(i + 1), b(i)});
  for (int i = 1; i <= k; ++i) S.edges.push_back({"h" + std::to_string(i), t(i + 1), t(i)});
  for (int i = 1; i <= H; ++i) S.edges.push_back({"L" + std::to_string(i), b(i), t(i)});
  for (int i = 1; i <= H; ++i) S.edges.push_back({"R" + std::to_string(i), b(i), t(i)});
  auto g = [](int i) { return i - 1; };
  auto h = [k](int i) { return k + i - 1; };
  auto Lr = [k](int i) { return 2 * k + i - 1; };
  auto Rr = [k, H](int i) { return 2 * k + H + i - 1; };
  for (int i = 1; i <= k; ++i) S.faces.push_back({{g(i), -1}, {Lr(i + 1), +1}, {h(i), +1}, {Rr(i), -1}});
  Path outer;
  for (int i = k; i >= 1; --i) outer.push_back({g(i), +1});
  outer.push_back({Lr(1), +1});
  for (int i = 1; i <= k; ++i) outer.push_back({h(i), -1});
  outer.push_back({Rr(H), -1});
  S.faces.push_back(outer);
  return S;
}

}  // namespace

MarkedSurface double_along_arcs(const MarkedSurface& S) {
  if (S.family != Family::Disc) throw UnsupportedFamily("double_along_arcs is implemented for discs only");
  return doubled_disc(S.param, Family::Double, "double(" + S.provenance + ")");
}

MarkedSurface topological_double(const MarkedSurface& S) {
  if (S.family != Family::Disc) throw UnsupportedFamily("topological_double is implemented for discs only");
  return doubled_disc(S.param, Family::TopologicalDouble, "topological-double(" + S.provenance + ")");
}

MarkedSurface glue(const MarkedSurface& S1, const MarkedSurface& S2, const std::vector<std::pair<int, int>>& pairs,
                   const std::vector<std::string>& unmark) {
  std::vector<int> b1 = S1.boundary_edges(), b2 = S2.boundary_edges();
  std::set<int> B1(b1.begin(), b1.end()), B2(b2.begin(), b2.end());
  std::set<int> used1, used2;
  for (auto [e1, e2] : pairs) {
    if (!B1.count(e1) || !B2.count(e2)) throw IncompatibleGluing("glued edges must be boundary edges");
    if (!used1.insert(e1).second || !used2.insert(e2).second) throw IncompatibleGluing("an edge is glued twice");
  }
  auto face_sign = [](const MarkedSurface& S, int e) {
    for (const Path& f : S.faces)
      for (const Letter& l : f)
        if (l.id == e) return l.sign;
    return 0;
  };
  for (auto [e1, e2] : pairs)
    if (face_sign(S1, e1) != face_sign(S2, e2))
      throw IncompatibleGluing("edge orientations do not allow an oriented gluing");

  const int n1 = static_cast<int>(S1.vertices.size());
  const int nv = n1 + static_cast<int>(S2.vertices.size());
  std::vector<int> p(nv);
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) { return p[x] == x ? x : p[x] = find(p[x]); };
  auto unite = [&](int a, int c) { p[find(a)] = find(c); };
  for (auto [e1, e2] : pairs) {
    unite(S1.edges[e1].T, n1 + S2.edges[e2].S);
    unite(S1.edges[e1].S, n1 + S2.edges[e2].T);
  }
  std::map<int, int> newid;
  MarkedSurface R;
  for (int v = 0; v < nv; ++v) {
    int r = find(v);
    if (!newid.count(r)) {
      newid[r] = static_cast<int>(R.vertices.size());
      R.vertices.push_back({"", true});
    }
    std::string nm = v < n1 ? "A." + S1.vertices[v].name : "B." + S2.vertices[v - n1].name;
    std::string& cur = R.vertices[newid[r]].name;
    cur = cur.empty() ? nm : cur + "~" + nm;
  }
  auto vid = [&](int v) { return newid[find(v)]; };
  std::vector<int> map1(S1.edges.size()), map2(S2.edges.size(), -1);
  for (size_t e = 0; e < S1.edges.size(); ++e) {
    map1[e] = static_cast<int>(R.edges.size());
    R.edges.push_back({"A." + S1.edges[e].name, vid(S1.edges[e].S), vid(S1.edges[e].T)});
  }
  std::map<int, int> glued_to;
  for (auto [e1, e2] : pairs) glued_to[e2] = e1;
  for (size_t e = 0; e < S2.edges.size(); ++e) {
    if (glued_to.count(static_cast<int>(e))) continue;
    map2[e] = static_cast<int>(R.edges.size());
    R.edges.push_back({"B." + S2.edges[e].name, vid(n1 + S2.edges[e].S), vid(n1 + S2.edges[e].T)});
  }
  for (const Path& f : S1.faces) {
    Path g;
    for (const Letter& l : f) g.push_back({map1[l.id], l.sign});
    R.faces.push_back(g);
  }
  for (const Path& f : S2.faces) {
    Path g;
    for (const Letter& l : f) {
      auto it = glued_to.find(l.id);
      if (it != glued_to.end())
        g.push_back({map1[it->second], -l.sign});
      else
        g.push_back({map2[l.id], l.sign});
    }
    R.faces.push_back(g);
  }
  R.family = pairs.empty() ? Family::Union : Family::Glued;
  R.provenance = "glue(" + S1.provenance + "," + S2.provenance + ")";

  std::set<int> on_boundary;
  for (const auto& c : R.boundary_cycles())
    for (int v : c) on_boundary.insert(v);
  for (size_t v = 0; v < R.vertices.size(); ++v)
    if (!on_boundary.count(static_cast<int>(v))) R.vertices[v].marked = false;
  for (const std::string& nm : unmark) R.vertices[R.vertex_id(nm)].marked = false;
  for (const auto& c : R.boundary_cycles()) {
    bool any = false;
    for (int v : c) any = any || R.vertices[v].marked;
    if (!any) throw IncompatibleGluing("a boundary circle of the glued surface has no marked point left");
  }
  return R;
}

MarkedSurface relabel(const MarkedSurface& S, const std::map<std::string, std::pair<std::string, bool>>& edge_map) {
  MarkedSurface R = S;
  R.family = Family::Relabeled;
  std::vector<bool> flip(S.edges.size(), false);
  for (size_t e = 0; e < S.edges.size(); ++e) {
    auto it = edge_map.find(S.edges[e].name);
    if (it == edge_map.end()) continue;
    R.edges[e].name = it->second.first;
    if (it->second.second) {
      std::swap(R.edges[e].S, R.edges[e].T);
      flip[e] = true;
    }
  }
  for (Path& f : R.faces)
    for (Letter& l : f)
      if (flip[l.id]) l.sign = -l.sign;
  return R;
}

Involution copy_swap(const MarkedSurface& S) {
  if (S.family != Family::Double && S.family != Family::TopologicalDouble)
    throw UnsupportedFamily("copy swap is defined on doubled discs");
  const int k = S.param, H = k + 1;
  Involution inv;
  inv.vertex_map.resize(S.vertices.size());
  for (int i = 0; i < H; ++i) {
    inv.vertex_map[i] = H + i;
    inv.vertex_map[H + i] = i;
  }
  inv.edge_map.resize(S.edges.size());
  for (int i = 0; i < k; ++i) {
    inv.edge_map[i] = {k + i, +1};
    inv.edge_map[k + i] = {i, +1};
  }
  for (int i = 2 * k; i < static_cast<int>(S.edges.size()); ++i) inv.edge_map[i] = {i, -1};
  return inv;
}

bool is_orientation_reversing_automorphism(const MarkedSurface& S, const Involution& inv) {
  for (size_t e = 0; e < S.edges.size(); ++e) {
    Letter im = inv.edge_map[e];
    int s = S.start(im), t = S.end(im);
    if (s != inv.vertex_map[S.edges[e].S] || t != inv.vertex_map[S.edges[e].T]) return false;
  }
  auto same_cycle = [](const Path& a, const Path& b) {
    if (a.size() != b.size()) return false;
    for (size_t r = 0; r < a.size(); ++r) {
      bool ok = true;
      for (size_t j = 0; j < a.size() && ok; ++j) ok = a[j] == b[(j + r) % b.size()];
      if (ok) return true;
    }
    return false;
  };
  for (const Path& f : S.faces) {
    Path img;
    for (const Letter& l : f) img.push_back({inv.edge_map[l.id].id, inv.edge_map[l.id].sign * l.sign});
    Path rev = inverse_word(img);
    bool found = false;
    for (const Path& g : S.faces) found = found || same_cycle(rev, g);
    if (!found) return false;
  }
  return true;
}

Skeleton make_skeleton(const MarkedSurface& S, const std::vector<int>& edges) {
  Skeleton sk;
  sk.vertices = S.marked_vertices();
  sk.edges = edges;
  std::set<int> in(edges.begin(), edges.end());
  for (int v : sk.vertices) {
    std::vector<HalfEdge> ord;
    for (const HalfEdge& h : rotation(S, v))
      if (in.count(h.edge)) ord.push_back(h);
    sk.half_edge_order[v] = ord;
  }
  return sk;
}

Skeleton default_skeleton(const MarkedSurface& S) {
  std::vector<int> es;
  const int k = S.param;
  switch (S.family) {
    case Family::Disc:
      for (int i = 1; i <= k; ++i) es.push_back(S.edge_id("x" + std::to_string(i)));
      break;
    case Family::Double:
    case Family::TopologicalDouble:
      for (int i = 1; i <= k; ++i) es.push_back(S.edge_id("g" + std::to_string(i)));
      for (int i = 1; i <= k; ++i) es.push_back(S.edge_id("h" + std::to_string(i)));
      for (int i = 1; i <= k + 1; ++i) es.push_back(S.edge_id("R" + std::to_string(i)));
      break;
    default: throw UnsupportedFamily("no catalogued skeleton for " + S.provenance);
  }
  return make_skeleton(S, es);
}

int skeleton_cycle_rank(const MarkedSurface& S, const Skeleton& sk) {
  return static_cast<int>(sk.edges.size()) - static_cast<int>(sk.vertices.size()) + S.num_components();
}

Word path_word(const Presentation& P, const Path& p) {
  Word w;
  for (const Letter& l : p) {
    Word e = l.sign > 0 ? P.edge_words[l.id] : inverse_word(P.edge_words[l.id]);
    w.insert(w.begin(), e.begin(), e.end());
  }
  return reduce_word(w);
}

Presentation present(const MarkedSurface& S, const std::vector<int>& generators) {
  Presentation P;
  P.generators = generators;
  const int ne = static_cast<int>(S.edges.size());
  std::vector<std::optional<Word>> known(ne);
  for (size_t g = 0; g < generators.size(); ++g) known[generators[g]] = Word{{static_cast<int>(g), +1}};

  // gauge-fix a forest reaching every unmarked vertex
  std::vector<bool> reached(S.vertices.size(), false);
  for (size_t v = 0; v < S.vertices.size(); ++v) reached[v] = S.vertices[v].marked;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int e = 0; e < ne; ++e) {
      if (known[e]) continue;
      int a = S.edges[e].S, b = S.edges[e].T;
      if (reached[a] != reached[b]) {
        known[e] = Word{};
        P.gauge_fixed.push_back(e);
        reached[a] = reached[b] = true;
        grew = true;
      }
    }
  }

  std::vector<bool> face_used(S.faces.size(), false);
  auto snapshot = [&]() {
    P.edge_words.assign(ne, Word{});
    for (int e = 0; e < ne; ++e)
      if (known[e]) P.edge_words[e] = *known[e];
  };
  while (true) {
    bool progress = false;
    for (size_t fi = 0; fi < S.faces.size(); ++fi) {
      if (face_used[fi]) continue;
      const Path& f = S.faces[fi];
      int unknown = 0, pos = -1;
      for (size_t j = 0; j < f.size(); ++j)
        if (!known[f[j].id]) {
          ++unknown;
          pos = static_cast<int>(j);
        }
      if (unknown != 1) continue;
      snapshot();
      Path after(f.begin() + pos + 1, f.end());
      Path before(f.begin(), f.begin() + pos);
      Word x = concat(inverse_word(path_word(P, after)), inverse_word(path_word(P, before)));
      known[f[pos].id] = f[pos].sign > 0 ? x : inverse_word(x);
      face_used[fi] = true;
      progress = true;
    }
    if (progress) continue;
    int missing = -1;
    for (int e = 0; e < ne && missing < 0; ++e)
      if (!known[e]) missing = e;
    if (missing < 0) break;
    known[missing] = Word{{static_cast<int>(P.generators.size()), +1}};
    P.generators.push_back(missing);
  }
  snapshot();
  for (size_t fi = 0; fi < S.faces.size(); ++fi) {
    if (face_used[fi]) continue;
    Word r = path_word(P, S.faces[fi]);
    if (!r.empty()) P.relations.push_back(r);
  }
  return P;
}

Presentation present(const MarkedSurface& S, const Skeleton& sk) { return present(S, sk.edges); }

Triangulation triangulate(const MarkedSurface& S, const std::map<int, int>& starts) {
  Triangulation T;
  T.num_vertices = static_cast<int>(S.vertices.size());
  for (size_t fi = 0; fi < S.faces.size(); ++fi) {
    const Path& f0 = S.faces[fi];
    const int N = static_cast<int>(f0.size());
    if (N < 3) continue;
    int s = 0;
    auto it = starts.find(static_cast<int>(fi));
    if (it != starts.end()) {
      s = it->second % N;
    } else {
      for (int j = 1; j < N; ++j)
        if (S.start(f0[j]) < S.start(f0[s])) s = j;
    }
    Path f(f0.begin() + s, f0.end());
    f.insert(f.end(), f0.begin(), f0.begin() + s);
    for (int j = 1; j <= N - 2; ++j) {
      Triangle tr;
      tr.face = static_cast<int>(fi);
      tr.side[0] = Path(f.begin(), f.begin() + j);
      tr.side[1] = Path{f[j]};
      tr.side[2] = Path(f.begin() + j + 1, f.end());
      T.triangles.push_back(tr);
    }
    T.num_diagonals += N - 3;
  }
  T.num_edges = static_cast<int>(S.edges.size()) + T.num_diagonals;
  for (size_t v = 0; v < S.vertices.size(); ++v)
    if (!S.vertices[v].marked) T.interior_vertices.push_back(static_cast<int>(v));
  return T;
}

nlohmann::json surface_to_json(const MarkedSurface& S) {
  nlohmann::json j;
  j["provenance"] = S.provenance;
  for (const Vertex& v : S.vertices) j["vertices"].push_back({{"name", v.name}, {"marked", v.marked}});
  for (const Edge& e : S.edges)
    j["edges"].push_back({{"name", e.name}, {"S", S.vertices[e.S].name}, {"T", S.vertices[e.T].name}});
  for (const Path& f : S.faces) {
    nlohmann::json jf = nlohmann::json::array();
    for (const Letter& l : f) jf.push_back({S.edges[l.id].name, l.sign});
    j["faces"].push_back(jf);
  }
  for (const auto& c : S.boundary_cycles()) {
    nlohmann::json jc = nlohmann::json::array();
    for (int v : c) jc.push_back(S.vertices[v].name);
    j["boundary_cycles"].push_back(jc);
  }
  j["euler_characteristic"] = S.euler_characteristic();
  return j;
}

nlohmann::json skeleton_to_json(const MarkedSurface& S, const Skeleton& sk, const Presentation& P) {
  nlohmann::json j;
  for (int e : sk.edges) j["skeleton_edges"].push_back(S.edges[e].name);
  for (const auto& [v, ord] : sk.half_edge_order) {
    nlohmann::json jo = nlohmann::json::array();
    for (const HalfEdge& h : ord) jo.push_back({S.edges[h.edge].name, h.at_target ? "T" : "S"});
    j["half_edge_order"][S.vertices[v].name] = jo;
  }
  auto word_str = [&](const Word& w) {
    std::string s;
    for (const Letter& l : w) {
      if (!s.empty()) s += " ";
      s += S.edges[P.generators[l.id]].name;
      if (l.sign < 0) s += "^-1";
    }
    return s.empty() ? std::string("1") : s;
  };
  for (int e : S.boundary_edges()) j["boundary_words"][S.edges[e].name] = word_str(P.edge_words[e]);
  for (const Word& r : P.relations) j["relations"].push_back(word_str(r));
  return j;
}

}  // namespace qpm
