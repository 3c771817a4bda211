#include <doctest.h>

#include "qpm/surface.hpp"

#include <set>

using namespace qpm;

namespace {

std::string word_names(const MarkedSurface& S, const Presentation& P, const Word& w) {
  std::string s;
  for (const Letter& l : w) {
    if (!s.empty()) s += " ";
    s += S.edges[P.generators[l.id]].name + (l.sign < 0 ? "^-1" : "");
  }
  return s;
}

}  // namespace

TEST_CASE("disc(k) counts and orientation") {
  for (int k = 1; k <= 6; ++k) {
    MarkedSurface S = disc(k);
    CHECK_NOTHROW(S.validate());
    CHECK(S.vertices.size() == size_t(k + 1));
    CHECK(S.boundary_edges().size() == size_t(k + 1));
    CHECK(S.euler_characteristic() == 1);
    CHECK(S.boundary_cycles().size() == 1);
    CHECK(S.rank_h1() == 0);
  }
  MarkedSurface S = disc(2);
  CHECK(S.marked_vertices().size() == 3);
  CHECK(S.edges[S.edge_id("a1")].T == S.vertex_id("v1"));
  CHECK(S.edges[S.edge_id("a1")].S == S.vertex_id("v2"));
  // boundary circle read with the surface on the left: v1, v2, v3
  auto c = S.boundary_cycles().front();
  auto it = std::find(c.begin(), c.end(), S.vertex_id("v1"));
  std::rotate(c.begin(), it, c.end());
  CHECK(c == std::vector<int>{0, 1, 2});
}

TEST_CASE("disc(4) star edges all end at v1 in rotation order") {
  MarkedSurface S = disc(4);
  int v1 = S.vertex_id("v1");
  for (int i = 1; i <= 4; ++i) CHECK(S.edges[S.edge_id("x" + std::to_string(i))].T == v1);
  auto rot = rotation(S, v1);
  std::vector<std::string> names;
  for (const HalfEdge& h : rot) names.push_back(S.edges[h.edge].name);
  CHECK(names == std::vector<std::string>{"a1", "x1", "x2", "x3", "x4", "a5"});
  Skeleton sk = default_skeleton(S);
  std::vector<std::string> order;
  for (const HalfEdge& h : sk.half_edge_order.at(v1)) order.push_back(S.edges[h.edge].name);
  CHECK(order == std::vector<std::string>{"x1", "x2", "x3", "x4"});
}

TEST_CASE("disc presentation: boundary product is trivial") {
  for (int k = 1; k <= 5; ++k) {
    MarkedSurface S = disc(k);
    Skeleton sk = default_skeleton(S);
    CHECK(skeleton_cycle_rank(S, sk) == S.rank_h1());
    CHECK(int(sk.edges.size()) == S.rank_h1() + int(S.marked_vertices().size()) - S.num_components());
    Presentation P = present(S, sk);
    CHECK(P.relations.empty());
    CHECK(P.generators.size() == size_t(k));
    // a_{k+1} ... a_1 read as the boundary loop starting at v1
    Path loop;
    for (int i = k + 1; i >= 1; --i) loop.push_back({S.edge_id("a" + std::to_string(i)), +1});
    CHECK(path_word(P, loop).empty());
  }
  MarkedSurface S = disc(2);
  Presentation P = present(S, default_skeleton(S));
  CHECK(word_names(S, P, P.edge_words[S.edge_id("a1")]) == "x1");
  CHECK(word_names(S, P, P.edge_words[S.edge_id("a2")]) == "x1^-1 x2");
  CHECK(word_names(S, P, P.edge_words[S.edge_id("a3")]) == "x2^-1");
}

TEST_CASE("doubled discs") {
  for (int k = 1; k <= 4; ++k) {
    MarkedSurface D = double_along_arcs(disc(k));
    CHECK_NOTHROW(D.validate());
    CHECK(D.euler_characteristic() == 1 - k);
    CHECK(D.vertices.size() == size_t(2 * k + 2));
    CHECK(D.edges.size() == size_t(4 * k + 2));
    CHECK(D.faces.size() == size_t(k + 1));
    auto cyc = D.boundary_cycles();
    CHECK(cyc.size() == size_t(k + 1));
    for (const auto& c : cyc) CHECK(c.size() == 2);
    CHECK(D.marked_vertices().size() == size_t(2 * k + 2));

    MarkedSurface T = topological_double(disc(k));
    CHECK(T.provenance != D.provenance);
    CHECK(surface_to_json(T)["faces"] == surface_to_json(D)["faces"]);
    CHECK(T.boundary_cycles().size() == disc(k).vertices.size());
    CHECK(T.marked_vertices().size() == 2 * disc(k).vertices.size());

    Skeleton sk = default_skeleton(D);
    CHECK(skeleton_cycle_rank(D, sk) == D.rank_h1());
    CHECK(int(sk.edges.size()) == D.rank_h1() + int(D.marked_vertices().size()) - D.num_components());
    Presentation P = present(D, sk);
    CHECK(P.relations.empty());
    CHECK(P.generators.size() == sk.edges.size());
  }
  MarkedSurface C = double_along_arcs(disc(1));
  CHECK(C.boundary_cycles().size() == 2);
  CHECK(C.euler_characteristic() == 0);
  CHECK_THROWS_AS(double_along_arcs(double_along_arcs(disc(1))), UnsupportedFamily);
}

TEST_CASE("copy swap is an orientation-reversing involution") {
  for (int k = 1; k <= 4; ++k) {
    MarkedSurface D = double_along_arcs(disc(k));
    Involution s = copy_swap(D);
    CHECK(is_orientation_reversing_automorphism(D, s));
    for (size_t v = 0; v < D.vertices.size(); ++v) CHECK(s.vertex_map[s.vertex_map[v]] == int(v));
    for (size_t e = 0; e < D.edges.size(); ++e) {
      Letter a = s.edge_map[e];
      Letter b = s.edge_map[a.id];
      CHECK(b.id == int(e));
      CHECK(a.sign * b.sign == 1);
    }
    Involution id;
    for (size_t v = 0; v < D.vertices.size(); ++v) id.vertex_map.push_back(int(v));
    for (size_t e = 0; e < D.edges.size(); ++e) id.edge_map.push_back({int(e), +1});
    CHECK_FALSE(is_orientation_reversing_automorphism(D, id));
  }
}

TEST_CASE("triangulation bookkeeping") {
  CHECK(triangulate(disc(2)).triangles.size() == 1);
  CHECK(triangulate(disc(4)).triangles.size() == 3);
  for (int k = 1; k <= 4; ++k) {
    for (const MarkedSurface& S : {disc(k), double_along_arcs(disc(k))}) {
      Triangulation T = triangulate(S);
      int bigons = 0;
      for (const Path& f : S.faces) bigons += f.size() == 2;
      CHECK(T.num_vertices - T.num_edges + int(T.triangles.size()) + bigons == S.euler_characteristic());
      for (const Triangle& t : T.triangles) {
        Path loop = t.side[0];
        loop.insert(loop.end(), t.side[1].begin(), t.side[1].end());
        loop.insert(loop.end(), t.side[2].begin(), t.side[2].end());
        CHECK(S.start(loop.front()) == S.end(loop.back()));
        for (size_t j = 0; j + 1 < loop.size(); ++j) CHECK(S.end(loop[j]) == S.start(loop[j + 1]));
      }
    }
  }
}

TEST_CASE("gluing") {
  MarkedSurface A = disc(1), B = disc(1);
  int a1 = A.edge_id("a1");
  MarkedSurface G = glue(A, B, {{a1, B.edge_id("a1")}});
  CHECK(G.family == Family::Glued);
  CHECK(G.euler_characteristic() == 1);
  CHECK(G.boundary_cycles().size() == 1);
  CHECK(G.boundary_edges().size() == 2);
  CHECK(G.marked_vertices().size() == 2);
  CHECK(G.num_components() == 1);

  MarkedSurface U = glue(A, B, {});
  CHECK(U.family == Family::Union);
  CHECK(U.num_components() == 2);
  CHECK(U.euler_characteristic() == 2);

  std::vector<std::string> all;
  for (const Vertex& v : G.vertices) all.push_back(v.name);
  CHECK_THROWS_AS(glue(A, B, {{a1, B.edge_id("a1")}}, all), IncompatibleGluing);
  CHECK_THROWS_AS(glue(A, B, {{A.edge_id("x1"), B.edge_id("a1")}}), IncompatibleGluing);

  // two triangles along one edge give a square
  MarkedSurface Q = glue(disc(2), disc(2), {{disc(2).edge_id("a3"), disc(2).edge_id("a1")}});
  CHECK(Q.boundary_edges().size() == 4);
  CHECK(Q.euler_characteristic() == 1);
  CHECK(Q.marked_vertices().size() == 4);
}

TEST_CASE("relabel flips edges consistently") {
  MarkedSurface D = double_along_arcs(disc(2));
  MarkedSurface R = relabel(D, {{"g1", {"g1r", true}}, {"L1", {"y", false}}});
  CHECK_NOTHROW(R.validate());
  CHECK(R.edges[R.edge_id("g1r")].S == D.edges[D.edge_id("g1")].T);
  CHECK(R.edge_id("y") == D.edge_id("L1"));
}

TEST_CASE("json dump") {
  MarkedSurface S = disc(3);
  auto j = surface_to_json(S);
  CHECK(j["vertices"].size() == 4);
  CHECK(j["edges"].size() == 7);
  CHECK(j["faces"].size() == 4);
  Skeleton sk = default_skeleton(S);
  auto js = skeleton_to_json(S, sk, present(S, sk));
  CHECK(js["skeleton_edges"].size() == 3);
  CHECK(js["boundary_words"]["a1"] == "x1");
}
