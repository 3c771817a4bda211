#pragma once

#include "qpm/lie_core.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qpm {

struct IncompatibleGluing : Error {
  using Error::Error;
};

struct UnsupportedFamily : Error {
  using Error::Error;
};

/// (index, +1 or -1): an edge traversed forwards or backwards, or a
/// generator / its inverse inside a word.
struct Letter {
  int id;
  int sign;
  bool operator==(const Letter& o) const { return id == o.id && sign == o.sign; }
};

/// Product read left to right: {a, b} means a * b.
using Word = std::vector<Letter>;
/// Sequence of edge traversals in walking order.
using Path = std::vector<Letter>;

Word inverse_word(const Word& w);
Word reduce_word(const Word& w);
Word concat(const Word& a, const Word& b);

struct Vertex {
  std::string name;
  bool marked = true;
};

struct Edge {
  std::string name;
  int S = 0;
  int T = 0;
};

enum class Family { Disc, Double, TopologicalDouble, Glued, Union, Relabeled };

/// Planar combinatorial surface: a 2-complex whose faces are listed as
/// counterclockwise cycles of edge traversals.
struct MarkedSurface {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Path> faces;
  Family family = Family::Disc;
  int param = 0;           ///< k for discs and doubled discs
  std::string provenance;  ///< construction tree, e.g. "double(disc(2))"

  int vertex_id(const std::string& name) const;
  int edge_id(const std::string& name) const;
  int start(const Letter& l) const { return l.sign > 0 ? edges[l.id].S : edges[l.id].T; }
  int end(const Letter& l) const { return l.sign > 0 ? edges[l.id].T : edges[l.id].S; }

  /// Edges used by exactly one face.
  std::vector<int> boundary_edges() const;
  /// Boundary components as cycles of letters, oriented with the surface on the left.
  std::vector<Path> boundary_letter_cycles() const;
  /// Boundary components as cyclic vertex lists.
  std::vector<std::vector<int>> boundary_cycles() const;
  std::vector<int> marked_vertices() const;
  int euler_characteristic() const;
  int num_components() const;
  /// rank H_1 of a genus-0 surface with b boundary circles per component
  int rank_h1() const;
  /// Throws Error when the complex is not an oriented genus-0 surface with
  /// every boundary circle meeting a marked vertex.
  void validate() const;
};

MarkedSurface disc(int k);
/// Doubles a disc along one arc per boundary edge: a sphere with k+1 holes,
/// two marked points on each.
MarkedSurface double_along_arcs(const MarkedSurface& S);
MarkedSurface topological_double(const MarkedSurface& S);
/// Glues boundary edges pairwise (edge of S1 identified with the reverse of
/// the paired edge of S2). Vertices that end up in the interior lose their
/// mark, as do vertices listed in `unmark` (names in the glued surface).
MarkedSurface glue(const MarkedSurface& S1, const MarkedSurface& S2, const std::vector<std::pair<int, int>>& pairs,
                   const std::vector<std::string>& unmark = {});

/// Renames edges and optionally reverses some of them; faces are rewritten.
MarkedSurface relabel(const MarkedSurface& S, const std::map<std::string, std::pair<std::string, bool>>& edge_map);

/// Orientation-reversing swap of the two copies in a doubled disc.
struct Involution {
  std::vector<int> vertex_map;
  std::vector<Letter> edge_map;  ///< image of each edge as a letter
};
Involution copy_swap(const MarkedSurface& S);
/// True when the map sends faces to reversed faces and respects incidences.
bool is_orientation_reversing_automorphism(const MarkedSurface& S, const Involution& inv);

struct HalfEdge {
  int edge;
  bool at_target;  ///< true for (e, v, T), false for (e, v, S)
  bool operator==(const HalfEdge& o) const { return edge == o.edge && at_target == o.at_target; }
};

/// Counterclockwise order of all half-edges at v, starting just after the
/// exterior gap for boundary vertices.
std::vector<HalfEdge> rotation(const MarkedSurface& S, int v);

struct Skeleton {
  std::vector<int> vertices;  ///< marked vertex ids
  std::vector<int> edges;     ///< edge ids of the surface
  std::map<int, std::vector<HalfEdge>> half_edge_order;
};

Skeleton make_skeleton(const MarkedSurface& S, const std::vector<int>& edges);
Skeleton default_skeleton(const MarkedSurface& S);
/// #edges - #V + #components; equals rank H_1 for a genuine skeleton.
int skeleton_cycle_rank(const MarkedSurface& S, const Skeleton& sk);

/// Words for every edge in terms of chosen generator edges, plus the face
/// relations left over after eliminating the remaining edges.
struct Presentation {
  std::vector<int> generators;
  std::vector<Word> edge_words;  ///< letters index into `generators`
  std::vector<Word> relations;
  std::vector<int> gauge_fixed;  ///< edges set to 1 to remove interior vertices
};

Presentation present(const MarkedSurface& S, const std::vector<int>& generators);
Presentation present(const MarkedSurface& S, const Skeleton& sk);

/// Word of a path (holonomy last * ... * first) in terms of generators.
Word path_word(const Presentation& P, const Path& p);

struct Triangle {
  Path side[3];  ///< closed loop side[0] then side[1] then side[2]
  int face = -1;
};

struct Triangulation {
  std::vector<Triangle> triangles;
  int num_vertices = 0;       ///< |T_0|
  int num_edges = 0;          ///< |T_1|: complex edges plus diagonals
  int num_diagonals = 0;
  std::vector<int> interior_vertices;
  std::map<int, Word> boundary_words;  ///< boundary edge -> word in generators, filled by the caller
};

/// Fan triangulation of every face from its lowest-id vertex (or from the
/// corner given in `starts`). Returned sides are paths in the complex.
Triangulation triangulate(const MarkedSurface& S, const std::map<int, int>& starts = {});

nlohmann::json surface_to_json(const MarkedSurface& S);
nlohmann::json skeleton_to_json(const MarkedSurface& S, const Skeleton& sk, const Presentation& P);

}  // namespace qpm
