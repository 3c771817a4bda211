#pragma once

#include "qpm/lie_core.hpp"
#include "qpm/surface.hpp"

#include <map>
#include <memory>
#include <vector>

namespace qpm {

struct NonMatchingPoint : Error {
  using Error::Error;
};

struct DecorationViolated : Error {
  using Error::Error;
};

/// Surface, skeleton and the edge words a representation is evaluated through.
struct RepContext {
  MarkedSurface surface;
  Skeleton skeleton;
  Presentation pres;
};
using RepContextPtr = std::shared_ptr<const RepContext>;

RepContextPtr make_context(const MarkedSurface& S);
RepContextPtr make_context(const MarkedSurface& S, const Skeleton& sk);
/// Context whose generators need not form a skeleton; leftover faces become
/// relations that points are expected to satisfy. Extra generators are
/// appended when the given ones do not determine every edge.
RepContextPtr make_context(const MarkedSurface& S, const std::vector<int>& generators);

/// A point of G^{generators}: one matrix per generator edge.
struct RepPoint {
  RepContextPtr ctx;
  std::vector<Mat> values;
  int n() const { return static_cast<int>(values.front().rows()); }
  int size() const { return static_cast<int>(values.size()); }
};

/// Right-trivialized tangent vector: xi[e] stands for xi[e] * values[e].
using Tangent = std::vector<Mat>;

RepPoint identity_point(const RepContextPtr& ctx, int n);
RepPoint random_point(const RepContextPtr& ctx, int n, Rng& rng, double scale = 0.5);

Mat eval_word(const Word& w, const std::vector<Mat>& vals);
/// Right-trivialized derivative (dW) W^-1 of the word along xi.
Mat dword(const Word& w, const std::vector<Mat>& vals, const Tangent& xi);

Mat eval_path(const RepPoint& p, const Path& path);
Mat eval_edge(const RepPoint& p, int edge);
/// Holonomy along a boundary edge; throws Error if e is interior.
Mat eval_boundary(const RepPoint& p, int edge);
std::vector<Mat> all_edge_values(const RepPoint& p);
Tangent all_edge_tangents(const RepPoint& p, const Tangent& xi);
/// Largest |W - I| over the relations of the presentation.
double relation_defect(const RepPoint& p);

/// Moment map: boundary holonomies, in the order of surface.boundary_edges().
std::vector<Mat> moment(const RepPoint& p);

/// g is indexed by surface vertex id; generator e becomes g_T e g_S^-1.
RepPoint gauge_act(const std::vector<Mat>& g, const RepPoint& p);
/// Component at e: u_T - Ad_{p(e)} u_S.
Tangent infinitesimal_gauge(const std::vector<Mat>& u, const RepPoint& p);

Vec to_coeffs(const LieData& L, const Tangent& xi);
Tangent from_coeffs(const LieData& L, const Vec& c);

/// The quasi-Poisson bivector in the right frame: a (size*dim)^2 antisymmetric matrix.
Mat quasi_bivector(const LieData& L, const RepPoint& p);

/// Infinitesimal action of g at vertex v as a (size*dim) x dim matrix (column i
/// is the action field of basis element i).
Mat vertex_action_matrix(const LieData& L, const RepPoint& p, int v);

/// Image of chi under the action at every marked vertex, summed.
Tensor3 rho_chi(const LieData& L, const RepPoint& p);

/// Half Schouten bracket of the quasi-Poisson bivector, computed in a
/// constant-coefficient frame mixing right- and left-invariant fields
/// ([X^r,Y^r] = [X,Y]^r, [X^l,Y^l] = -[X,Y]^l, [X^r,Y^l] = 0) and expressed
/// in the right frame.
Tensor3 half_schouten(const LieData& L, const RepPoint& p);
/// max |half_schouten - rho_chi| over all entries.
double schouten_defect(const LieData& L, const RepPoint& p);

/// Boundary condition: the pair (rho(first), rho(second)) lies in `tag`, or a
/// single edge when second < 0.
struct BoundaryCondition {
  int first = -1;
  int second = -1;
  SubgroupTag tag;
};

struct Decoration {
  std::map<int, LagTag> vertex;
  std::vector<BoundaryCondition> conditions;
};

/// Disc decoration: G* at v1, G*-dual at v_{k+1}, B~+ elsewhere, with the
/// matching conditions on the boundary edges adjacent to each vertex.
Decoration disc_decoration(const MarkedSurface& S);

/// Index of the first violated condition, or -1.
int first_violated(const Decoration& d, const RepPoint& p, double tol = 1e-9);

/// Quasi-Poisson bivector plus the action image of every correction bivector.
Mat full_bivector(const LieData& L, const RepPoint& p, const Decoration& d);

/// Laurent monomials in matrix entries and minors of word evaluations.
struct Factor {
  Word word;
  std::vector<int> rows;  ///< single entry when rows.size() == 1
  std::vector<int> cols;
  int power = 1;
};

struct Observable {
  std::vector<std::pair<cd, std::vector<Factor>>> terms;

  static Observable constant(cd c);
  static Observable entry(const Word& w, int i, int j);
  static Observable minor(const Word& w, std::vector<int> rows, std::vector<int> cols);

  Observable operator+(const Observable& o) const;
  Observable operator*(const Observable& o) const;
  Observable scaled(cd c) const;
  /// Multiplicative inverse of a single-term observable.
  Observable inverse() const;

  cd value(const RepPoint& p) const;
  /// Component (e, a) is d/dt of the value at p with p(e) -> exp(t X_a) p(e).
  Vec differential(const LieData& L, const RepPoint& p) const;
};

/// P(df, dg) for a bivector given in the right frame at p.
cd bracket(const LieData& L, const Observable& f, const Observable& g, const RepPoint& p, const Mat& P);

}  // namespace qpm
