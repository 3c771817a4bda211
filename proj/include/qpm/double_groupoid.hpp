#pragma once

#include "qpm/groupoid_flags.hpp"
#include "qpm/two_form.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qpm {

/// A sampler ran out of retries (every attempt landed off the big cell).
struct ConstructionFailed : Error {
  using Error::Error;
};

// Representations of the doubled disc with k = m + n bottom edges.
//
// Generators are g_1..g_k (bottom edges b_{i+1} -> b_i), L_1..L_{k+1} and
// R_1..R_{k+1} (both b_i -> t_i). The top edges are h_i = R_i g_i L_{i+1}^-1
// and the outer face gives the single relation
//   L_1 (g_1...g_k) R_{k+1}^-1 (h_1...h_k)^-1 = 1.
// Boundary decoration: (R_1, L_1) and (L_{k+1}, R_{k+1}) lie in G*, every
// other pair (L_i, R_i) lies in B~+ = {both in B+, L R^-1 in N+}.
//
// With the split k = m + n, the first m bottom edges together with holes
// 1..m+1 form the left part and the remaining ones the right part.

/// Generator slots of the doubled disc of size k (indices are 1-based).
struct DoubleLayout {
  int k = 0;
  int g(int i) const { return i - 1; }
  int L(int i) const { return k + i - 1; }
  int R(int i) const { return k + (k + 1) + i - 1; }
  int size() const { return 3 * k + 2; }
};

RepContextPtr double_context(int k);
DoubleLayout layout_of(const RepPoint& p);

/// h_i evaluated at p.
Mat top_edge(const RepPoint& p, int i);

/// 1-based index of the first hole whose pair leaves its decoration, or 0.
int violated_hole(const RepPoint& p, double tol = 1e-9);

/// Solve the relation for (R_1, L_1) in G* (resp. (L_{k+1}, R_{k+1})) from a
/// Gauss factorization; throws OffBigCell.
void solve_left_gstar(RepPoint& p);
void solve_right_gstar(RepPoint& p);

/// Decorated representation: free generators seeded at random, the left G*
/// pair solved, resampled on OffBigCell.
RepPoint sample_decorated(const RepContextPtr& ctx, int n, Rng& rng, int attempts = 50);

/// Slim data of a decorated representation.
struct BimoduleQuad {
  FtildePoint h;    ///< top edges, target of the vertical structure
  FstarPoint rho2;  ///< right part, an arrow over F_n
  FstarPoint rho1;  ///< left part, an arrow over F_m
  FtildePoint g;    ///< bottom edges, source of the vertical structure
  std::optional<RepPoint> rep;
  int m() const { return rho1.n(); }
  int n() const { return rho2.n(); }
};

/// A quadruple with m = n in the (x, v, u, y) naming: x = t^V, v = s^H,
/// u = t^H, y = s^V.
struct SlimQuad {
  FtildePoint x;
  FstarPoint v;
  FstarPoint u;
  FtildePoint y;
  std::optional<RepPoint> rep;
  int n() const { return u.n(); }
};

SlimQuad to_slim(const BimoduleQuad& q);
BimoduleQuad to_bimodule(const SlimQuad& q);

/// First m entries, as a point of F_m.
FnPoint p0(const FtildePoint& x, int m);
/// (x_k^-1, ..., x_{m+1}^-1), as a point of F_{k-m}.
FnPoint q0(const FtildePoint& x, int m);

/// Theta: read the quadruple off a decorated representation. Throws
/// DecorationViolated naming the failing hole.
BimoduleQuad theta(const RepPoint& p, int m, double tol = 1e-8);

struct MemberResult {
  bool ok = false;
  std::string diagnostic;  ///< first failing equation, empty when ok
  double defect = 0.0;
  std::vector<Mat> gauge_rho1;  ///< F_m gauge moving the base of rho1 onto p0(g)
  std::vector<Mat> gauge_rho2;  ///< F_n gauge moving the base of rho2 onto q0(g)
  std::vector<Mat> gauge_top;   ///< F~ gauge matching h with the two targets
  Mat beta;                     ///< gap between the two parts, in N+ on members
};

/// Image-of-theta test: the F* components are normalized onto the bottom
/// edges, the top edges are matched against their targets, then the torus
/// gap between the two parts (f2) and the outer relation (f1) are checked.
MemberResult is_member(const BimoduleQuad& z, double tol = 1e-8);
MemberResult is_member(const SlimQuad& z, double tol = 1e-8);

/// Splice of F~ points along a shared F-point: A has split a1 | a2 and B has
/// split a2 | b2 with q0(A) = p0(B) as classes; result (A_1..A_a1, B''_..).
FtildePoint compose_ftilde(const FtildePoint& A, int a1, const FtildePoint& B, int b1, double tol = 1e-8);
/// [F_1..F_n, F_n^-1..F_1^-1].
FtildePoint ftilde_unit(const FnPoint& f);

bool equal_quad(const BimoduleQuad& a, const BimoduleQuad& b, double tol = 1e-8);
bool equal_quad(const SlimQuad& a, const SlimQuad& b, double tol = 1e-8);

/// (x, 1, 1, x).
BimoduleQuad vertical_unit(const FtildePoint& x, int m);
/// (1_{t(xi)}, xi, xi, 1_{s(xi)}).
SlimQuad horizontal_unit(const FstarPoint& xi);

/// Horizontal concatenation along a.rho2 = b.rho1; the common form of mh
/// and of both Morita actions.
BimoduleQuad concat(const BimoduleQuad& a, const BimoduleQuad& b, double tol = 1e-8);
/// (xx', w, u, yy') for a = (x, v, u, y) and b = (x', w, v, y').
SlimQuad mh(const SlimQuad& a, const SlimQuad& b, double tol = 1e-8);
/// (x, vv', uu', y') for a = (x, v, u, y) and b = (y, v', u', y').
SlimQuad mv(const SlimQuad& a, const SlimQuad& b, double tol = 1e-8);
BimoduleQuad act_right(const BimoduleQuad& z, const SlimQuad& a, double tol = 1e-8);
BimoduleQuad act_left(const SlimQuad& a, const BimoduleQuad& z, double tol = 1e-8);

/// Membership in the subgroupoid with F~ components in Gamma and F*
/// components in Gamma*.
bool restrict_H(const SlimQuad& a, double tol = 1e-8);

FtildePoint t2_act(const Mat& t1, const Mat& t2, const FtildePoint& x);
/// [(t x t^-1, t y t^-1), nus, (t g_1, g_2, ...)].
FstarPoint t2_act(const Mat& t, const FstarPoint& p);
BimoduleQuad t2_act(const Mat& t1, const Mat& t2, const BimoduleQuad& z);
SlimQuad t2_act(const Mat& t1, const Mat& t2, const SlimQuad& a);
/// Torus parts (pr_T(x_1), pr_T(y_2)) of the R edges on the two G* circles.
std::pair<Mat, Mat> t2_moment(const BimoduleQuad& z);
std::pair<Mat, Mat> t2_moment(const SlimQuad& a);
/// The same torus action realized as a gauge transformation of a representation.
RepPoint t2_act_rep(const Mat& t1, const Mat& t2, const RepPoint& p);
/// Generator of the torus action along X at the left (part = 1) or right circle.
Tangent t2_generator(const RepPoint& p, int part, const Mat& X);

// Gluing of representations

/// Result of attaching b to the right of a: the right part of a (split ma)
/// must coincide with the left part of b (split mb).
RepPoint glue_parts(const RepPoint& a, int ma, const RepPoint& b, int mb, double tol = 1e-8);
Tangent glue_tangents(const RepPoint& a, int ma, const Tangent& ta, const RepPoint& b, int mb, const Tangent& tb);
/// Largest mismatch between the right part of a and the left part of b.
double part_mismatch(const RepPoint& a, int ma, const RepPoint& b, int mb);

/// Random b on the doubled disc of size mb + nb whose left part is the right
/// part of a; the right G* pair of b is solved.
RepPoint sample_right_partner(const RepPoint& a, int ma, int nb, Rng& rng, int attempts = 50);
/// Random c of size mc + mb whose right part is the left part of b.
RepPoint sample_left_partner(const RepPoint& b, int mb, int mc, Rng& rng, int attempts = 50);
/// Random decorated representation with prescribed bottom edges.
RepPoint sample_over_bottom(const RepContextPtr& ctx, const FtildePoint& g, Rng& rng, int attempts = 50);
/// Random a with bottom edges g^a = h^b, so that a sits on top of b.
RepPoint sample_vertical_partner(const RepPoint& b, Rng& rng, int attempts = 50);
/// a on top of b: g = g^b, L = L^a L^b, R = R^a R^b.
RepPoint compose_vertical(const RepPoint& a, const RepPoint& b, double tol = 1e-8);
Tangent compose_vertical_tangent(const RepPoint& a, const Tangent& ta, const Tangent& tb);

/// Four squares on the doubled disc of size 2n with a over b, c over d, a
/// left of c and b left of d.
struct Square {
  RepPoint a, b, c, d;
};
Square sample_square(int k, int n, Rng& rng, int attempts = 50);

/// Decorated representation with p(rho) = xi (left part given, right G* pair solved).
RepPoint lift_left(const FstarPoint& xi, int n, Rng& rng, int attempts = 50);
/// Decorated representation with q(rho) = xi.
RepPoint lift_right(const FstarPoint& xi, int m, Rng& rng, int attempts = 50);

/// Decorated representation in the Gamma-restricted family; the last B~+ hole
/// and the right G* pair are solved in closed form.
RepPoint sample_h_member(const RepContextPtr& ctx, int n, Rng& rng, int attempts = 20);
/// Same family, with the shared data fixed as in the unrestricted partners.
RepPoint sample_h_right_partner(const RepPoint& a, int ma, int nb, Rng& rng, int attempts = 20);
RepPoint sample_h_vertical_partner(const RepPoint& b, Rng& rng, int attempts = 20);

// Tangent spaces

/// Linearized decoration and relation constraints, one row per scalar
/// equation, acting on coefficient vectors of generator tangents.
Mat decoration_constraints(const LieData& L, const RepPoint& p);
/// Basis of the tangent space of the decorated representation variety.
std::vector<Tangent> decorated_tangent_basis(const LieData& L, const RepPoint& p);
/// Distance of t from the span of `basis`, relative to |t|.
double tangency_defect(const LieData& L, const std::vector<Tangent>& basis, const Tangent& t);
/// Gauge fields at the B~+ holes; they span the kernel of the form.
std::vector<Tangent> hole_gauge_directions(const LieData& L, const RepPoint& p);

/// Pairs (ta, tb) tangent to a and b with the shared data moving together.
std::vector<std::pair<Tangent, Tangent>> composable_vertical_tangents(const LieData& L, const RepPoint& a,
                                                                      const RepPoint& b);
std::vector<std::pair<Tangent, Tangent>> composable_horizontal_tangents(const LieData& L, const RepPoint& a, int ma,
                                                                        const RepPoint& b, int mb);

nlohmann::json to_json(const BimoduleQuad& q);
nlohmann::json to_json(const SlimQuad& q);

}  // namespace qpm
