#pragma once

#include "qpm/rep_variety.hpp"

#include <json.hpp>
#include <optional>

namespace qpm {

struct NonComposable : Error {
  using Error::Error;
};

/// Representative (g_1..g_k) of a point of G x_{B+} ... x_{B+} G, where
/// (b_1..b_{k-1}) acts by g_1 b_1^-1, b_1 g_2 b_2^-1, ..., b_{k-1} g_k.
struct FtildePoint {
  std::vector<Mat> g;
  int k() const { return static_cast<int>(g.size()); }
};

/// Representative (g_1..g_n) of a point of G^n / B+^n, where (b_1..b_n) acts
/// by g_1 b_1^-1, b_1 g_2 b_2^-1, ..., b_{n-1} g_n b_n^-1.
struct FnPoint {
  std::vector<Mat> g;
  int n() const { return static_cast<int>(g.size()); }
};

/// Representative ((x, y), (n_1..n_{n-1}), (g_1..g_n)) of an arrow of the
/// dual flag groupoid (G* x N+^{n-1}) x_{B+^n} G^n.
struct FstarPoint {
  Mat x;
  Mat y;
  std::vector<Mat> nus;
  std::vector<Mat> base;
  int n() const { return static_cast<int>(base.size()); }
};

/// An element of the group G* x B~+^{n-1} x B+ acting on G^n; FstarPoint is
/// the normal form with z_i = 1 and b = 1.
struct FstarElement {
  Mat x;
  Mat y;
  std::vector<Mat> z;
  std::vector<Mat> zp;
  Mat b;
};

struct SchubertWord {
  std::vector<Perm> words;
  bool operator==(const SchubertWord&) const = default;
};

/// Image of the flag map: k-1 cosets g_1...g_i B+ and the full product.
struct JImage {
  std::vector<Mat> flags;      ///< unit lower triangular representative when in the big cell
  std::vector<bool> off_cell;  ///< raw representative kept when true
  Mat product;
};

// Gauge actions and their inverse problems

FtildePoint act_ftilde(const std::vector<Mat>& b, const FtildePoint& p);
FnPoint act_fn(const std::vector<Mat>& b, const FnPoint& p);
/// The b with act_ftilde(b, a) = c, if it exists.
std::optional<std::vector<Mat>> solve_ftilde_gauge(const FtildePoint& a, const FtildePoint& c, double tol = 1e-8);
std::optional<std::vector<Mat>> solve_fn_gauge(const FnPoint& a, const FnPoint& c, double tol = 1e-8);

bool equal_ftilde(const FtildePoint& a, const FtildePoint& b, double tol = 1e-8);
bool equal_fn(const FnPoint& a, const FnPoint& b, double tol = 1e-8);

FtildePoint random_ftilde(int k, int n, Rng& rng, double scale = 0.5);
FnPoint random_fn(int count, int n, Rng& rng, double scale = 0.5);
std::vector<Mat> random_bplus_tuple(int count, int n, Rng& rng, double scale = 0.5);

/// Drops a_{k+1} from a representation of disc(k).
FtildePoint psi(const RepPoint& p);
/// Representation of disc(k) with boundary values a_1..a_k, a_{k+1} = (a_1...a_k)^-1.
RepPoint psi_inverse(const RepContextPtr& ctx, const FtildePoint& a);

/// [g_1..g_n, h_n^-1, .., h_1^-1].
FtildePoint chi_pair(const FtildePoint& g, const FtildePoint& h);

JImage j_map(const FtildePoint& p, double tol = 1e-10);
/// Unit lower triangular representative of g B+, or nullopt off the big cell.
std::optional<Mat> coset_representative(const Mat& g, double tol = 1e-10);
bool same_coset(const Mat& g, const Mat& h, double tol = 1e-8);

/// The bivector on disc(k) written directly as the mixed-product term, the
/// flag-variety terms on the first k-1 edges and Lambda^r - Lambda^l on the
/// last, in the right frame of the generators x_1..x_k.
Mat psi_printed_bivector(const LieData& L, const RepPoint& p);

// Dual flag groupoid

FstarElement fstar_identity_element(int count, int n);
FstarElement fstar_element(const FstarPoint& p);
FstarElement operator*(const FstarElement& a, const FstarElement& b);
FstarElement inverse(const FstarElement& a);
/// Gauge embedding (b_i) -> ((1,1), (b_i,b_i)_{i<n}, b_n).
FstarElement gauge_element(const std::vector<Mat>& b);
/// h_1 = x g_1 z_1^-1, h_i = z'_{i-1} g_i z_i^-1, h_n = z'_{n-1} g_n b^-1.
FnPoint fstar_act(const FstarElement& k, const FnPoint& g);
FstarPoint normalize(const FstarElement& k, const FnPoint& base);

bool is_fstar_point(const FstarPoint& p, double tol = 1e-9);
FstarPoint random_fstar(int count, int n, Rng& rng, double scale = 0.5);
FnPoint fstar_source(const FstarPoint& p);
FnPoint fstar_target(const FstarPoint& p);
FstarPoint fstar_unit(const FnPoint& g);
FstarPoint fstar_inverse(const FstarPoint& p);
/// p * q, defined when source(p) = target(q); throws NonComposable otherwise.
FstarPoint fstar_compose(const FstarPoint& p, const FstarPoint& q, double tol = 1e-8);
/// Representative of the same arrow: base c.g, nus c_i n_i c_i^-1.
FstarPoint fstar_twist(const std::vector<Mat>& c, const FstarPoint& p);
bool equal_fstar(const FstarPoint& p, const FstarPoint& q, double tol = 1e-8);

SchubertWord schubert_word(const FnPoint& p, double tol = 1e-9);
SchubertWord schubert_word(const FtildePoint& p, double tol = 1e-9);
std::string to_string(const SchubertWord& w);

/// g_1 ... g_{2n} in B-.
bool gamma_member(const FtildePoint& p, double tol = 1e-8);
/// y in T and y = pr_T(x)^-1.
bool gamma_star_member(const FstarPoint& p, double tol = 1e-8);

nlohmann::json mat_to_json(const Mat& m);
nlohmann::json to_json(const FtildePoint& p);
nlohmann::json to_json(const FnPoint& p);
nlohmann::json to_json(const FstarPoint& p);

}  // namespace qpm
