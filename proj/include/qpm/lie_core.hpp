#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpm {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A leading principal minor vanished, so g has no N-.T.N+ factorization.
struct OffBigCell : Error {
  using Error::Error;
};

/// A singular value sits too close to the rank threshold to decide.
struct RankAmbiguous : Error {
  using Error::Error;
};

/// Requested Lagrangian subalgebra is not in the decoration catalog.
struct UnsupportedLagrangian : Error {
  using Error::Error;
};

/// Dense rank-3 tensor of complex numbers indexed by (a, b, c) in [0, d)^3.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d) : d_(d), data_(static_cast<size_t>(d) * d * d, cd(0)) {}
  int dim() const { return d_; }
  cd& operator()(int a, int b, int c) { return data_[(static_cast<size_t>(a) * d_ + b) * d_ + c]; }
  cd operator()(int a, int b, int c) const { return data_[(static_cast<size_t>(a) * d_ + b) * d_ + c]; }

 private:
  int d_ = 0;
  std::vector<cd> data_;
};

/// Numeric presentation of sl(n, C).
///
/// The basis is ordered as: orthonormalized Cartan elements h_1..h_{n-1},
/// then E_alpha for every positive root, then E_{-alpha} in the same order.
/// The pairing is scale * trace(XY).
struct LieData {
  int n = 0;
  int dim = 0;
  int rank = 0;  ///< n - 1
  int npos = 0;  ///< number of positive roots
  double scale = 1.0;
  std::vector<Mat> basis;
  Eigen::MatrixXcd pairing;      ///< s_ij
  Eigen::MatrixXcd pairing_inv;  ///< s^ij
  std::vector<std::pair<int, int>> root_pairs;  ///< (i, j), i < j, for e_i - e_j
  std::vector<std::vector<int>> roots;          ///< integer vectors e_i - e_j
  Tensor3 structure;  ///< structure(k, i, j) = c^k_ij
  Eigen::MatrixXcd r_tensor;
  Eigen::MatrixXcd lambda;
  Tensor3 chi;

  int cartan(int i) const { return i; }
  int pos(int a) const { return rank + a; }
  int neg(int a) const { return rank + npos + a; }

  /// Coordinates of a traceless matrix in the basis.
  Vec coords(const Mat& X) const;
  /// Matrix with the given basis coordinates.
  Mat element(const Vec& c) const;
  /// Matrix of Ad_g in the basis: column j holds coords(g X_j g^-1).
  Mat ad_matrix(const Mat& g) const;
  /// Covector X -> (<X, X_j>)_j.
  Vec flat(const Mat& X) const;
  /// Inverse of flat: the element whose pairing with X_j is xi_j.
  Mat sharp(const Vec& xi) const;
  cd pair(const Mat& X, const Mat& Y) const { return scale * (X * Y).trace(); }
};

LieData build_sl(int n, double pairing_scale = 1.0);

Mat expm(const Mat& X);
inline Mat commutator(const Mat& X, const Mat& Y) { return X * Y - Y * X; }
Mat identity(int n);

/// Diagonal part of g as a diagonal matrix.
Mat pr_T(const Mat& g);
/// Strictly lower (resp. upper) triangular part.
Mat strict_lower(const Mat& X);
Mat strict_upper(const Mat& X);

struct GaussFactors {
  Mat lower;  ///< unit lower triangular
  Mat torus;  ///< diagonal
  Mat upper;  ///< unit upper triangular
};

/// g = lower * torus * upper. Throws OffBigCell when a pivot is below tol * |g|.
GaussFactors gauss_decompose(const Mat& g, double tol = 1e-12);

/// Square root of a diagonal det-1 matrix: principal roots on the first n-1
/// entries, the last entry fixed so that the determinant stays 1.
Mat torus_sqrt(const Mat& t);

/// A permutation u of {0..n-1}; the permutation matrix has P(u)[u[c], c] = 1.
using Perm = std::vector<int>;

Perm identity_perm(int n);
Perm longest_element(int n);
Perm simple_reflection(int n, int i);
Perm compose(const Perm& a, const Perm& b);  ///< (a o b)(c) = a[b[c]]
Perm inverse(const Perm& a);
int perm_length(const Perm& u);
std::string perm_to_string(const Perm& u);
Perm perm_from_string(const std::string& s);
Mat perm_matrix(const Perm& u);
/// Signed permutation matrix with determinant 1 representing u.
Mat weyl_rep(const Perm& u);

/// Returns u with g in B+ P(u) B+, read off the ranks of the lower-left blocks.
Perm bruhat_word(const Mat& g, double tol = 1e-9);

enum class Subgroup { G, BPlus, BMinus, NPlus, NMinus, T, GStar, GStarDual, BTildePlus, BruhatCell };

struct SubgroupTag {
  Subgroup kind = Subgroup::G;
  Perm cell;  ///< only for BruhatCell
  bool is_pair() const {
    return kind == Subgroup::GStar || kind == Subgroup::GStarDual || kind == Subgroup::BTildePlus;
  }
};

std::string subgroup_name(Subgroup s);

bool member(const Mat& x, const SubgroupTag& tag, double tol = 1e-9);
bool member(const Mat& a, const Mat& b, const SubgroupTag& tag, double tol = 1e-9);
inline bool member(const Mat& x, Subgroup s, double tol = 1e-9) { return member(x, SubgroupTag{s, {}}, tol); }
inline bool member(const Mat& a, const Mat& b, Subgroup s, double tol = 1e-9) {
  return member(a, b, SubgroupTag{s, {}}, tol);
}

enum class LagTag { GStar, GStarDual, BTildePlus, GDelta, GNegDelta };

std::string lag_name(LagTag t);

struct LagrangianSubalgebra {
  LagTag tag;
  std::vector<std::pair<Mat, Mat>> basis;
};

LagrangianSubalgebra lagrangian(const LieData& L, LagTag tag);

/// Largest |<A,A'> - <B,B'>| over pairs of basis elements.
double isotropy_defect(const LieData& L, const LagrangianSubalgebra& a);
/// Largest residual of componentwise brackets against the span of the basis.
double closure_defect(const LieData& L, const LagrangianSubalgebra& a);
int lagrangian_dim(const LieData& L, const LagrangianSubalgebra& a);

/// Coefficients of the correction bivector pi_v in basis (x) basis (catalog lookup).
Mat correction_bivector(const LieData& L, const LagrangianSubalgebra& a);
/// Same bivector computed from the basis of a: the minimal-norm skew pi whose
/// graph over g_{-Delta} reproduces a modulo a /\ g_Delta.
Mat correction_bivector_generic(const LieData& L, const LagrangianSubalgebra& a);

/// Seeded source of randomness with a portable normal sampler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform();  ///< in (0, 1)
  double normal();
  cd cnormal();
  /// Independent stream for sample `index`, derived from this stream's seed.
  Rng child(std::uint64_t index) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

Mat random_traceless(int n, Rng& rng, double scale = 0.5);
Mat random_sl(int n, Rng& rng, double scale = 0.5);
/// exp of a random upper (lower) triangular traceless matrix; with_torus=false
/// gives a unipotent element.
Mat random_bplus(int n, Rng& rng, bool with_torus = true, double scale = 0.5);
Mat random_bminus(int n, Rng& rng, bool with_torus = true, double scale = 0.5);
Mat random_torus(int n, Rng& rng, double scale = 0.5);

}  // namespace qpm
