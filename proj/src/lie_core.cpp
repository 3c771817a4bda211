#include "qpm/lie_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpm {

Vec LieData::coords(const Mat& X) const {
  Vec c = Vec::Zero(dim);
  for (int l = 0; l < rank; ++l) {
    cd s = 0;
    for (int i = 0; i < n; ++i) s += X(i, i) * basis[l](i, i);
    c(l) = s;
  }
  for (int a = 0; a < npos; ++a) {
    auto [i, j] = root_pairs[a];
    c(pos(a)) = X(i, j);
    c(neg(a)) = X(j, i);
  }
  return c;
}

Mat LieData::element(const Vec& c) const {
  Mat X = Mat::Zero(n, n);
  for (int k = 0; k < dim; ++k) X += c(k) * basis[k];
  return X;
}

Mat LieData::ad_matrix(const Mat& g) const {
  Mat gi = g.inverse();
  Mat A(dim, dim);
  for (int j = 0; j < dim; ++j) A.col(j) = coords(g * basis[j] * gi);
  return A;
}

Vec LieData::flat(const Mat& X) const {
  Vec xi(dim);
  for (int j = 0; j < dim; ++j) xi(j) = pair(X, basis[j]);
  return xi;
}

Mat LieData::sharp(const Vec& xi) const { return element(pairing_inv * xi); }

Mat identity(int n) { return Mat::Identity(n, n); }

Mat expm(const Mat& X) { return X.exp(); }

Mat pr_T(const Mat& g) {
  Mat t = Mat::Zero(g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i) t(i, i) = g(i, i);
  return t;
}

Mat strict_lower(const Mat& X) {
  Mat Y = X;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = i; j < X.cols(); ++j) Y(i, j) = 0;
  return Y;
}

Mat strict_upper(const Mat& X) {
  Mat Y = X;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j <= i && j < X.cols(); ++j) Y(i, j) = 0;
  return Y;
}

LieData build_sl(int n, double pairing_scale) {
  if (n < 2) throw Error("sl(n) needs n >= 2");
  LieData L;
  L.n = n;
  L.rank = n - 1;
  L.npos = n * (n - 1) / 2;
  L.dim = n * n - 1;
  L.scale = pairing_scale;

  std::vector<Mat> hs;
  for (int i = 0; i < n - 1; ++i) {
    Mat v = Mat::Zero(n, n);
    v(i, i) = 1;
    v(i + 1, i + 1) = -1;
    for (const Mat& h : hs) v -= (v * h).trace() * h;
    v /= std::sqrt((v * v).trace().real());
    hs.push_back(v);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      L.root_pairs.push_back({i, j});
      std::vector<int> r(n, 0);
      r[i] = 1;
      r[j] = -1;
      L.roots.push_back(r);
    }
  L.basis = hs;
  for (auto [i, j] : L.root_pairs) {
    Mat E = Mat::Zero(n, n);
    E(i, j) = 1;
    L.basis.push_back(E);
  }
  for (auto [i, j] : L.root_pairs) {
    Mat F = Mat::Zero(n, n);
    F(j, i) = 1;
    L.basis.push_back(F);
  }

  const int d = L.dim;
  L.pairing.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) L.pairing(a, b) = L.pair(L.basis[a], L.basis[b]);
  L.pairing_inv = L.pairing.inverse();

  L.structure = Tensor3(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec c = L.coords(commutator(L.basis[i], L.basis[j]));
      for (int k = 0; k < d; ++k) L.structure(k, i, j) = c(k);
    }

  L.lambda = Mat::Zero(d, d);
  for (int a = 0; a < L.npos; ++a) {
    L.lambda(L.neg(a), L.pos(a)) += 0.5 / pairing_scale;
    L.lambda(L.pos(a), L.neg(a)) -= 0.5 / pairing_scale;
  }
  L.r_tensor = 0.5 * L.pairing_inv + L.lambda;

  // form(a,b,c) = <X_a, [X_b, X_c]>
  Tensor3 form(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        cd s = 0;
        for (int k = 0; k < d; ++k) s += L.pairing(a, k) * L.structure(k, b, c);
        form(a, b, c) = s;
      }
  // raise each index with s^{-1}
  const Mat& si = L.pairing_inv;
  Tensor3 t1(d), t2(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        cd s = 0;
        for (int k = 0; k < d; ++k) s += si(a, k) * form(k, b, c);
        t1(a, b, c) = s;
      }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        cd s = 0;
        for (int k = 0; k < d; ++k) s += si(b, k) * t1(a, k, c);
        t2(a, b, c) = s;
      }
  L.chi = Tensor3(d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        cd s = 0;
        for (int k = 0; k < d; ++k) s += si(c, k) * t2(a, b, k);
        L.chi(a, b, c) = 0.25 * s;
      }
  return L;
}

GaussFactors gauss_decompose(const Mat& g, double tol) {
  const int n = static_cast<int>(g.rows());
  const double nrm = std::max(1.0, g.cwiseAbs().maxCoeff());
  Mat U = g;
  Mat Lo = Mat::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(U(j, j)) < tol * nrm) {
      std::ostringstream os;
      os << "leading principal minor " << (j + 1) << " vanishes";
      throw OffBigCell(os.str());
    }
    for (int i = j + 1; i < n; ++i) {
      cd f = U(i, j) / U(j, j);
      U.row(i) -= f * U.row(j);
      Lo(i, j) = f;
    }
  }
  GaussFactors out;
  out.lower = Lo;
  out.torus = pr_T(U);
  Mat Dinv = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) Dinv(i, i) = 1.0 / U(i, i);
  out.upper = Dinv * U;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out.upper(i, j) = 0;
  return out;
}

Mat torus_sqrt(const Mat& t) {
  const int n = static_cast<int>(t.rows());
  Mat s = Mat::Zero(n, n);
  cd prod = 1;
  for (int i = 0; i + 1 < n; ++i) {
    s(i, i) = std::sqrt(t(i, i));
    prod *= s(i, i);
  }
  s(n - 1, n - 1) = 1.0 / prod;
  return s;
}

Perm identity_perm(int n) {
  Perm u(n);
  for (int i = 0; i < n; ++i) u[i] = i;
  return u;
}

Perm longest_element(int n) {
  Perm u(n);
  for (int i = 0; i < n; ++i) u[i] = n - 1 - i;
  return u;
}

Perm simple_reflection(int n, int i) {
  Perm u = identity_perm(n);
  std::swap(u[i], u[i + 1]);
  return u;
}

Perm compose(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (size_t i = 0; i < b.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm inverse(const Perm& a) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<int>(i);
  return c;
}

int perm_length(const Perm& u) {
  int l = 0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j)
      if (u[i] > u[j]) ++l;
  return l;
}

std::string perm_to_string(const Perm& u) {
  std::string s;
  for (int x : u) s += std::to_string(x + 1);
  return s;
}

Perm perm_from_string(const std::string& s) {
  Perm u;
  for (char c : s) {
    if (c < '1' || c > '9') throw Error("bad permutation digit in '" + s + "'");
    u.push_back(c - '1');
  }
  Perm seen(u.size(), 0);
  for (int x : u) {
    if (x >= static_cast<int>(u.size()) || seen[x]) throw Error("'" + s + "' is not a permutation");
    seen[x] = 1;
  }
  return u;
}

Mat perm_matrix(const Perm& u) {
  const int n = static_cast<int>(u.size());
  Mat P = Mat::Zero(n, n);
  for (int c = 0; c < n; ++c) P(u[c], c) = 1;
  return P;
}

Mat weyl_rep(const Perm& u) {
  Mat P = perm_matrix(u);
  if (perm_length(u) % 2 == 1) P(u[0], 0) = -1;
  return P;
}

namespace {

int numeric_rank(const Mat& block, double nrm, double tol) {
  if (block.rows() == 0 || block.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(block);
  const auto& s = svd.singularValues();
  const double lo = tol * nrm;
  const double hi = std::sqrt(tol) * nrm;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > hi)
      ++r;
    else if (s(i) > lo)
      throw RankAmbiguous("singular value " + std::to_string(s(i)) + " lies in the undecided band");
  }
  return r;
}

}  // namespace

Perm bruhat_word(const Mat& g, double tol) {
  const int n = static_cast<int>(g.rows());
  const double nrm = g.norm();
  // rk(i, j) = rank of rows i..n-1, columns 0..j-1
  std::vector<std::vector<int>> rk(n + 1, std::vector<int>(n + 1, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 1; j <= n; ++j) rk[i][j] = numeric_rank(g.block(i, 0, n - i, j), nrm, tol);
  Perm u(n, -1);
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      int e = rk[i][c + 1] - rk[i][c] - rk[i + 1][c + 1] + rk[i + 1][c];
      if (e == 1) {
        if (u[c] != -1) throw RankAmbiguous("inconsistent rank profile");
        u[c] = i;
      } else if (e != 0) {
        throw RankAmbiguous("inconsistent rank profile");
      }
    }
    if (u[c] == -1) throw RankAmbiguous("inconsistent rank profile");
  }
  return u;
}

std::string subgroup_name(Subgroup s) {
  switch (s) {
    case Subgroup::G: return "G";
    case Subgroup::BPlus: return "B+";
    case Subgroup::BMinus: return "B-";
    case Subgroup::NPlus: return "N+";
    case Subgroup::NMinus: return "N-";
    case Subgroup::T: return "T";
    case Subgroup::GStar: return "G*";
    case Subgroup::GStarDual: return "G*-dual";
    case Subgroup::BTildePlus: return "Btilde+";
    case Subgroup::BruhatCell: return "bruhat";
  }
  return "?";
}

namespace {

double mscale(const Mat& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

bool small(const Mat& x, double ref, double tol) { return x.size() == 0 || x.cwiseAbs().maxCoeff() <= tol * ref; }

bool det_one(const Mat& x, double tol) { return std::abs(x.determinant() - 1.0) <= tol * mscale(x); }

bool unit_diag(const Mat& x, double tol) {
  for (int i = 0; i < x.rows(); ++i)
    if (std::abs(x(i, i) - 1.0) > tol * mscale(x)) return false;
  return true;
}

}  // namespace

bool member(const Mat& x, const SubgroupTag& tag, double tol) {
  if (tag.is_pair()) throw std::invalid_argument("pair subgroup tag applied to a single element");
  if (x.rows() != x.cols()) return false;
  const double s = mscale(x);
  if (!det_one(x, tol)) return false;
  switch (tag.kind) {
    case Subgroup::G: return true;
    case Subgroup::BPlus: return small(strict_lower(x), s, tol);
    case Subgroup::BMinus: return small(strict_upper(x), s, tol);
    case Subgroup::NPlus: return small(strict_lower(x), s, tol) && unit_diag(x, tol);
    case Subgroup::NMinus: return small(strict_upper(x), s, tol) && unit_diag(x, tol);
    case Subgroup::T: return small(x - pr_T(x), s, tol);
    case Subgroup::BruhatCell:
      try {
        return bruhat_word(x, tol) == tag.cell;
      } catch (const RankAmbiguous&) {
        return false;
      }
    default: break;
  }
  return false;
}

bool member(const Mat& a, const Mat& b, const SubgroupTag& tag, double tol) {
  if (!tag.is_pair()) throw std::invalid_argument("single subgroup tag applied to a pair");
  switch (tag.kind) {
    case Subgroup::GStar: {
      if (!member(a, Subgroup::BPlus, tol) || !member(b, Subgroup::BMinus, tol)) return false;
      Mat p = pr_T(a) * pr_T(b);
      return small(p - identity(static_cast<int>(a.rows())), mscale(a) * mscale(b), tol);
    }
    case Subgroup::GStarDual: return member(b, a, Subgroup::GStar, tol);
    case Subgroup::BTildePlus: {
      if (!member(a, Subgroup::BPlus, tol) || !member(b, Subgroup::BPlus, tol)) return false;
      return member(Mat(a * b.inverse()), Subgroup::NPlus, tol);
    }
    default: break;
  }
  return false;
}

std::string lag_name(LagTag t) {
  switch (t) {
    case LagTag::GStar: return "gstar";
    case LagTag::GStarDual: return "gstar-dual";
    case LagTag::BTildePlus: return "btilde+";
    case LagTag::GDelta: return "gdelta";
    case LagTag::GNegDelta: return "gnegdelta";
  }
  return "?";
}

LagrangianSubalgebra lagrangian(const LieData& L, LagTag tag) {
  LagrangianSubalgebra a{tag, {}};
  const int n = L.n;
  Mat Z = Mat::Zero(n, n);
  switch (tag) {
    case LagTag::GStar:
    case LagTag::GStarDual:
      for (int i = 0; i < L.rank; ++i) a.basis.push_back({L.basis[i], -L.basis[i]});
      for (int k = 0; k < L.npos; ++k) a.basis.push_back({L.basis[L.pos(k)], Z});
      for (int k = 0; k < L.npos; ++k) a.basis.push_back({Z, L.basis[L.neg(k)]});
      if (tag == LagTag::GStarDual)
        for (auto& p : a.basis) std::swap(p.first, p.second);
      break;
    case LagTag::BTildePlus:
      for (int i = 0; i < L.rank; ++i) a.basis.push_back({L.basis[i], L.basis[i]});
      for (int k = 0; k < L.npos; ++k) a.basis.push_back({L.basis[L.pos(k)], Z});
      for (int k = 0; k < L.npos; ++k) a.basis.push_back({Z, L.basis[L.pos(k)]});
      break;
    case LagTag::GDelta:
      for (const Mat& X : L.basis) a.basis.push_back({X, X});
      break;
    case LagTag::GNegDelta:
      for (const Mat& X : L.basis) a.basis.push_back({X, -X});
      break;
  }
  return a;
}

double isotropy_defect(const LieData& L, const LagrangianSubalgebra& a) {
  double m = 0;
  for (const auto& p : a.basis)
    for (const auto& q : a.basis) m = std::max(m, std::abs(L.pair(p.first, q.first) - L.pair(p.second, q.second)));
  return m;
}

namespace {

Mat stacked(const LieData& L, const LagrangianSubalgebra& a) {
  Mat S(2 * L.dim, static_cast<int>(a.basis.size()));
  for (int c = 0; c < static_cast<int>(a.basis.size()); ++c) {
    S.col(c).head(L.dim) = L.coords(a.basis[c].first);
    S.col(c).tail(L.dim) = L.coords(a.basis[c].second);
  }
  return S;
}

}  // namespace

int lagrangian_dim(const LieData& L, const LagrangianSubalgebra& a) {
  Eigen::FullPivLU<Mat> lu(stacked(L, a));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

double closure_defect(const LieData& L, const LagrangianSubalgebra& a) {
  Mat S = stacked(L, a);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(S);
  double m = 0;
  for (const auto& p : a.basis)
    for (const auto& q : a.basis) {
      Vec v(2 * L.dim);
      v.head(L.dim) = L.coords(commutator(p.first, q.first));
      v.tail(L.dim) = L.coords(commutator(p.second, q.second));
      Vec res = S * cod.solve(v) - v;
      m = std::max(m, res.cwiseAbs().maxCoeff());
    }
  return m;
}

Mat correction_bivector(const LieData& L, const LagrangianSubalgebra& a) {
  switch (a.tag) {
    case LagTag::GStar: return L.lambda;
    case LagTag::GStarDual: return -L.lambda;
    case LagTag::BTildePlus:
    case LagTag::GDelta: return Mat::Zero(L.dim, L.dim);
    case LagTag::GNegDelta: break;
  }
  throw UnsupportedLagrangian(lag_name(a.tag) + " is not closed under the bracket, so it defines no decoration");
}

Mat correction_bivector_generic(const LieData& L, const LagrangianSubalgebra& a) {
  const int d = L.dim;
  const int m = static_cast<int>(a.basis.size());
  Mat U(d, m), W(d, m);
  for (int c = 0; c < m; ++c) {
    U.col(c) = L.coords(0.5 * (a.basis[c].first + a.basis[c].second));
    W.col(c) = L.coords(0.5 * (a.basis[c].first - a.basis[c].second));
  }
  // k = a /\ g_Delta is spanned by U * ker(W)
  Eigen::FullPivLU<Mat> luW(W);
  luW.setThreshold(1e-10);
  Mat kerW = luW.kernel();
  Mat Kspan = (kerW.cols() > 0 && luW.rank() < m) ? Mat(U * kerW) : Mat(Mat::Zero(d, 0));
  // projector onto the orthogonal complement of k (Euclidean in coordinates)
  Mat Pk = Mat::Identity(d, d);
  if (Kspan.cols() > 0) {
    Eigen::JacobiSVD<Mat> svd(Kspan, Eigen::ComputeThinU);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-10) ++r;
    Mat Q = svd.matrixU().leftCols(r);
    Pk -= Q * Q.adjoint();
  }
  // unknowns: pi(a, b) for a < b; equations: Pk (-2 pi s w_c - u_c) = 0, plus pi in complement of k
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) idx.push_back({i, j});
  const int nu = static_cast<int>(idx.size());
  Mat A(d * m, nu);
  for (int t = 0; t < nu; ++t) {
    Mat pi = Mat::Zero(d, d);
    pi(idx[t].first, idx[t].second) = 1;
    pi(idx[t].second, idx[t].first) = -1;
    Mat img = Pk * (-2.0 * pi * L.pairing * W);
    A.col(t) = Eigen::Map<Vec>(img.data(), d * m);
  }
  Mat rhs = Pk * U;
  Vec b = Eigen::Map<Vec>(rhs.data(), d * m);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
  cod.setThreshold(1e-11);
  Vec x = cod.solve(b);
  if ((A * x - b).cwiseAbs().maxCoeff() > 1e-8)
    throw UnsupportedLagrangian("subalgebra is not a graph over the complement of its diagonal part");
  Mat pi = Mat::Zero(d, d);
  for (int t = 0; t < nu; ++t) {
    pi(idx[t].first, idx[t].second) = x(t);
    pi(idx[t].second, idx[t].first) = -x(t);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::abs(pi(i, j)) < 1e-13) pi(i, j) = 0;
  return pi;
}

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

std::uint64_t Rng::next() { return splitmix(state_); }

double Rng::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * (1.0 / 9007199254740992.0); }

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

cd Rng::cnormal() { return cd(normal(), normal()); }

Rng Rng::child(std::uint64_t index) const {
  std::uint64_t s = seed_ ^ (0xD1B54A32D192ED03ULL * (index + 1));
  splitmix(s);
  return Rng(s);
}

Mat random_traceless(int n, Rng& rng, double scale) {
  Mat X(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = scale * rng.cnormal();
  cd tr = X.trace() / static_cast<double>(n);
  for (int i = 0; i < n; ++i) X(i, i) -= tr;
  return X;
}

Mat random_sl(int n, Rng& rng, double scale) { return expm(random_traceless(n, rng, scale)); }

namespace {

Mat random_triangular(int n, Rng& rng, bool upper, bool with_torus, double scale) {
  Mat X = random_traceless(n, rng, scale);
  X = upper ? Mat(strict_upper(X)) : Mat(strict_lower(X));
  if (with_torus) {
    Mat t = pr_T(random_traceless(n, rng, scale));
    X += t;
  }
  return expm(X);
}

}  // namespace

Mat random_bplus(int n, Rng& rng, bool with_torus, double scale) {
  return random_triangular(n, rng, true, with_torus, scale);
}

Mat random_bminus(int n, Rng& rng, bool with_torus, double scale) {
  return random_triangular(n, rng, false, with_torus, scale);
}

Mat random_torus(int n, Rng& rng, double scale) { return expm(pr_T(random_traceless(n, rng, scale))); }

}  // namespace qpm
