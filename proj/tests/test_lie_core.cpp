#include "doctest.h"
#include "qpm/lie_core.hpp"

#include <algorithm>
#include <cmath>

using namespace qpm;

namespace {

Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

// Embeds r = sum r^{ab} X_a (x) X_b into positions (p, q) of a triple tensor product.
Mat embed(const LieData& L, const Mat& r, int p, int q) {
  const int n = L.n;
  Mat I = Mat::Identity(n, n);
  Mat out = Mat::Zero(n * n * n, n * n * n);
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b) {
      if (std::abs(r(a, b)) < 1e-15) continue;
      Mat f[3] = {I, I, I};
      f[p] = L.basis[a];
      f[q] = L.basis[b];
      out += r(a, b) * kron(kron(f[0], f[1]), f[2]);
    }
  return out;
}

double maxabs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("sl2 and sl3 dimensions and Cartan normalization") {
  LieData L2 = build_sl(2);
  CHECK(L2.dim == 3);
  CHECK(L2.npos == 1);
  // <H,H> = 2 for H = diag(1,-1), so the orthonormal Cartan element is H/sqrt(2)
  CHECK(std::abs(L2.basis[0](0, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(L2.basis[0](1, 1) + 1.0 / std::sqrt(2.0)) < 1e-15);
  Mat E = Mat::Zero(2, 2), F = Mat::Zero(2, 2);
  E(0, 1) = 1;
  F(1, 0) = 1;
  CHECK(std::abs((E * F).trace() - 1.0) < 1e-15);
  CHECK(maxabs(L2.basis[L2.pos(0)] - E) == 0);
  CHECK(maxabs(L2.basis[L2.neg(0)] - F) == 0);
  LieData L3 = build_sl(3);
  CHECK(L3.dim == 8);
  CHECK(L3.npos == 3);
  CHECK_THROWS_AS(build_sl(1), Error);
}

TEST_CASE("pairing is symmetric, nondegenerate and ad-invariant") {
  for (int n : {2, 3, 4}) {
    LieData L = build_sl(n);
    CHECK(maxabs(L.pairing - L.pairing.transpose()) < 1e-14);
    CHECK(std::abs(L.pairing.determinant()) > 1e-6);
    double worst = 0;
    for (int i = 0; i < L.dim; ++i)
      for (int j = 0; j < L.dim; ++j)
        for (int k = 0; k < L.dim; ++k) {
          cd v = L.pair(commutator(L.basis[i], L.basis[j]), L.basis[k]) +
                 L.pair(L.basis[j], commutator(L.basis[i], L.basis[k]));
          worst = std::max(worst, std::abs(v));
        }
    CHECK(worst < 1e-12);
    for (int a = 0; a < L.npos; ++a) CHECK(std::abs(L.pairing(L.pos(a), L.neg(a)) - 1.0) < 1e-15);
  }
}

TEST_CASE("r-matrix: symmetric part is the Casimir and CYBE holds") {
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    // Casimir from its definition: sum s^{ij} X_i (x) X_j must equal sum over a dual basis
    Mat cas = L.r_tensor + L.r_tensor.transpose();
    CHECK(maxabs(cas - L.pairing_inv) < 1e-14);
    // the Casimir as an n^2 x n^2 matrix is the permutation operator for the trace form
    Mat C = Mat::Zero(n * n, n * n);
    for (int a = 0; a < L.dim; ++a)
      for (int b = 0; b < L.dim; ++b) C += L.pairing_inv(a, b) * kron(L.basis[a], L.basis[b]);
    Mat swap = Mat::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) swap(i * n + j, j * n + i) = 1;
    Mat expected = swap - Mat::Identity(n * n, n * n) / double(n);
    CHECK(maxabs(C - expected) < 1e-13);
    Mat r12 = embed(L, L.r_tensor, 0, 1), r13 = embed(L, L.r_tensor, 0, 2), r23 = embed(L, L.r_tensor, 1, 2);
    Mat cybe = commutator(r12, r13) + commutator(r12, r23) + commutator(r13, r23);
    CHECK(maxabs(cybe) < 1e-10);
    CHECK(maxabs(L.lambda + L.lambda.transpose()) == 0);
  }
}

TEST_CASE("chi is totally skew and matches its defining trace formula") {
  LieData L = build_sl(3);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    Vec xi = Vec::Zero(L.dim), eta = Vec::Zero(L.dim), zeta = Vec::Zero(L.dim);
    for (int i = 0; i < L.dim; ++i) {
      xi(i) = rng.cnormal();
      eta(i) = rng.cnormal();
      zeta(i) = rng.cnormal();
    }
    cd lhs = 0;
    for (int a = 0; a < L.dim; ++a)
      for (int b = 0; b < L.dim; ++b)
        for (int c = 0; c < L.dim; ++c) lhs += L.chi(a, b, c) * xi(a) * eta(b) * zeta(c);
    cd rhs = 0.25 * L.pair(L.sharp(xi), commutator(L.sharp(eta), L.sharp(zeta)));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b)
      for (int c = 0; c < L.dim; ++c) {
        CHECK(std::abs(L.chi(a, b, c) + L.chi(b, a, c)) < 1e-14);
        CHECK(std::abs(L.chi(a, b, c) + L.chi(a, c, b)) < 1e-14);
      }
}

TEST_CASE("sharp and flat") {
  LieData L = build_sl(2);
  CHECK(maxabs(L.sharp(Vec::Zero(3))) == 0);
  Vec dualE = Vec::Zero(3);
  dualE(L.pos(0)) = 1;  // xi(E) = 1, xi(F) = xi(H) = 0
  Mat F = Mat::Zero(2, 2);
  F(1, 0) = 1;
  CHECK(maxabs(L.sharp(dualE) - F) < 1e-15);
  Rng rng(5);
  LieData L3 = build_sl(3);
  for (int t = 0; t < 100; ++t) {
    Vec xi(L3.dim);
    for (int i = 0; i < L3.dim; ++i) xi(i) = rng.cnormal();
    CHECK(maxabs(L3.flat(L3.sharp(xi)) - xi) < 1e-12);
  }
}

TEST_CASE("gauss decomposition examples") {
  Mat g(2, 2);
  g << 1, 1, 1, 2;
  GaussFactors f = gauss_decompose(g);
  Mat lo(2, 2), up(2, 2);
  lo << 1, 0, 1, 1;
  up << 1, 1, 0, 1;
  CHECK(maxabs(f.lower - lo) < 1e-15);
  CHECK(maxabs(f.torus - identity(2)) < 1e-15);
  CHECK(maxabs(f.upper - up) < 1e-15);
  GaussFactors e = gauss_decompose(identity(3));
  CHECK(maxabs(e.lower - identity(3)) == 0);
  Mat w(2, 2);
  w << 0, 1, -1, 0;
  CHECK_THROWS_AS(gauss_decompose(w), OffBigCell);
}

TEST_CASE("gauss decomposition round trip on 1000 big-cell samples") {
  Rng rng(2024);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    int n = 2 + t % 3;
    Mat g = random_sl(n, rng, 0.7);
    GaussFactors f = gauss_decompose(g);
    worst = std::max(worst, maxabs(f.lower * f.torus * f.upper - g));
    CHECK(member(f.lower, Subgroup::NMinus));
    CHECK(member(f.upper, Subgroup::NPlus));
    CHECK(member(f.torus, Subgroup::T));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("torus square root") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Mat d = random_torus(3, rng, 1.0);
    Mat s = torus_sqrt(d);
    CHECK(maxabs(s * s - d) < 1e-12);
    CHECK(std::abs(s.determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("bruhat word examples and construction oracle") {
  CHECK(bruhat_word(identity(3)) == identity_perm(3));
  Mat w(2, 2);
  w << 0, 1, -1, 0;
  CHECK(bruhat_word(w) == simple_reflection(2, 0));
  Mat anti = Mat::Zero(3, 3);
  anti(0, 2) = 1;
  anti(1, 1) = -1;
  anti(2, 0) = 1;
  CHECK(std::abs(anti.determinant() - 1.0) < 1e-15);
  CHECK(bruhat_word(anti) == longest_element(3));
  // every cell is hit by b1 * w * b2 and recovered exactly
  Rng rng(77);
  for (int n : {2, 3, 4}) {
    Perm u = identity_perm(n);
    do {
      for (int rep = 0; rep < 3; ++rep) {
        Mat g = random_bplus(n, rng) * weyl_rep(u) * random_bplus(n, rng);
        CHECK(bruhat_word(g) == u);
      }
    } while (std::next_permutation(u.begin(), u.end()));
  }
}

TEST_CASE("bruhat word is B+ bi-invariant on 100 samples") {
  Rng rng(91);
  for (int t = 0; t < 100; ++t) {
    Mat g = random_sl(3, rng, 0.8);
    if (t % 4 == 1) g = weyl_rep(simple_reflection(3, 0)) * random_bplus(3, rng);
    if (t % 4 == 2) g = random_bplus(3, rng) * weyl_rep(longest_element(3));
    Perm u = bruhat_word(g);
    CHECK(bruhat_word(random_bplus(3, rng) * g * random_bplus(3, rng)) == u);
  }
}

TEST_CASE("weyl representatives have determinant one") {
  Perm u = identity_perm(4);
  do {
    Mat W = weyl_rep(u);
    CHECK(std::abs(W.determinant() - 1.0) < 1e-14);
  } while (std::next_permutation(u.begin(), u.end()));
}

TEST_CASE("membership predicates") {
  Mat I = identity(2);
  CHECK(member(I, I, Subgroup::GStar));
  Mat a(2, 2), b(2, 2);
  a << 2, 0, 0, 0.5;
  b << 0.5, 0, 0, 2;
  CHECK(member(a, a, Subgroup::BTildePlus));
  CHECK(member(a, b, Subgroup::GStar));
  CHECK_FALSE(member(a, a, Subgroup::GStar));
  CHECK(member(b, a, Subgroup::GStarDual));
  Mat l(2, 2);
  l << 1, 0, 3, 1;
  CHECK(member(l, Subgroup::NMinus));
  CHECK_FALSE(member(l, Subgroup::BPlus));
  CHECK(member(a, Subgroup::T));
  CHECK_FALSE(member(Mat(2 * I), Subgroup::G));
  CHECK_THROWS_AS(member(I, Subgroup::GStar), std::invalid_argument);
  Rng rng(8);
  // closure under multiplication on sampled pairs
  for (int t = 0; t < 30; ++t) {
    Mat t1 = random_torus(3, rng), t2 = random_torus(3, rng);
    Mat x1 = t1 * random_bplus(3, rng, false), y1 = t1.inverse() * random_bminus(3, rng, false);
    Mat x2 = t2 * random_bplus(3, rng, false), y2 = t2.inverse() * random_bminus(3, rng, false);
    CHECK(member(x1, y1, Subgroup::GStar));
    CHECK(member(Mat(x1 * x2), Mat(y1 * y2), Subgroup::GStar));
    Mat z = random_bplus(3, rng), zp = random_bplus(3, rng, false) * z;
    Mat w2 = random_bplus(3, rng), wp = random_bplus(3, rng, false) * w2;
    CHECK(member(z, zp, Subgroup::BTildePlus));
    CHECK(member(Mat(z * w2), Mat(zp * wp), Subgroup::BTildePlus));
  }
  SubgroupTag cell{Subgroup::BruhatCell, longest_element(3)};
  CHECK(member(Mat(random_bplus(3, rng) * weyl_rep(longest_element(3))), cell));
  CHECK_FALSE(member(identity(3), cell));
}

TEST_CASE("lagrangian subalgebras are lagrangian and closed") {
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    for (LagTag t : {LagTag::GStar, LagTag::GStarDual, LagTag::BTildePlus, LagTag::GDelta}) {
      LagrangianSubalgebra a = lagrangian(L, t);
      CHECK(lagrangian_dim(L, a) == L.dim);
      CHECK(isotropy_defect(L, a) < 1e-12);
      CHECK(closure_defect(L, a) < 1e-10);
    }
    // the anti-diagonal is Lagrangian but brackets land in the diagonal
    LagrangianSubalgebra anti = lagrangian(L, LagTag::GNegDelta);
    CHECK(lagrangian_dim(L, anti) == L.dim);
    CHECK(isotropy_defect(L, anti) < 1e-12);
    CHECK(closure_defect(L, anti) > 0.1);
  }
}

TEST_CASE("correction bivectors: catalog and generic routine agree") {
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    Mat Z = Mat::Zero(L.dim, L.dim);
    CHECK(maxabs(correction_bivector(L, lagrangian(L, LagTag::BTildePlus)) - Z) == 0);
    CHECK(maxabs(correction_bivector(L, lagrangian(L, LagTag::GStar)) - L.lambda) == 0);
    CHECK(maxabs(correction_bivector(L, lagrangian(L, LagTag::GStarDual)) + L.lambda) == 0);
    CHECK(maxabs(correction_bivector(L, lagrangian(L, LagTag::GStar)) +
                 correction_bivector(L, lagrangian(L, LagTag::GStarDual))) == 0);
    for (LagTag t : {LagTag::GStar, LagTag::GStarDual, LagTag::BTildePlus, LagTag::GDelta}) {
      LagrangianSubalgebra a = lagrangian(L, t);
      CHECK(maxabs(correction_bivector_generic(L, a) - correction_bivector(L, a)) < 1e-10);
    }
    CHECK_THROWS_AS(correction_bivector(L, lagrangian(L, LagTag::GNegDelta)), UnsupportedLagrangian);
  }
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng c0 = Rng(42).child(0), c1 = Rng(42).child(1);
  CHECK(c0.next() != c1.next());
  Rng r(1);
  double s = 0, s2 = 0;
  for (int i = 0; i < 20000; ++i) {
    double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / 20000) < 0.03);
  CHECK(std::abs(s2 / 20000 - 1.0) < 0.05);
}
