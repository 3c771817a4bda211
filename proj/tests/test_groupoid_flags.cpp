#include <doctest.h>

#include "qpm/groupoid_flags.hpp"

using namespace qpm;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat weyl_s1_sl2() { return weyl_rep(simple_reflection(2, 0)); }

// Gauge by B+ at v_2..v_k of disc(k), identity at v_1 and v_{k+1}.
std::vector<Mat> disc_gauge(const MarkedSurface& S, int n, Rng& rng) {
  std::vector<Mat> g(S.vertices.size(), identity(n));
  for (int i = 2; i <= S.param; ++i) g[S.vertex_id("v" + std::to_string(i))] = random_bplus(n, rng);
  return g;
}

// Explicit Bruhat factorization in SL2 for c != 0: g = [[1, a/c], [0, 1]] w [[c, d], [0, 1/c]].
std::pair<Mat, Mat> sl2_big_cell_factors(const Mat& g) {
  const cd a = g(0, 0), c = g(1, 0), d = g(1, 1);
  Mat left = identity(2), right = Mat::Zero(2, 2);
  left(0, 1) = a / c;
  right(0, 0) = c;
  right(0, 1) = d;
  right(1, 1) = 1.0 / c;
  return {left, right};
}

}  // namespace

TEST_CASE("equal_ftilde decides orbits") {
  for (int n : {2, 3}) {
    Rng rng(10 + n);
    for (int k : {1, 2, 3, 4}) {
      FtildePoint a = random_ftilde(k, n, rng);
      CHECK(equal_ftilde(a, a));
      FtildePoint b = act_ftilde(random_bplus_tuple(k - 1, n, rng), a);
      CHECK(equal_ftilde(a, b));
      CHECK(equal_ftilde(b, a));
      FtildePoint c = act_ftilde(random_bplus_tuple(k - 1, n, rng), b);
      CHECK(equal_ftilde(a, c));
      CHECK_FALSE(equal_ftilde(a, random_ftilde(k, n, rng)));
    }
  }
  Mat w = weyl_s1_sl2();
  CHECK_FALSE(equal_ftilde(FtildePoint{{identity(2), identity(2)}}, FtildePoint{{w, w.inverse()}}));
}

TEST_CASE("psi on decorated discs") {
  for (int n : {2, 3}) {
    Rng rng(20 + n);
    for (int k : {2, 3, 4}) {
      auto ctx = make_context(disc(k));
      FtildePoint id = psi(identity_point(ctx, n));
      CHECK(id.k() == k);
      for (const Mat& g : id.g) CHECK(max_abs(g - identity(n)) == 0);
      for (int s = 0; s < 100; ++s) {
        RepPoint p = random_point(ctx, n, rng);
        FtildePoint a = psi(p);
        RepPoint back = psi_inverse(ctx, a);
        for (int i = 0; i < p.size(); ++i) CHECK(max_abs(back.values[i] - p.values[i]) < 1e-10);
        if (s < 10) {
          RepPoint q = gauge_act(disc_gauge(ctx->surface, n, rng), p);
          CHECK(equal_ftilde(a, psi(q)));
        }
      }
    }
  }
}

TEST_CASE("chi_pair") {
  Rng rng(31);
  FtildePoint I2{{identity(2), identity(2)}};
  for (const Mat& g : chi_pair(I2, I2).g) CHECK(max_abs(g - identity(2)) == 0);
  Mat g = random_sl(2, rng), h = random_sl(2, rng);
  FtildePoint c = chi_pair(FtildePoint{{g}}, FtildePoint{{h}});
  REQUIRE(c.k() == 2);
  CHECK(max_abs(c.g[0] - g) == 0);
  CHECK(max_abs(c.g[1] - h.inverse()) < 1e-14);

  // psi on disc(2n) followed by splitting into (a_1..a_n), (a_2n^-1..a_{n+1}^-1)
  for (int n : {1, 2}) {
    auto ctx = make_context(disc(2 * n));
    for (int s = 0; s < 10; ++s) {
      RepPoint p = random_point(ctx, 3, rng);
      FtildePoint full = psi(p), left, right;
      for (int i = 0; i < n; ++i) left.g.push_back(full.g[i]);
      for (int i = 2 * n - 1; i >= n; --i) right.g.push_back(full.g[i].inverse());
      CHECK(equal_ftilde(chi_pair(left, right), full));
      // the diagonal B+ acts on both halves through the shared vertex
      Mat b = random_bplus(3, rng);
      FtildePoint l2 = left, r2 = right;
      l2.g.back() = l2.g.back() * b.inverse();
      r2.g.back() = r2.g.back() * b.inverse();
      CHECK(equal_ftilde(chi_pair(l2, r2), full));
    }
  }
}

TEST_CASE("j_map") {
  Rng rng(41);
  JImage J0 = j_map(FtildePoint{{identity(3), identity(3), identity(3)}});
  REQUIRE(J0.flags.size() == 2);
  for (const Mat& f : J0.flags) CHECK(max_abs(f - identity(3)) < 1e-15);
  CHECK(max_abs(J0.product - identity(3)) == 0);
  for (int s = 0; s < 20; ++s) {
    FtildePoint p = random_ftilde(3, 3, rng);
    JImage J = j_map(p);
    CHECK(same_coset(J.flags[0], p.g[0]));
    CHECK(same_coset(J.flags[1], p.g[0] * p.g[1]));
    CHECK(max_abs(J.product - p.g[0] * p.g[1] * p.g[2]) < 1e-12);
    JImage K = j_map(act_ftilde(random_bplus_tuple(2, 3, rng), p));
    for (int i = 0; i < 2; ++i) {
      CHECK_FALSE(K.off_cell[i]);
      CHECK(max_abs(K.flags[i] - J.flags[i]) < 1e-9);
    }
    CHECK(max_abs(K.product - J.product) < 1e-10);
  }
  JImage off = j_map(FtildePoint{{weyl_s1_sl2(), identity(2)}});
  CHECK(off.off_cell[0]);
}

TEST_CASE("decorated disc bivector equals the mixed-product expression") {
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    Rng rng(50 + n);
    for (int k : {2, 3, 4}) {
      auto ctx = make_context(disc(k));
      Decoration dec = disc_decoration(ctx->surface);
      for (int s = 0; s < 5; ++s) {
        RepPoint p = random_point(ctx, n, rng);
        CHECK(max_abs(full_bivector(L, p, dec) - psi_printed_bivector(L, p)) < 1e-12);
      }
    }
  }
}

TEST_CASE("dual flag groupoid structure maps") {
  Rng rng(61);
  for (int n : {2, 3}) {
    FnPoint g = random_fn(2, n, rng);
    FstarPoint u = fstar_unit(g);
    CHECK(is_fstar_point(u));
    FnPoint t = fstar_target(u);
    for (int i = 0; i < 2; ++i) CHECK(max_abs(t.g[i] - g.g[i]) == 0);
  }
  // x = y = I, z = (I, I), b in B+: target (g_1, g_2 b^-1)
  FnPoint g = random_fn(2, 2, rng);
  FstarElement k = fstar_identity_element(2, 2);
  k.b = random_bplus(2, rng);
  FnPoint h = fstar_act(k, g);
  CHECK(max_abs(h.g[0] - g.g[0]) == 0);
  CHECK(max_abs(h.g[1] - g.g[1] * k.b.inverse()) < 1e-14);
  CHECK(equal_fn(h, g));
}

TEST_CASE("dual flag groupoid axioms") {
  for (int n : {2, 3}) {
    for (int count : {1, 2, 3}) {
      Rng rng(70 + 10 * n + count);
      for (int s = 0; s < 50; ++s) {
        FstarPoint r = random_fstar(count, n, rng);
        for (int i = 0; i < count; ++i)
          if ((s + i) % 2 == 0)
            r.base[i] = random_bplus(n, rng) * weyl_rep(simple_reflection(n, (s + i) % (n - 1))) * random_bplus(n, rng);
        FstarPoint q = random_fstar(count, n, rng);
        q.base = act_fn(random_bplus_tuple(count, n, rng), fstar_target(r)).g;
        FstarPoint p = random_fstar(count, n, rng);
        p.base = act_fn(random_bplus_tuple(count, n, rng), fstar_target(q)).g;
        CHECK(is_fstar_point(p));
        FstarPoint pq = fstar_compose(p, q), qr = fstar_compose(q, r);
        CHECK(equal_fn(fstar_source(pq), fstar_source(q)));
        CHECK(equal_fn(fstar_target(pq), fstar_target(p)));
        CHECK(equal_fstar(fstar_compose(pq, r), fstar_compose(p, qr)));
        CHECK(equal_fstar(fstar_compose(fstar_unit(fstar_target(p)), p), p));
        CHECK(equal_fstar(fstar_compose(p, fstar_unit(fstar_source(p))), p));
        FstarPoint pi = fstar_inverse(p);
        CHECK(equal_fstar(fstar_compose(pi, p), fstar_unit(fstar_source(p))));
        CHECK(equal_fstar(fstar_compose(p, pi), fstar_unit(fstar_target(p))));
        // changing representative does not change the arrow or its target
        std::vector<Mat> c = random_bplus_tuple(count, n, rng);
        FstarPoint pt = fstar_twist(c, p);
        CHECK(equal_fstar(p, pt));
        CHECK(equal_fn(fstar_target(pt), fstar_target(p)));
        // generalized Schubert cells are preserved
        CHECK(schubert_word(fstar_target(p)) == schubert_word(fstar_source(p)));
        CHECK(schubert_word(fstar_source(p)) == schubert_word(FnPoint{r.base}));
      }
      FstarPoint a = random_fstar(count, n, rng), b = random_fstar(count, n, rng);
      CHECK_THROWS_AS(fstar_compose(a, b), NonComposable);
    }
  }
}

TEST_CASE("Schubert words") {
  Rng rng(81);
  SchubertWord e = schubert_word(FnPoint{{identity(3), identity(3)}});
  for (const Perm& u : e.words) CHECK(u == identity_perm(3));
  Mat anti = Mat::Zero(2, 2);
  anti(0, 1) = -1;
  anti(1, 0) = 1;
  SchubertWord w = schubert_word(FnPoint{{anti, identity(2)}});
  CHECK(w.words[0] == simple_reflection(2, 0));
  CHECK(w.words[1] == identity_perm(2));
  for (int s = 0; s < 20; ++s) {
    FnPoint p = random_fn(3, 3, rng);
    p.g[1] = random_bplus(3, rng) * weyl_rep(longest_element(3)) * random_bplus(3, rng);
    CHECK(schubert_word(act_fn(random_bplus_tuple(3, 3, rng), p)) == schubert_word(p));
  }
  // n = 1, SL2: any two points of the big cell are joined by an arrow
  for (int s = 0; s < 20; ++s) {
    Mat g1 = random_sl(2, rng), g2 = random_sl(2, rng);
    auto [l1, r1] = sl2_big_cell_factors(g1);
    auto [l2, r2] = sl2_big_cell_factors(g2);
    Mat w = Mat::Zero(2, 2);
    w(0, 1) = -1;
    w(1, 0) = 1;
    CHECK(max_abs(l1 * w * r1 - g1) < 1e-12);
    Mat x = l2 * l1.inverse();
    FstarPoint arrow{x, pr_T(x).inverse(), {}, {g1}};
    CHECK(is_fstar_point(arrow));
    CHECK(equal_fn(fstar_target(arrow), FnPoint{{g2}}));
  }
}

TEST_CASE("Gamma subobjects") {
  Rng rng(91);
  CHECK(gamma_member(FtildePoint{{identity(2), identity(2)}}));
  CHECK(gamma_member(FtildePoint{{random_bminus(3, rng), identity(3), identity(3), identity(3)}}));
  CHECK_FALSE(gamma_member(FtildePoint{{weyl_s1_sl2(), identity(2)}}));
  for (int s = 0; s < 10; ++s) {
    FtildePoint p{{random_sl(3, rng), random_sl(3, rng), random_sl(3, rng)}};
    p.g.push_back((p.g[0] * p.g[1] * p.g[2]).inverse() * random_bminus(3, rng));
    CHECK(gamma_member(p));
    CHECK(gamma_member(act_ftilde(random_bplus_tuple(3, 3, rng), p)));
  }

  FnPoint base = random_fn(2, 2, rng);
  Mat I = identity(2);
  CHECK(gamma_star_member(FstarPoint{I, I, {random_bplus(2, rng, false)}, base.g}));
  Mat x = Mat::Zero(2, 2), y = Mat::Zero(2, 2);
  x(0, 0) = 2;
  x(1, 1) = 0.5;
  y(0, 0) = 0.5;
  y(1, 1) = 2;
  CHECK(gamma_star_member(FstarPoint{x, y, {I}, base.g}));
  y(1, 0) = 0.3;
  CHECK_FALSE(gamma_star_member(FstarPoint{x, y, {I}, base.g}));
}

TEST_CASE("point serialization") {
  Rng rng(3);
  FstarPoint p = random_fstar(2, 2, rng);
  nlohmann::json j = to_json(p);
  CHECK(j["kind"] == "fstar");
  CHECK(j["base"].size() == 2);
  CHECK(j["x"][0][0][0].get<double>() == doctest::Approx(p.x(0, 0).real()));
}
