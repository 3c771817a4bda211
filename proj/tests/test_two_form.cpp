#include <doctest.h>

#include "qpm/fission.hpp"
#include "qpm/two_form.hpp"

using namespace qpm;

namespace {

Mat E2() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}
Mat F2() {
  Mat m = Mat::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

Tangent random_tangent(int size, int n, Rng& rng) {
  Tangent t;
  for (int i = 0; i < size; ++i) t.push_back(random_traceless(n, rng, 1.0));
  return t;
}

// Two discs glued along a two-edge path, so that the middle vertex is interior.
MarkedSurface two_triangles_with_interior_vertex() {
  MarkedSurface A = disc(3), B = disc(2);
  return glue(A, B, {{A.edge_id("a1"), B.edge_id("a1")}, {A.edge_id("a2"), B.edge_id("a3")}});
}

}  // namespace

TEST_CASE("triangle form at the identity") {
  LieData L = build_sl(2);
  Mat I = identity(2), Z = Mat::Zero(2, 2);
  CHECK(std::abs(triangle_form(L, I, E2(), Z, Z, F2()) - 0.5) < 1e-15);
  CHECK(std::abs(triangle_form(L, I, E2(), F2(), E2(), F2())) < 1e-15);

  // disc(2): the only triangle has a1 = x2 and a2 = a2^-1; bigons contribute nothing
  MarkedSurface S = disc(2);
  Triangulation T = triangulate(S);
  std::vector<Mat> vals(S.edges.size(), I);
  Tangent xi(S.edges.size(), Z), eta(S.edges.size(), Z);
  xi[S.edge_id("x2")] = E2();
  eta[S.edge_id("a2")] = -F2();
  CHECK(std::abs(two_form_edges(L, S, T, vals, xi, eta) - 0.5) < 1e-15);
}

TEST_CASE("two-form is antisymmetric and rejects non-matching edge values") {
  LieData L = build_sl(3);
  for (int k = 2; k <= 4; ++k) {
    auto ctx = make_context(disc(k));
    Triangulation T = triangulate(ctx->surface);
    Rng rng(40 + k);
    RepPoint p = random_point(ctx, 3, rng);
    Tangent a = random_tangent(p.size(), 3, rng), b = random_tangent(p.size(), 3, rng);
    CHECK(std::abs(two_form(L, T, p, a, a)) < 1e-12);
    CHECK(std::abs(two_form(L, T, p, a, b) + two_form(L, T, p, b, a)) < 1e-12);
    std::vector<Mat> vals = all_edge_values(p);
    vals[0] = random_sl(3, rng);
    CHECK_THROWS_AS(two_form_edges(L, ctx->surface, T, vals, all_edge_tangents(p, a), all_edge_tangents(p, b)),
                    NonMatchingPoint);
  }
}

TEST_CASE("two-form does not depend on the fan start") {
  LieData L = build_sl(2);
  auto ctx = make_context(disc(4));
  const auto& S = ctx->surface;
  Rng rng(9);
  RepPoint p = random_point(ctx, 2, rng);
  Tangent a = random_tangent(p.size(), 2, rng), b = random_tangent(p.size(), 2, rng);
  cd w0 = two_form(L, triangulate(S), p, a, b);
  for (size_t f = 0; f < S.faces.size(); ++f)
    for (int s = 1; s < static_cast<int>(S.faces[f].size()); ++s) {
      cd w = two_form(L, triangulate(S, {{static_cast<int>(f), s}}), p, a, b);
      CHECK(std::abs(w - w0) < 1e-11);
    }
}

TEST_CASE("two-form descends along gauge directions at interior vertices") {
  MarkedSurface S = two_triangles_with_interior_vertex();
  CHECK(S.euler_characteristic() == 1);
  CHECK(S.marked_vertices().size() == 3);
  Triangulation T = triangulate(S);
  CHECK(T.interior_vertices.size() == 1);
  const int w = T.interior_vertices[0];
  auto ctx = make_context(S, std::vector<int>{});
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    Rng rng(77 + n);
    for (int s = 0; s < 5; ++s) {
      RepPoint p = random_point(ctx, n, rng);
      CHECK(relation_defect(p) < 1e-12);
      std::vector<Mat> vals = all_edge_values(p);
      Mat u = random_traceless(n, rng, 1.0);
      Tangent gauge(S.edges.size(), Mat::Zero(n, n));
      for (size_t e = 0; e < S.edges.size(); ++e) {
        if (S.edges[e].T == w) gauge[e] += u;
        if (S.edges[e].S == w) gauge[e] -= vals[e] * u * vals[e].inverse();
      }
      Tangent eta = all_edge_tangents(p, random_tangent(p.size(), n, rng));
      CHECK(std::abs(two_form_edges(L, S, T, vals, gauge, eta)) < 1e-10);
      // a gauge direction at a marked vertex is not in the kernel
      const int m = S.marked_vertices().front();
      Tangent gm(S.edges.size(), Mat::Zero(n, n));
      for (size_t e = 0; e < S.edges.size(); ++e) {
        if (S.edges[e].T == m) gm[e] += u;
        if (S.edges[e].S == m) gm[e] -= vals[e] * u * vals[e].inverse();
      }
      CHECK(std::abs(two_form_edges(L, S, T, vals, gm, eta)) > 1e-6);
    }
  }
}

TEST_CASE("null space") {
  Mat C = Mat::Zero(2, 4);
  C(0, 0) = 1;
  C(1, 1) = 1;
  C(1, 2) = 1;
  Mat K = null_space(C);
  CHECK(K.cols() == 2);
  CHECK((C * K).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fission space: moment, action and form") {
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    Rng rng(500 + n);
    FissionPoint unit{identity(n), identity(n), identity(n)};
    FissionMoment mu0 = fission_moment(unit);
    CHECK((mu0.g - identity(n)).cwiseAbs().maxCoeff() == 0);
    CHECK((mu0.t - identity(n)).cwiseAbs().maxCoeff() == 0);
    for (int s = 0; s < 10; ++s) {
      FissionPoint p = random_fission_point(n, rng);
      CHECK(is_fission_point(p));
      Mat g = random_sl(n, rng), t = random_torus(n, rng);
      FissionPoint q = fission_act(g, t, p);
      CHECK(is_fission_point(q));
      FissionMoment m = fission_moment(p), mq = fission_moment(q);
      CHECK((mq.g - g * m.g * g.inverse()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((mq.t - m.t).cwiseAbs().maxCoeff() < 1e-12);
      FissionTangent u = random_fission_tangent(n, rng), v = random_fission_tangent(n, rng);
      cd w = fission_form(L, p, u, v);
      CHECK(std::abs(w + fission_form(L, p, v, u)) < 1e-12);
      cd wq = fission_form(L, q, fission_act_tangent(g, t, u), fission_act_tangent(g, t, v));
      CHECK(std::abs(wq - w) < 1e-9 * (1 + std::abs(w)));
    }
  }
}

TEST_CASE("fission space moment conditions") {
  // iota_{v_X} omega = c <mu^* (theta^l + theta^r) / 2, X> with c = 1 for the
  // G factor and c = 2 for the T factor under the wedge convention above
  for (int n : {2, 3}) {
    LieData L = build_sl(n);
    Rng rng(600 + n);
    for (int s = 0; s < 10; ++s) {
      FissionPoint p = random_fission_point(n, rng);
      FissionTangent v = random_fission_tangent(n, rng);
      auto [dg, dt] = fission_moment_derivative(p, v);
      FissionMoment mu = fission_moment(p);
      Mat X = random_traceless(n, rng, 1.0);
      Mat Y = pr_T(random_traceless(n, rng, 1.0));
      Mat Z = Mat::Zero(n, n);
      cd lhs_g = fission_form(L, p, fission_generator(p, X, Z), v);
      Mat theta_r = dg, theta_l = mu.g.inverse() * dg * mu.g;
      cd rhs_g = 0.5 * L.pair(theta_l + theta_r, X);
      CHECK(std::abs(lhs_g - rhs_g) < 1e-9 * (1 + std::abs(rhs_g)));
      cd lhs_t = fission_form(L, p, fission_generator(p, Z, Y), v);
      cd rhs_t = L.pair(dt, Y);
      CHECK(std::abs(lhs_t - 2.0 * rhs_t) < 1e-9 * (1 + std::abs(rhs_t)));
    }
  }
}
