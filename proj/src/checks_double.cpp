// Checks on doubled discs: the slim double groupoid, its forms, the Morita
// bimodule, the Gamma-restricted family and the torus action.

#include "qpm/double_groupoid.hpp"
#include "qpm/verify.hpp"

#include <algorithm>

namespace qpm {

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

int half_size(const CheckContext& c) {
  if (c.cfg.surface_k % 2) throw InvalidConfig(c.cfg.check_id + " needs an even doubled disc");
  return c.cfg.surface_k / 2;
}

int split_of(const CheckContext& c) {
  if (c.cfg.surface_k < 2) throw InvalidConfig(c.cfg.check_id + " needs a doubled disc of size at least 2");
  return c.cfg.split > 0 ? c.cfg.split : c.cfg.surface_k / 2;
}

RepContextPtr ctx_of(const CheckContext& c) { return double_context(c.cfg.surface_k); }

double point_size(const RepPoint& p) {
  double mx = 0;
  for (const Mat& v : p.values) mx = std::max(mx, max_abs(v));
  return mx;
}

// Redraws until every generator has entries of size at most `bound`; rank
// decisions and form identities lose digits in proportion to the size of
// the right-trivialized frames otherwise.
template <class Sampler>
RepPoint bounded(Sampler&& draw, double bound = 12.0) {
  for (int t = 0; t < 200; ++t) {
    RepPoint p = draw();
    if (point_size(p) <= bound) return p;
  }
  throw ConstructionFailed("no sample of moderate size");
}

RepPoint moderate_sample(const RepContextPtr& ctx, int n, Rng& rng, double bound = 8.0) {
  return bounded([&] { return sample_decorated(ctx, n, rng); }, bound);
}

Mat random_upper_nilpotent(int n, Rng& rng) {
  Mat X = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) X(i, j) = rng.cnormal();
  return X;
}

RepPoint hole_gauge(const RepPoint& p, Rng& rng) {
  const int k = layout_of(p).k;
  std::vector<Mat> g(p.ctx->surface.vertices.size(), identity(p.n()));
  for (int i = 2; i <= k; ++i) {
    g[i - 1] = random_bplus(p.n(), rng);
    g[k + i] = random_bplus(p.n(), rng);
  }
  return gauge_act(g, p);
}

cd omega(const LieData& L, const RepPoint& p, const Tangent& a, const Tangent& b) {
  return two_form(L, triangulate(p.ctx->surface), p, a, b);
}

bool restricted(const BimoduleQuad& z) {
  return gamma_member(z.h) && gamma_member(z.g) && gamma_star_member(z.rho1) && gamma_star_member(z.rho2);
}

// Collects the first failed law; NonComposable counts as a failure too.
struct Laws {
  SampleOutcome o;
  void operator()(bool ok, const std::string& name) {
    if (!ok && o.diagnostic.empty()) o.diagnostic = name;
  }
  void defect(double d) { o.defect = std::max(o.defect, d); }
};

template <class F>
SampleOutcome guarded(F&& f) {
  try {
    return f();
  } catch (const NonComposable& e) {
    return {0.0, std::string("not composable: ") + e.what(), {}};
  }
}

// Every split of a sampled decorated representation lies in the image of
// theta, independently of the B+ gauge at the inner holes; two off-gauge
// perturbations are rejected with their own diagnostics. The defect is the
// largest membership residual. Mutation: the first perturbation is required
// to pass.
SampleOutcome theta_membership(const CheckContext& c) {
  const int k = c.cfg.surface_k, n = c.cfg.group_n;
  if (k < 2) throw InvalidConfig("theta_membership needs a doubled disc of size at least 2");
  Rng& rng = c.rng;
  RepPoint p = sample_decorated(ctx_of(c), n, rng);
  RepPoint pg = hole_gauge(p, rng);
  Laws law;
  for (int m = 1; m < k; ++m) {
    BimoduleQuad q = theta(p, m);
    MemberResult r = is_member(q);
    law(r.ok, "member rejected at split " + std::to_string(m) + ": " + r.diagnostic);
    law.defect(r.defect);
    law(equal_quad(q, theta(pg, m)), "theta changed under hole gauge");

    BimoduleQuad a = q;
    a.h.g[m - 1] = a.h.g[m - 1] * expm(0.1 * random_upper_nilpotent(n, rng));
    MemberResult ra = is_member(a);
    if (c.cfg.mutate)
      law(ra.ok, "perturbed quadruple rejected");
    else
      law(!ra.ok && ra.diagnostic == "f1 = 1", "right N+ perturbation gave '" + ra.diagnostic + "'");
    BimoduleQuad b = q;
    b.h.g[0] = expm(0.1 * random_traceless(n, rng, 1.0)) * b.h.g[0];
    MemberResult rb = is_member(b);
    law(!rb.ok && rb.diagnostic == "p0(t^V) = t(rho1)", "left perturbation gave '" + rb.diagnostic + "'");
  }
  return law.o;
}

// Units, both associativities and the interchange law on sampled composable
// tuples, class equality at 1e-9. Mutation: the horizontal associativity is
// compared against a two-fold product.
SampleOutcome double_axioms_interchange(const CheckContext& c) {
  return guarded([&] {
    const int h = half_size(c), n = c.cfg.group_n;
    const double tol = 1e-9;
    Rng& rng = c.rng;
    auto ctx = ctx_of(c);
    Laws law;
    RepPoint a = sample_decorated(ctx, n, rng);
    RepPoint b = sample_right_partner(a, h, h, rng);
    RepPoint d = sample_right_partner(b, h, h, rng);
    SlimQuad A = to_slim(theta(a, h)), B = to_slim(theta(b, h)), D = to_slim(theta(d, h));
    SlimQuad left = mh(A, mh(B, D, tol), tol);
    law(equal_quad(left, c.cfg.mutate ? mh(A, B, tol) : mh(mh(A, B, tol), D, tol), tol), "horizontal associativity");
    RepPoint v2 = sample_vertical_partner(a, rng);
    RepPoint v1 = sample_vertical_partner(v2, rng);
    SlimQuad V1 = to_slim(theta(v1, h)), V2 = to_slim(theta(v2, h));
    law(equal_quad(mv(V1, mv(V2, A, tol), tol), mv(mv(V1, V2, tol), A, tol), tol), "vertical associativity");
    law(equal_quad(mh(A, horizontal_unit(A.v), tol), A, tol), "horizontal right unit");
    law(equal_quad(mh(horizontal_unit(A.u), A, tol), A, tol), "horizontal left unit");
    law(equal_quad(mv(A, to_slim(vertical_unit(A.y, h)), tol), A, tol), "vertical right unit");
    law(equal_quad(mv(to_slim(vertical_unit(A.x, h)), A, tol), A, tol), "vertical left unit");
    Square sq = sample_square(2 * h, n, rng);
    SlimQuad qa = to_slim(theta(sq.a, h)), qb = to_slim(theta(sq.b, h));
    SlimQuad qc = to_slim(theta(sq.c, h)), qd = to_slim(theta(sq.d, h));
    law(equal_quad(mh(mv(qa, qb, tol), mv(qc, qd, tol), tol), mv(mh(qa, qc, tol), mh(qb, qd, tol), tol), tol),
        "interchange");
    return law.o;
  });
}

// m*Omega = pr1*Omega + pr2*Omega on composable tangent pairs, for the
// vertical and horizontal products and for the two bimodule actions; the
// defect is |lhs - rhs| relative to 1 + |lhs| + |rhs|. Mutation: drop the
// second factor.
SampleOutcome form_multiplicativity(const CheckContext& c) {
  const int h = half_size(c), k = 2 * h, n = c.cfg.group_n;
  const LieData& L = c.lie;
  Rng& rng = c.rng;
  Laws law;
  const double second = c.cfg.mutate ? 0.0 : 1.0;
  auto compare = [&](cd lhs, cd a, cd b) {
    cd rhs = a + second * b;
    law.defect(std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs)));
  };
  const int pairs = 4;
  RepPoint a = moderate_sample(ctx_of(c), n, rng);

  RepPoint top = bounded([&] { return sample_vertical_partner(a, rng); });
  RepPoint v = compose_vertical(top, a);
  auto vp = composable_vertical_tangents(L, top, a);
  law(vp.size() > 1, "no composable vertical tangents");
  for (size_t i = 0; i + 1 < std::min<size_t>(vp.size(), pairs + 1); ++i) {
    const auto& [t1, b1] = vp[i];
    const auto& [t2, b2] = vp[i + 1];
    compare(omega(L, v, compose_vertical_tangent(top, t1, b1), compose_vertical_tangent(top, t2, b2)),
            omega(L, top, t1, t2), omega(L, a, b1, b2));
  }

  auto glued = [&](const RepPoint& x, int mx, const RepPoint& y, int my, const char* name) {
    RepPoint z = glue_parts(x, mx, y, my);
    auto hp = composable_horizontal_tangents(L, x, mx, y, my);
    law(hp.size() > 1, std::string("no composable tangents for ") + name);
    std::vector<Tangent> basis = decorated_tangent_basis(L, z);
    for (size_t i = 0; i + 1 < std::min<size_t>(hp.size(), pairs + 1); ++i) {
      const auto& [t1, b1] = hp[i];
      const auto& [t2, b2] = hp[i + 1];
      Tangent g1 = glue_tangents(x, mx, t1, y, my, b1), g2 = glue_tangents(x, mx, t2, y, my, b2);
      law(tangency_defect(L, basis, g1) < 1e-8, std::string("glued tangent leaves the variety in ") + name);
      compare(omega(L, z, g1, g2), omega(L, x, t1, t2), omega(L, y, b1, b2));
    }
  };
  glued(a, h, bounded([&] { return sample_right_partner(a, h, h, rng); }), h, "mh");
  // right action: size k split 1 against size 2(k-1)
  RepPoint z = moderate_sample(ctx_of(c), n, rng);
  glued(z, 1, bounded([&] { return sample_right_partner(z, 1, k - 1, rng); }), k - 1, "right action");
  // left action: size 2 split 1 against size k split 1
  RepPoint b = moderate_sample(double_context(2), n, rng);
  glued(b, 1, bounded([&] { return sample_right_partner(b, 1, k - 1, rng); }), 1, "left action");
  return law.o;
}

// The kernel of the form on the decorated tangent space is spanned by the
// B+ gauge directions at the inner holes, and the form is nondegenerate on
// a complement: full rank at threshold tol * sigma_max. Defect: leakage of
// the gauge directions, relative to the largest Gram entry. Mutation: the
// rank test runs on the whole tangent space.
SampleOutcome form_nondegenerate_reduced(const CheckContext& c) {
  const int k = c.cfg.surface_k, n = c.cfg.group_n;
  const LieData& L = c.lie;
  RepPoint p = moderate_sample(ctx_of(c), n, c.rng);
  std::vector<Tangent> T = decorated_tangent_basis(L, p);
  std::vector<Tangent> G = hole_gauge_directions(L, p);
  Laws law;
  const int b = L.rank + L.npos;
  law(static_cast<int>(T.size()) == 2 * k * L.dim, "tangent dimension is not 2 k dim G");
  for (const Tangent& g : G) law(tangency_defect(L, T, g) < 1e-9, "gauge direction is not tangent");

  const Triangulation tri = triangulate(p.ctx->surface);
  std::vector<Tangent> all = T;
  all.insert(all.end(), G.begin(), G.end());
  const Mat gram_all = two_form_gram(L, tri, p, all);
  const Eigen::Index dt = static_cast<Eigen::Index>(T.size()), dg = static_cast<Eigen::Index>(G.size());
  const double scale = max_abs(gram_all.topLeftCorner(dt, dt));
  law.defect(max_abs(gram_all.bottomLeftCorner(dg, dt)) / scale);

  // complement of span(G) inside span(T), in orthonormal coordinates of T
  Mat MT(p.size() * L.dim, dt), MG(p.size() * L.dim, dg);
  for (Eigen::Index j = 0; j < dt; ++j) MT.col(j) = to_coeffs(L, T[j]);
  for (Eigen::Index j = 0; j < dg; ++j) MG.col(j) = to_coeffs(L, G[j]);
  Eigen::HouseholderQR<Mat> qr(MT);
  Mat Q = qr.householderQ() * Mat::Identity(MT.rows(), dt);
  Mat A = Q.adjoint() * MG;
  Mat comp = c.cfg.mutate ? Mat(Mat::Identity(dt, dt)) : null_space(A.adjoint(), 1e-9);
  const int expect = 2 * k * L.dim - 2 * (k - 1) * b;
  if (!c.cfg.mutate) law(comp.cols() == expect, "gauge directions do not have the expected rank");
  std::vector<Tangent> C;
  for (Eigen::Index j = 0; j < comp.cols(); ++j) C.push_back(from_coeffs(L, Q * comp.col(j)));
  Eigen::JacobiSVD<Mat> svd(two_form_gram(L, tri, p, C));
  const auto& s = svd.singularValues();
  law(s(s.size() - 1) > c.cfg.tol * s(0), "form is degenerate on the complement of the gauge directions");
  return law.o;
}

// Both bimodule actions match gluing of representations and commute; units
// act trivially. Class equality at 1e-8. Mutation: the right action is
// compared against the unacted bimodule element.
SampleOutcome morita_commuting(const CheckContext& c) {
  return guarded([&] {
    const int m = split_of(c), r = c.cfg.surface_k - m, n = c.cfg.group_n;
    Rng& rng = c.rng;
    Laws law;
    RepPoint z = sample_decorated(ctx_of(c), n, rng);
    BimoduleQuad Z = theta(z, m);
    RepPoint a = sample_right_partner(z, m, r, rng);
    SlimQuad A = to_slim(theta(a, r));
    BimoduleQuad ZA = act_right(Z, A);
    law(is_member(ZA).ok, "right action leaves the image of theta");
    law(equal_quad(ZA, c.cfg.mutate ? Z : theta(glue_parts(z, m, a, r), m)), "right action against gluing");
    RepPoint b = sample_left_partner(z, m, m, rng);
    SlimQuad B = to_slim(theta(b, m));
    BimoduleQuad BZ = act_left(B, Z);
    law(is_member(BZ).ok, "left action leaves the image of theta");
    law(equal_quad(BZ, theta(glue_parts(b, m, z, m), m)), "left action against gluing");
    law(equal_quad(act_left(B, ZA), act_right(BZ, A)), "actions do not commute");
    law(equal_quad(act_right(Z, horizontal_unit(Z.rho2)), Z), "right unit");
    law(equal_quad(act_left(horizontal_unit(Z.rho1), Z), Z), "left unit");
    return law.o;
  });
}

// Both moment maps of the bimodule reach random targets through a Gauss-cell
// solve. Mutation: the lift is compared against an unrelated target.
SampleOutcome morita_moment_surjective(const CheckContext& c) {
  const int m = split_of(c), r = c.cfg.surface_k - m, n = c.cfg.group_n;
  Rng& rng = c.rng;
  Laws law;
  FstarPoint xi = random_fstar(m, n, rng), eta = random_fstar(r, n, rng);
  FstarPoint wrong = random_fstar(m, n, rng);
  try {
    law(equal_fstar(theta(lift_left(xi, r, rng), m).rho1, c.cfg.mutate ? wrong : xi), "left moment misses its target");
    law(equal_fstar(theta(lift_right(eta, m, rng), m).rho2, eta), "right moment misses its target");
  } catch (const ConstructionFailed& e) {
    law(false, std::string("Gauss-cell solve failed: ") + e.what());
  }
  return law.o;
}

// At the vertical unit over a random F-point, directions of the unit along
// Gamma (bottom edges of the first half, total product staying in B-) pair
// to zero with the horizontal unit directions (L_1 = R_{k+1} in n-);
// absolute, since the base point has unit holes. The control pairing with
// all bottom directions must be visibly nonzero. Mutation: use the control
// directions.
SampleOutcome annihilator_pairing(const CheckContext& c) {
  const int h = half_size(c), k = 2 * h, n = c.cfg.group_n;
  const LieData& L = c.lie;
  RepPoint p = identity_point(ctx_of(c), n);
  const DoubleLayout ly = layout_of(p);
  FtildePoint unit = ftilde_unit(random_fn(h, n, c.rng));
  for (int i = 1; i <= k; ++i) p.values[ly.g(i)] = unit.g[i - 1];
  Laws law;
  law(relation_defect(p) < 1e-12, "unit base point violates the relation");
  std::vector<Tangent> raw;
  for (int i = 1; i <= h; ++i)
    for (int j = 0; j < L.dim; ++j) {
      Tangent t(p.size(), Mat::Zero(n, n));
      t[ly.g(i)] = L.basis[j];
      raw.push_back(t);
    }
  Word prod;
  for (int i = 1; i <= k; ++i) prod.push_back({ly.g(i), 1});
  Mat C(L.npos, static_cast<Eigen::Index>(raw.size()));
  for (size_t col = 0; col < raw.size(); ++col) {
    Mat d = dword(prod, p.values, raw[col]);
    int row = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) C(row++, static_cast<Eigen::Index>(col)) = d(i, j);
  }
  Mat K = null_space(C);
  std::vector<Tangent> TV;
  for (Eigen::Index col = 0; col < K.cols(); ++col) {
    Tangent t(p.size(), Mat::Zero(n, n));
    for (size_t j = 0; j < raw.size(); ++j)
      for (int e = 0; e < p.size(); ++e) t[e] += K(static_cast<Eigen::Index>(j), col) * raw[j][e];
    TV.push_back(t);
  }
  std::vector<Tangent> TH;
  for (int j = L.rank + L.npos; j < L.dim; ++j) {
    Tangent t(p.size(), Mat::Zero(n, n));
    t[ly.L(1)] = L.basis[j];
    t[ly.R(k + 1)] = L.basis[j];
    TH.push_back(t);
  }
  std::vector<Tangent> basis = decorated_tangent_basis(L, p);
  double worst = 0, control = 0;
  for (const Tangent& xi : TH) {
    law(tangency_defect(L, basis, xi) < 1e-9, "horizontal unit direction is not tangent");
    for (const Tangent& u : TV) worst = std::max(worst, std::abs(omega(L, p, u, xi)));
    for (const Tangent& u : raw) control = std::max(control, std::abs(omega(L, p, u, xi)));
  }
  for (const Tangent& u : TV) law(tangency_defect(L, basis, u) < 1e-9, "vertical unit direction is not tangent");
  law(control > 1e-3, "control pairing vanishes");
  law.defect(c.cfg.mutate ? control : worst);
  return law.o;
}

// Members of the Gamma-restricted family and their products (both
// multiplications) stay in the family; a generic decorated sample does not.
// Mutation: the generic sample is required to be restricted.
SampleOutcome h2n_closure(const CheckContext& c) {
  return guarded([&] {
    const int h = half_size(c), n = c.cfg.group_n;
    Rng& rng = c.rng;
    auto ctx = ctx_of(c);
    Laws law;
    RepPoint a = sample_h_member(ctx, n, rng);
    SlimQuad A = to_slim(theta(a, h));
    law(restrict_H(A), "sample outside the family");
    RepPoint b = sample_h_right_partner(a, h, h, rng);
    SlimQuad B = to_slim(theta(b, h));
    law(restrict_H(B), "right partner outside the family");
    law(restrict_H(mh(A, B)), "horizontal product leaves the family");
    RepPoint top = sample_h_vertical_partner(a, rng);
    SlimQuad T = to_slim(theta(top, h));
    law(restrict_H(T), "vertical partner outside the family");
    law(restrict_H(mv(T, A)), "vertical product leaves the family");
    const bool generic = restrict_H(to_slim(theta(sample_decorated(ctx, n, rng), h)));
    law(c.cfg.mutate ? generic : !generic, "generic sample classified wrongly");
    return law.o;
  });
}

// Generalized Schubert cells are unions of orbits: dual groupoid arrows over
// flags in lower cells keep the word of their base, and the top and bottom
// of a quadruple whose bottom edges lie in prescribed cells share their
// words. Mutation: the top word is compared with a generic point.
SampleOutcome schubert_orbit_words(const CheckContext& c) {
  const int h = half_size(c), k = 2 * h, n = c.cfg.group_n;
  Rng& rng = c.rng;
  Laws law;
  auto cell_element = [&](int i) {
    const int choice = (c.index + i) % (n + 1);
    Mat w = choice == 0 ? identity(n) : choice == n ? weyl_rep(longest_element(n))
                                                    : weyl_rep(simple_reflection(n, (choice - 1) % (n - 1)));
    return Mat(random_bplus(n, rng) * w * random_bplus(n, rng));
  };
  FstarPoint arrow = random_fstar(h, n, rng);
  for (int i = 0; i < h; ++i) arrow.base[i] = cell_element(i);
  law(schubert_word(fstar_target(arrow)) == schubert_word(fstar_source(arrow)), "arrow changes the Schubert word");
  FtildePoint bottom;
  for (int i = 0; i < k; ++i) bottom.g.push_back(cell_element(i));
  bottom.g[0] = random_bplus(n, rng) * weyl_rep(simple_reflection(n, 0)) * random_bplus(n, rng);
  SlimQuad q = to_slim(theta(sample_over_bottom(ctx_of(c), bottom, rng), h));
  const FtildePoint other = c.cfg.mutate ? random_ftilde(k, n, rng) : q.y;
  law(schubert_word(q.x) == schubert_word(other), "top and bottom lie in different cells");
  return law.o;
}

// Torus action: trivial at the identity, realized by a gauge
// transformation, moment in T x T and invariant, horizontal and vertical
// multiplicativity, and the moment condition
//   Omega(generator of X, v) = 2 <d mu, X>
// at both circles (relative defect). Mutation: factor 1.
SampleOutcome t2_lift(const CheckContext& c) {
  return guarded([&] {
    const int h = half_size(c), n = c.cfg.group_n;
    const LieData& L = c.lie;
    Rng& rng = c.rng;
    Laws law;
    RepPoint p = moderate_sample(ctx_of(c), n, rng);
    SlimQuad a = to_slim(theta(p, h));
    law(equal_quad(t2_act(identity(n), identity(n), a), a), "identity acts nontrivially");
    Mat t1 = random_torus(n, rng), t2 = random_torus(n, rng);
    SlimQuad ta = t2_act(t1, t2, a);
    law(is_member(ta).ok, "action leaves the image of theta");
    law(equal_quad(ta, to_slim(theta(t2_act_rep(t1, t2, p), h))), "action and gauge realization differ");
    std::vector<Mat> shifted = a.y.g;
    shifted.front() = t1 * shifted.front();
    shifted.back() = shifted.back() * t2.inverse();
    law(equal_ftilde(ta.y, FtildePoint{shifted}), "action on the bottom component");
    auto [mu1, mu2] = t2_moment(ta);
    auto [nu1, nu2] = t2_moment(a);
    law(member(mu1, Subgroup::T) && member(mu2, Subgroup::T), "moment outside T x T");
    law(max_abs(mu1 - nu1) < 1e-10 && max_abs(mu2 - nu2) < 1e-10, "moment is not invariant");
    RepPoint q = sample_right_partner(p, h, h, rng);
    SlimQuad b = to_slim(theta(q, h));
    Mat mid = random_torus(n, rng);
    law(equal_quad(mh(t2_act(t1, mid, a), t2_act(mid, t2, b)), t2_act(t1, t2, mh(a, b))),
        "horizontal multiplicativity");
    SlimQuad top = to_slim(theta(sample_vertical_partner(p, rng), h));
    law(equal_quad(mv(t2_act(t1, t2, top), t2_act(t1, t2, a)), t2_act(t1, t2, mv(top, a))),
        "vertical multiplicativity");

    const DoubleLayout ly = layout_of(p);
    std::vector<Tangent> T = decorated_tangent_basis(L, p);
    const double factor = c.cfg.mutate ? 1.0 : 2.0;
    Mat X = pr_T(random_traceless(n, rng, 1.0));
    for (int part : {1, 2}) {
      Tangent gen = t2_generator(p, part, X);
      law(tangency_defect(L, T, gen) < 1e-9, "torus generator is not tangent");
      for (size_t j = 0; j < std::min<size_t>(T.size(), 6); ++j) {
        Mat dmu = pr_T(T[j][part == 1 ? ly.R(1) : ly.R(ly.k + 1)]);
        cd lhs = omega(L, p, gen, T[j]), rhs = factor * L.pair(dmu, X);
        law.defect(std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
      }
    }
    return law.o;
  });
}

// The bimodule restricted to the Gamma family: actions of restricted
// partners stay restricted, match gluing and commute. Mutation: the
// bimodule element is a generic decorated sample.
SampleOutcome restricted_morita(const CheckContext& c) {
  return guarded([&] {
    const int m = split_of(c), r = c.cfg.surface_k - m, n = c.cfg.group_n;
    Rng& rng = c.rng;
    Laws law;
    RepPoint b = sample_h_member(double_context(2 * m), n, rng);
    RepPoint z = c.cfg.mutate ? sample_decorated(ctx_of(c), n, rng) : sample_h_right_partner(b, m, r, rng);
    if (c.cfg.mutate) b = sample_left_partner(z, m, m, rng);
    RepPoint a = c.cfg.mutate ? sample_right_partner(z, m, r, rng) : sample_h_right_partner(z, m, r, rng);
    BimoduleQuad Z = theta(z, m);
    SlimQuad A = to_slim(theta(a, r)), B = to_slim(theta(b, m));
    law(restricted(Z), "bimodule element outside the family");
    law(restrict_H(A) && restrict_H(B), "partner outside the family");
    BimoduleQuad ZA = act_right(Z, A), BZ = act_left(B, Z);
    law(is_member(ZA).ok && is_member(BZ).ok, "action leaves the image of theta");
    law(restricted(ZA) && restricted(BZ), "action leaves the family");
    law(equal_quad(ZA, theta(glue_parts(z, m, a, r), m)), "right action against gluing");
    law(equal_quad(act_left(B, ZA), act_right(BZ, A)), "actions do not commute");
    return law.o;
  });
}

}  // namespace

void register_double_checks(std::vector<CheckInfo>& out) {
  const SurfaceKind D = SurfaceKind::Double;
  out.push_back({"theta_membership", "sampled decorated representations land in the image of theta", D,
                 "largest membership residual (relative)", "require an off-gauge perturbation to pass",
                 theta_membership});
  out.push_back({"double_axioms_interchange", "units, associativity and interchange of the slim double groupoid", D,
                 "class equalities at 1e-9; defect stays 0", "compare against a two-fold product",
                 double_axioms_interchange});
  out.push_back({"form_multiplicativity", "the form is multiplicative for both products and both actions", D,
                 "relative", "drop the second factor", form_multiplicativity});
  out.push_back({"form_nondegenerate_reduced", "kernel of the form is the hole gauge; nondegenerate on a complement",
                 D, "gauge leakage relative to the largest Gram entry", "skip the quotient by the gauge directions",
                 form_nondegenerate_reduced});
  out.push_back({"morita_commuting", "bimodule actions match gluing and commute", D,
                 "class equalities at 1e-8; defect stays 0", "compare the right action with the unacted element",
                 morita_commuting});
  out.push_back({"morita_moment_surjective", "both moment maps of the bimodule reach random targets", D,
                 "class equalities at 1e-8; defect stays 0", "compare against an unrelated target",
                 morita_moment_surjective});
  out.push_back({"annihilator_pairing", "unit directions along Gamma pair to zero with the n- unit directions", D,
                 "absolute", "use all bottom directions", annihilator_pairing});
  out.push_back({"h2n_closure", "the Gamma-restricted family is closed under both products", D,
                 "class membership; defect stays 0", "require a generic sample to be restricted", h2n_closure});
  out.push_back({"schubert_orbit_words", "orbits stay in generalized Schubert cells", D,
                 "word equality; defect stays 0", "compare with a generic point", schubert_orbit_words});
  out.push_back({"t2_lift", "torus action on the double groupoid and its moment map", D,
                 "moment condition, relative", "factor 1 in the moment condition", t2_lift});
  out.push_back({"restricted_morita", "the bimodule restricts to the Gamma family", D,
                 "class equalities; defect stays 0", "use a generic bimodule element", restricted_morita});
}

}  // namespace qpm
