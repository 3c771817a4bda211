#include "qpm/double_groupoid.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace qpm {

namespace {

double scale_of(const Mat& m) { return 1.0 + m.cwiseAbs().maxCoeff(); }

double rel_dist(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(scale_of(a), scale_of(b));
}

bool in_bplus(const Mat& b, double tol) { return member(b, Subgroup::BPlus, tol * scale_of(b)); }

Mat product(const std::vector<Mat>& ms) {
  Mat p = identity(static_cast<int>(ms.front().rows()));
  for (const Mat& m : ms) p = p * m;
  return p;
}

// (x, y) in G* with y^-1 x = M.
std::pair<Mat, Mat> gstar_from_gauss(const Mat& M) {
  GaussFactors f = gauss_decompose(M, 1e-8);
  Mat s = torus_sqrt(f.torus);
  return {s * f.upper, s.inverse() * f.lower.inverse()};
}

std::pair<Mat, Mat> random_gstar(int n, Rng& rng) {
  Mat t = random_torus(n, rng);
  return {t * random_bplus(n, rng, false), t.inverse() * random_bminus(n, rng, false)};
}

std::pair<Mat, Mat> random_btilde(int n, Rng& rng) {
  Mat l = random_bplus(n, rng);
  return {l, random_bplus(n, rng, false) * l};
}

void fill_random_decorated(RepPoint& p, Rng& rng) {
  const DoubleLayout ly = layout_of(p);
  const int n = p.n(), k = ly.k;
  for (int i = 1; i <= k; ++i) p.values[ly.g(i)] = random_sl(n, rng);
  auto [x1, y1] = random_gstar(n, rng);
  p.values[ly.R(1)] = x1;
  p.values[ly.L(1)] = y1;
  auto [x2, y2] = random_gstar(n, rng);
  p.values[ly.L(k + 1)] = x2;
  p.values[ly.R(k + 1)] = y2;
  for (int i = 2; i <= k; ++i) {
    auto [l, r] = random_btilde(n, rng);
    p.values[ly.L(i)] = l;
    p.values[ly.R(i)] = r;
  }
}

bool is_decorated_rep(const RepPoint& p) { return relation_defect(p) < 1e-9 && violated_hole(p, 1e-9) == 0; }

FstarElement left_element(const RepPoint& p, int m) {
  const DoubleLayout ly = layout_of(p);
  FstarElement e{p.values[ly.R(1)], p.values[ly.L(1)], {}, {}, p.values[ly.L(m + 1)]};
  for (int i = 1; i < m; ++i) {
    e.z.push_back(p.values[ly.L(i + 1)]);
    e.zp.push_back(p.values[ly.R(i + 1)]);
  }
  return e;
}

FstarElement right_element(const RepPoint& p, int m) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k, n = k - m;
  FstarElement e{p.values[ly.L(k + 1)], p.values[ly.R(k + 1)], {}, {}, p.values[ly.R(m + 1)]};
  for (int i = 1; i < n; ++i) {
    e.z.push_back(p.values[ly.R(k + 1 - i)]);
    e.zp.push_back(p.values[ly.L(k + 1 - i)]);
  }
  return e;
}

// Copies the left part of b (split mb) onto the right part of a (split ma),
// in the orientation that makes the two parts agree.
void copy_left_part_onto_right(const RepPoint& b, int mb, RepPoint& a, int ma) {
  const DoubleLayout la = layout_of(a), lb = layout_of(b);
  const int ka = la.k;
  if (ka - ma != mb) throw NonComposable("part sizes differ");
  for (int i = 1; i <= mb; ++i) a.values[la.g(ka + 1 - i)] = b.values[lb.g(i)].inverse();
  for (int i = 0; i <= mb; ++i) a.values[la.R(ka + 1 - i)] = b.values[lb.L(i + 1)];
  for (int i = 0; i < mb; ++i) a.values[la.L(ka + 1 - i)] = b.values[lb.R(i + 1)];
}

void copy_right_part_onto_left(const RepPoint& a, int ma, RepPoint& b, int mb) {
  const DoubleLayout la = layout_of(a), lb = layout_of(b);
  const int ka = la.k;
  if (ka - ma != mb) throw NonComposable("part sizes differ");
  for (int i = 1; i <= mb; ++i) b.values[lb.g(i)] = a.values[la.g(ka + 1 - i)].inverse();
  for (int i = 0; i <= mb; ++i) b.values[lb.L(i + 1)] = a.values[la.R(ka + 1 - i)];
  for (int i = 0; i < mb; ++i) b.values[lb.R(i + 1)] = a.values[la.L(ka + 1 - i)];
}

}  // namespace

RepContextPtr double_context(int k) {
  MarkedSurface S = double_along_arcs(disc(k));
  std::vector<int> gens;
  for (int i = 1; i <= k; ++i) gens.push_back(S.edge_id("g" + std::to_string(i)));
  for (int i = 1; i <= k + 1; ++i) gens.push_back(S.edge_id("L" + std::to_string(i)));
  for (int i = 1; i <= k + 1; ++i) gens.push_back(S.edge_id("R" + std::to_string(i)));
  auto ctx = make_context(S, gens);
  if (ctx->pres.generators != gens) throw Error("double_context: generator order was changed by the presentation");
  return ctx;
}

DoubleLayout layout_of(const RepPoint& p) {
  const MarkedSurface& S = p.ctx->surface;
  if (S.family != Family::Double) throw Error("expected a representation of a doubled disc");
  DoubleLayout ly{S.param};
  if (p.size() != ly.size()) throw Error("generator count does not match the doubled disc");
  return ly;
}

Mat top_edge(const RepPoint& p, int i) {
  const DoubleLayout ly = layout_of(p);
  const Mat& r = p.values[ly.R(i)];
  return r * p.values[ly.g(i)] * p.values[ly.L(i + 1)].inverse();
}

int violated_hole(const RepPoint& p, double tol) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k;
  if (!member(p.values[ly.R(1)], p.values[ly.L(1)], Subgroup::GStar, tol)) return 1;
  for (int i = 2; i <= k; ++i)
    if (!member(p.values[ly.L(i)], p.values[ly.R(i)], Subgroup::BTildePlus, tol)) return i;
  if (!member(p.values[ly.L(k + 1)], p.values[ly.R(k + 1)], Subgroup::GStar, tol)) return k + 1;
  return 0;
}

void solve_left_gstar(RepPoint& p) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k, n = p.n();
  Mat gall = identity(n), tail = identity(n);
  for (int i = 1; i <= k; ++i) gall = gall * p.values[ly.g(i)];
  for (int i = 2; i <= k; ++i) tail = tail * top_edge(p, i);
  Mat M = gall * p.values[ly.R(k + 1)].inverse() * tail.inverse() * p.values[ly.L(2)] * p.values[ly.g(1)].inverse();
  auto [x, y] = gstar_from_gauss(M);
  p.values[ly.R(1)] = x;
  p.values[ly.L(1)] = y;
}

void solve_right_gstar(RepPoint& p) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k, n = p.n();
  Mat gall = identity(n), head = identity(n);
  for (int i = 1; i <= k; ++i) gall = gall * p.values[ly.g(i)];
  for (int i = 1; i < k; ++i) head = head * top_edge(p, i);
  Mat M = gall.inverse() * p.values[ly.L(1)].inverse() * head * p.values[ly.R(k)] * p.values[ly.g(k)];
  auto [x, y] = gstar_from_gauss(M);
  p.values[ly.L(k + 1)] = x;
  p.values[ly.R(k + 1)] = y;
}

RepPoint sample_decorated(const RepContextPtr& ctx, int n, Rng& rng, int attempts) {
  for (int a = 0; a < attempts; ++a) {
    RepPoint p = identity_point(ctx, n);
    fill_random_decorated(p, rng);
    try {
      solve_left_gstar(p);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(p)) return p;
  }
  throw ConstructionFailed("sample_decorated: no attempt reached the big cell");
}

SlimQuad to_slim(const BimoduleQuad& q) {
  if (q.m() != q.n()) throw Error("to_slim: the two parts have different sizes");
  return SlimQuad{q.h, q.rho2, q.rho1, q.g, q.rep};
}

BimoduleQuad to_bimodule(const SlimQuad& q) { return BimoduleQuad{q.x, q.v, q.u, q.y, q.rep}; }

FnPoint p0(const FtildePoint& x, int m) { return FnPoint{std::vector<Mat>(x.g.begin(), x.g.begin() + m)}; }

FnPoint q0(const FtildePoint& x, int m) {
  FnPoint f;
  for (int i = x.k() - 1; i >= m; --i) f.g.push_back(x.g[i].inverse());
  return f;
}

BimoduleQuad theta(const RepPoint& p, int m, double tol) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k;
  if (m < 1 || m >= k) throw Error("theta: split must satisfy 1 <= m < k");
  if (int h = violated_hole(p, tol)) throw DecorationViolated("boundary circle " + std::to_string(h));
  if (relation_defect(p) > tol * scale_of(product(p.values)))
    throw DecorationViolated("outer relation fails by " + std::to_string(relation_defect(p)));
  BimoduleQuad q;
  for (int i = 1; i <= k; ++i) {
    q.g.g.push_back(p.values[ly.g(i)]);
    q.h.g.push_back(top_edge(p, i));
  }
  q.rho1 = normalize(left_element(p, m), p0(q.g, m));
  q.rho2 = normalize(right_element(p, m), q0(q.g, m));
  q.rep = p;
  return q;
}

MemberResult is_member(const BimoduleQuad& z, double tol) {
  MemberResult r;
  auto fail = [&r](const std::string& d, double defect) {
    r.ok = false;
    r.diagnostic = d;
    r.defect = defect;
    return r;
  };
  const int m = z.m(), n = z.n(), k = z.h.k();
  if (m < 1 || n < 1 || k != m + n || z.g.k() != k) return fail("shape", std::numeric_limits<double>::infinity());
  if (!is_fstar_point(z.rho1, tol)) return fail("rho1 not in F*", std::numeric_limits<double>::infinity());
  if (!is_fstar_point(z.rho2, tol)) return fail("rho2 not in F*", std::numeric_limits<double>::infinity());

  auto c1 = solve_fn_gauge(FnPoint{z.rho1.base}, p0(z.g, m), tol);
  if (!c1) return fail("s(rho1) = p0(s^V)", 1.0);
  auto c2 = solve_fn_gauge(FnPoint{z.rho2.base}, q0(z.g, m), tol);
  if (!c2) return fail("s(rho2) = q0(s^V)", 1.0);
  const FnPoint T1 = fstar_target(fstar_twist(*c1, z.rho1));
  const FnPoint T2 = fstar_target(fstar_twist(*c2, z.rho2));

  const int dim = static_cast<int>(z.h.g.front().rows());
  std::vector<Mat> u(k + 1, identity(dim));
  for (int i = 1; i <= m; ++i) {
    u[i] = T1.g[i - 1].inverse() * u[i - 1] * z.h.g[i - 1];
    if (!in_bplus(u[i], tol)) return fail("p0(t^V) = t(rho1)", strict_lower(u[i]).cwiseAbs().maxCoeff());
  }
  for (int j = k; j >= m + 2; --j) {
    u[j - 1] = T2.g[k - j].inverse() * u[j] * z.h.g[j - 1].inverse();
    if (!in_bplus(u[j - 1], tol))
      return fail("q0(t^V) = t(rho2)", strict_lower(u[j - 1]).cwiseAbs().maxCoeff());
  }
  const Mat beta = u[m] * z.h.g[m] * u[m + 1].inverse() * T2.g[n - 1];
  if (!in_bplus(beta, tol)) return fail("q0(t^V) = t(rho2)", strict_lower(beta).cwiseAbs().maxCoeff());
  const double f2 = (pr_T(beta) - identity(dim)).cwiseAbs().maxCoeff();
  if (f2 > tol * scale_of(beta)) return fail("f2 in B~+", f2);

  const Mat f1 = z.rho1.y * product(z.g.g) * z.rho2.y.inverse() * product(z.h.g).inverse();
  r.defect = std::max(f2, rel_dist(f1, identity(dim)));
  if (rel_dist(f1, identity(dim)) > tol) return fail("f1 = 1", rel_dist(f1, identity(dim)));
  r.ok = true;
  r.gauge_rho1 = *c1;
  r.gauge_rho2 = *c2;
  r.gauge_top.assign(u.begin() + 1, u.end() - 1);
  r.beta = beta;
  return r;
}

MemberResult is_member(const SlimQuad& z, double tol) { return is_member(to_bimodule(z), tol); }

FtildePoint compose_ftilde(const FtildePoint& A, int a1, const FtildePoint& B, int b1, double tol) {
  const int a2 = A.k() - a1, b2 = B.k() - b1;
  if (a1 < 1 || b2 < 1 || a2 != b1) throw NonComposable("compose_ftilde: splits do not match");
  auto c = solve_fn_gauge(p0(B, b1), q0(A, a1), tol);
  if (!c) throw NonComposable("compose_ftilde: q0 of the first point differs from p0 of the second");
  const int n = static_cast<int>(B.g.front().rows());
  std::vector<Mat> gauge(B.k() - 1, identity(n));
  for (int i = 0; i < b1; ++i) gauge[i] = (*c)[i];
  const FtildePoint Bp = act_ftilde(gauge, B);
  FtildePoint out;
  out.g.assign(A.g.begin(), A.g.begin() + a1);
  out.g.insert(out.g.end(), Bp.g.begin() + b1, Bp.g.end());
  return out;
}

FtildePoint ftilde_unit(const FnPoint& f) {
  FtildePoint x{f.g};
  for (int i = f.n() - 1; i >= 0; --i) x.g.push_back(f.g[i].inverse());
  return x;
}

bool equal_quad(const BimoduleQuad& a, const BimoduleQuad& b, double tol) {
  return a.m() == b.m() && a.n() == b.n() && equal_ftilde(a.h, b.h, tol) && equal_fstar(a.rho2, b.rho2, tol) &&
         equal_fstar(a.rho1, b.rho1, tol) && equal_ftilde(a.g, b.g, tol);
}

bool equal_quad(const SlimQuad& a, const SlimQuad& b, double tol) {
  return equal_quad(to_bimodule(a), to_bimodule(b), tol);
}

BimoduleQuad vertical_unit(const FtildePoint& x, int m) {
  return BimoduleQuad{x, fstar_unit(q0(x, m)), fstar_unit(p0(x, m)), x, std::nullopt};
}

SlimQuad horizontal_unit(const FstarPoint& xi) {
  return SlimQuad{ftilde_unit(fstar_target(xi)), xi, xi, ftilde_unit(fstar_source(xi)), std::nullopt};
}

BimoduleQuad concat(const BimoduleQuad& a, const BimoduleQuad& b, double tol) {
  if (a.n() != b.m()) throw NonComposable("concat: the shared parts have different sizes");
  if (!equal_fstar(a.rho2, b.rho1, tol)) throw NonComposable("concat: right part of the first differs from left part of the second");
  return BimoduleQuad{compose_ftilde(a.h, a.m(), b.h, b.m(), tol), b.rho2, a.rho1,
                      compose_ftilde(a.g, a.m(), b.g, b.m(), tol), std::nullopt};
}

SlimQuad mh(const SlimQuad& a, const SlimQuad& b, double tol) {
  return to_slim(concat(to_bimodule(a), to_bimodule(b), tol));
}

SlimQuad mv(const SlimQuad& a, const SlimQuad& b, double tol) {
  if (a.n() != b.n() || !equal_ftilde(a.y, b.x, tol)) throw NonComposable("mv: bottom of the first differs from top of the second");
  return SlimQuad{a.x, fstar_compose(a.v, b.v, tol), fstar_compose(a.u, b.u, tol), b.y, std::nullopt};
}

BimoduleQuad act_right(const BimoduleQuad& z, const SlimQuad& a, double tol) {
  return concat(z, to_bimodule(a), tol);
}

BimoduleQuad act_left(const SlimQuad& a, const BimoduleQuad& z, double tol) {
  return concat(to_bimodule(a), z, tol);
}

bool restrict_H(const SlimQuad& a, double tol) {
  return gamma_member(a.x, tol) && gamma_member(a.y, tol) && gamma_star_member(a.u, tol) &&
         gamma_star_member(a.v, tol);
}

FtildePoint t2_act(const Mat& t1, const Mat& t2, const FtildePoint& x) {
  FtildePoint out = x;
  out.g.front() = t1 * out.g.front();
  out.g.back() = out.g.back() * t2.inverse();
  return out;
}

FstarPoint t2_act(const Mat& t, const FstarPoint& p) {
  FstarPoint out = p;
  const Mat ti = t.inverse();
  out.x = t * p.x * ti;
  out.y = t * p.y * ti;
  out.base.front() = t * out.base.front();
  return out;
}

BimoduleQuad t2_act(const Mat& t1, const Mat& t2, const BimoduleQuad& z) {
  return BimoduleQuad{t2_act(t1, t2, z.h), t2_act(t2, z.rho2), t2_act(t1, z.rho1), t2_act(t1, t2, z.g),
                      z.rep ? std::optional<RepPoint>(t2_act_rep(t1, t2, *z.rep)) : std::nullopt};
}

SlimQuad t2_act(const Mat& t1, const Mat& t2, const SlimQuad& a) {
  return to_slim(t2_act(t1, t2, to_bimodule(a)));
}

std::pair<Mat, Mat> t2_moment(const BimoduleQuad& z) { return {pr_T(z.rho1.x), pr_T(z.rho2.y)}; }

std::pair<Mat, Mat> t2_moment(const SlimQuad& a) { return t2_moment(to_bimodule(a)); }

namespace {

// Vertex ids b_i = i - 1 and t_i = k + i on the doubled disc.
std::vector<int> circle_vertices(int k, int part) {
  const int i = part == 1 ? 1 : k + 1;
  return {i - 1, k + i};
}

}  // namespace

RepPoint t2_act_rep(const Mat& t1, const Mat& t2, const RepPoint& p) {
  const DoubleLayout ly = layout_of(p);
  std::vector<Mat> g(p.ctx->surface.vertices.size(), identity(p.n()));
  for (int v : circle_vertices(ly.k, 1)) g[v] = t1;
  for (int v : circle_vertices(ly.k, 2)) g[v] = t2;
  return gauge_act(g, p);
}

Tangent t2_generator(const RepPoint& p, int part, const Mat& X) {
  const DoubleLayout ly = layout_of(p);
  std::vector<Mat> u(p.ctx->surface.vertices.size(), Mat::Zero(p.n(), p.n()));
  for (int v : circle_vertices(ly.k, part)) u[v] = X;
  return infinitesimal_gauge(u, p);
}

double part_mismatch(const RepPoint& a, int ma, const RepPoint& b, int mb) {
  RepPoint expected = b;
  copy_right_part_onto_left(a, ma, expected, mb);
  double d = 0;
  for (int i = 0; i < b.size(); ++i) d = std::max(d, rel_dist(expected.values[i], b.values[i]));
  return d;
}

RepPoint glue_parts(const RepPoint& a, int ma, const RepPoint& b, int mb, double tol) {
  const DoubleLayout la = layout_of(a), lb = layout_of(b);
  const int nb = lb.k - mb;
  if (la.k - ma != mb || ma < 1 || nb < 1) throw NonComposable("glue_parts: part sizes differ");
  if (part_mismatch(a, ma, b, mb) > tol) throw NonComposable("glue_parts: the shared parts differ");
  RepPoint c = identity_point(double_context(ma + nb), a.n());
  const DoubleLayout lc = layout_of(c);
  for (int i = 1; i <= ma; ++i) c.values[lc.g(i)] = a.values[la.g(i)];
  for (int j = 1; j <= nb; ++j) c.values[lc.g(ma + j)] = b.values[lb.g(mb + j)];
  for (int i = 1; i <= ma; ++i) {
    c.values[lc.L(i)] = a.values[la.L(i)];
    c.values[lc.R(i)] = a.values[la.R(i)];
  }
  c.values[lc.L(ma + 1)] = a.values[la.L(ma + 1)];
  c.values[lc.R(ma + 1)] = b.values[lb.R(mb + 1)];
  for (int j = 1; j <= nb; ++j) {
    c.values[lc.L(ma + 1 + j)] = b.values[lb.L(mb + 1 + j)];
    c.values[lc.R(ma + 1 + j)] = b.values[lb.R(mb + 1 + j)];
  }
  return c;
}

Tangent glue_tangents(const RepPoint& a, int ma, const Tangent& ta, const RepPoint& b, int mb, const Tangent& tb) {
  const DoubleLayout la = layout_of(a), lb = layout_of(b);
  const int nb = lb.k - mb;
  DoubleLayout lc{ma + nb};
  Tangent tc(lc.size());
  for (int i = 1; i <= ma; ++i) tc[lc.g(i)] = ta[la.g(i)];
  for (int j = 1; j <= nb; ++j) tc[lc.g(ma + j)] = tb[lb.g(mb + j)];
  for (int i = 1; i <= ma; ++i) {
    tc[lc.L(i)] = ta[la.L(i)];
    tc[lc.R(i)] = ta[la.R(i)];
  }
  tc[lc.L(ma + 1)] = ta[la.L(ma + 1)];
  tc[lc.R(ma + 1)] = tb[lb.R(mb + 1)];
  for (int j = 1; j <= nb; ++j) {
    tc[lc.L(ma + 1 + j)] = tb[lb.L(mb + 1 + j)];
    tc[lc.R(ma + 1 + j)] = tb[lb.R(mb + 1 + j)];
  }
  return tc;
}

RepPoint sample_right_partner(const RepPoint& a, int ma, int nb, Rng& rng, int attempts) {
  const int mb = layout_of(a).k - ma;
  auto ctx = double_context(mb + nb);
  for (int t = 0; t < attempts; ++t) {
    RepPoint b = identity_point(ctx, a.n());
    fill_random_decorated(b, rng);
    copy_right_part_onto_left(a, ma, b, mb);
    const DoubleLayout lb = layout_of(b);
    b.values[lb.R(mb + 1)] = random_bplus(a.n(), rng, false) * b.values[lb.L(mb + 1)];
    try {
      solve_right_gstar(b);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(b)) return b;
  }
  throw ConstructionFailed("sample_right_partner: no attempt reached the big cell");
}

RepPoint sample_left_partner(const RepPoint& b, int mb, int mc, Rng& rng, int attempts) {
  auto ctx = double_context(mc + mb);
  for (int t = 0; t < attempts; ++t) {
    RepPoint c = identity_point(ctx, b.n());
    fill_random_decorated(c, rng);
    copy_left_part_onto_right(b, mb, c, mc);
    const DoubleLayout lc = layout_of(c);
    c.values[lc.L(mc + 1)] = random_bplus(b.n(), rng, false) * c.values[lc.R(mc + 1)];
    try {
      solve_left_gstar(c);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(c)) return c;
  }
  throw ConstructionFailed("sample_left_partner: no attempt reached the big cell");
}

RepPoint sample_over_bottom(const RepContextPtr& ctx, const FtildePoint& g, Rng& rng, int attempts) {
  const int n = static_cast<int>(g.g.front().rows());
  for (int t = 0; t < attempts; ++t) {
    RepPoint a = identity_point(ctx, n);
    const DoubleLayout ly = layout_of(a);
    if (g.k() != ly.k) throw Error("sample_over_bottom: bottom has the wrong length");
    fill_random_decorated(a, rng);
    for (int i = 1; i <= ly.k; ++i) a.values[ly.g(i)] = g.g[i - 1];
    try {
      solve_left_gstar(a);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(a)) return a;
  }
  throw ConstructionFailed("sample_over_bottom: no attempt reached the big cell");
}

RepPoint sample_vertical_partner(const RepPoint& b, Rng& rng, int attempts) {
  std::vector<Mat> top;
  for (int i = 1; i <= layout_of(b).k; ++i) top.push_back(top_edge(b, i));
  return sample_over_bottom(b.ctx, FtildePoint{top}, rng, attempts);
}

RepPoint compose_vertical(const RepPoint& a, const RepPoint& b, double tol) {
  const DoubleLayout ly = layout_of(a);
  if (layout_of(b).k != ly.k) throw NonComposable("compose_vertical: sizes differ");
  for (int i = 1; i <= ly.k; ++i)
    if (rel_dist(a.values[ly.g(i)], top_edge(b, i)) > tol)
      throw NonComposable("compose_vertical: bottom of the upper square differs from top of the lower");
  RepPoint c = b;
  for (int i = 1; i <= ly.k + 1; ++i) {
    c.values[ly.L(i)] = a.values[ly.L(i)] * b.values[ly.L(i)];
    c.values[ly.R(i)] = a.values[ly.R(i)] * b.values[ly.R(i)];
  }
  return c;
}

Tangent compose_vertical_tangent(const RepPoint& a, const Tangent& ta, const Tangent& tb) {
  const DoubleLayout ly = layout_of(a);
  Tangent tc = tb;
  for (int i = 1; i <= ly.k + 1; ++i)
    for (int s : {ly.L(i), ly.R(i)}) tc[s] = ta[s] + a.values[s] * tb[s] * a.values[s].inverse();
  return tc;
}

Square sample_square(int k, int n, Rng& rng, int attempts) {
  if (k % 2 != 0) throw Error("sample_square: k must be even");
  const int h = k / 2;
  Square sq;
  sq.b = sample_decorated(double_context(k), n, rng, attempts);
  sq.d = sample_right_partner(sq.b, h, h, rng, attempts);
  sq.a = sample_vertical_partner(sq.b, rng, attempts);
  const DoubleLayout ly{k};
  for (int t = 0; t < attempts; ++t) {
    RepPoint c = identity_point(sq.d.ctx, n);
    fill_random_decorated(c, rng);
    copy_right_part_onto_left(sq.a, h, c, h);
    for (int i = 1; i <= k; ++i) c.values[ly.g(i)] = top_edge(sq.d, i);
    c.values[ly.R(h + 1)] = random_bplus(n, rng, false) * c.values[ly.L(h + 1)];
    try {
      solve_right_gstar(c);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(c)) {
      sq.c = c;
      return sq;
    }
  }
  throw ConstructionFailed("sample_square: no attempt reached the big cell");
}

RepPoint lift_left(const FstarPoint& xi, int n, Rng& rng, int attempts) {
  const int m = xi.n(), k = m + n, dim = static_cast<int>(xi.x.rows());
  auto ctx = double_context(k);
  for (int t = 0; t < attempts; ++t) {
    RepPoint p = identity_point(ctx, dim);
    fill_random_decorated(p, rng);
    const DoubleLayout ly = layout_of(p);
    p.values[ly.R(1)] = xi.x;
    p.values[ly.L(1)] = xi.y;
    for (int i = 1; i < m; ++i) {
      p.values[ly.L(i + 1)] = identity(dim);
      p.values[ly.R(i + 1)] = xi.nus[i - 1];
    }
    p.values[ly.L(m + 1)] = identity(dim);
    p.values[ly.R(m + 1)] = random_bplus(dim, rng, false);
    for (int i = 1; i <= m; ++i) p.values[ly.g(i)] = xi.base[i - 1];
    try {
      solve_right_gstar(p);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(p)) return p;
  }
  throw ConstructionFailed("lift_left: no attempt reached the big cell");
}

RepPoint lift_right(const FstarPoint& xi, int m, Rng& rng, int attempts) {
  const int n = xi.n(), k = m + n, dim = static_cast<int>(xi.x.rows());
  auto ctx = double_context(k);
  for (int t = 0; t < attempts; ++t) {
    RepPoint p = identity_point(ctx, dim);
    fill_random_decorated(p, rng);
    const DoubleLayout ly = layout_of(p);
    p.values[ly.L(k + 1)] = xi.x;
    p.values[ly.R(k + 1)] = xi.y;
    for (int i = 1; i < n; ++i) {
      p.values[ly.L(k + 1 - i)] = xi.nus[i - 1];
      p.values[ly.R(k + 1 - i)] = identity(dim);
    }
    p.values[ly.R(m + 1)] = identity(dim);
    p.values[ly.L(m + 1)] = random_bplus(dim, rng, false);
    for (int j = 1; j <= n; ++j) p.values[ly.g(k + 1 - j)] = xi.base[j - 1].inverse();
    try {
      solve_left_gstar(p);
    } catch (const OffBigCell&) {
      continue;
    }
    if (is_decorated_rep(p)) return p;
  }
  throw ConstructionFailed("lift_right: no attempt reached the big cell");
}

// Gamma-restricted family
//
// With bottom edges whose product lies in B- and the left pair in Gamma*,
// the relation reads R_{k+1}^-1 L_{k+1} = Gall^-1 L_1^-1 R_1 g_1 n_2 ... n_k g_k
// with n_i = L_i^-1 R_i in N+. The lower part of the right-hand side is
// affine in n_k, so n_k is fixed by a linear solve; the right pair then
// follows from the torus square root of the resulting B+ element.

namespace {

void fill_random_gamma(RepPoint& p, Rng& rng) {
  const DoubleLayout ly = layout_of(p);
  const int n = p.n();
  fill_random_decorated(p, rng);
  Mat t1 = random_torus(n, rng);
  p.values[ly.R(1)] = t1 * random_bplus(n, rng, false);
  p.values[ly.L(1)] = t1.inverse();
}

// Makes g_1...g_k lie in B- by adjusting g_k.
void close_bottom_in_gamma(RepPoint& p, Rng& rng) {
  const DoubleLayout ly = layout_of(p);
  Mat head = identity(p.n());
  for (int i = 1; i < ly.k; ++i) head = head * p.values[ly.g(i)];
  p.values[ly.g(ly.k)] = head.inverse() * random_bminus(p.n(), rng);
}

// Solves hole k and the right Gamma* pair. With keep_left the generator
// L_k stays and R_k is solved, otherwise R_k is drawn in B+ and L_k solved.
bool solve_gamma_tail(RepPoint& p, bool keep_left, Rng& rng) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k, n = p.n();
  const auto& v = p.values;
  Mat gall = identity(n);
  for (int i = 1; i <= k; ++i) gall = gall * v[ly.g(i)];
  Mat A = gall.inverse() * v[ly.L(1)].inverse() * v[ly.R(1)];
  for (int i = 1; i < k; ++i) {
    A = A * v[ly.g(i)];
    if (i + 1 < k) A = A * v[ly.L(i + 1)].inverse() * v[ly.R(i + 1)];
  }
  const Mat& gk = v[ly.g(k)];
  // strict_lower(A (1 + sum c_ij E_ij) g_k) = 0
  std::vector<std::pair<int, int>> unk, eqs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < j) unk.emplace_back(i, j);
      if (i > j) eqs.emplace_back(i, j);
    }
  const Mat base = A * gk;
  Mat M(static_cast<Eigen::Index>(eqs.size()), static_cast<Eigen::Index>(unk.size()));
  Vec rhs(static_cast<Eigen::Index>(eqs.size()));
  for (size_t r = 0; r < eqs.size(); ++r) {
    auto [a, b] = eqs[r];
    rhs(static_cast<Eigen::Index>(r)) = -base(a, b);
    for (size_t c = 0; c < unk.size(); ++c) {
      auto [i, j] = unk[c];
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = A(a, i) * gk(j, b);
    }
  }
  Eigen::FullPivLU<Mat> lu(M);
  if (!lu.isInvertible()) return false;
  Vec c = lu.solve(rhs);
  Mat nk = identity(n);
  for (size_t u = 0; u < unk.size(); ++u) nk(unk[u].first, unk[u].second) = c(static_cast<Eigen::Index>(u));
  if (keep_left) {
    p.values[ly.R(k)] = v[ly.L(k)] * nk;
  } else {
    p.values[ly.R(k)] = random_bplus(n, rng);
    p.values[ly.L(k)] = v[ly.R(k)] * nk.inverse();
  }
  const Mat Z = A * nk * gk;
  if (!member(Z, Subgroup::BPlus, 1e-9 * scale_of(Z))) return false;
  const Mat t2 = torus_sqrt(pr_T(Z));
  p.values[ly.R(k + 1)] = t2.inverse();
  p.values[ly.L(k + 1)] = t2.inverse() * Z;
  return true;
}

bool accept_h(const RepPoint& p) {
  if (!is_decorated_rep(p)) return false;
  const DoubleLayout ly = layout_of(p);
  std::vector<Mat> bottom, top;
  for (int i = 1; i <= ly.k; ++i) {
    bottom.push_back(p.values[ly.g(i)]);
    top.push_back(top_edge(p, i));
  }
  const auto gs = [&](int x, int y) {
    return gamma_star_member(FstarPoint{p.values[x], p.values[y], {}, {identity(p.n())}});
  };
  return gamma_member(FtildePoint{bottom}) && gamma_member(FtildePoint{top}) && gs(ly.R(1), ly.L(1)) &&
         gs(ly.L(ly.k + 1), ly.R(ly.k + 1));
}

}  // namespace

RepPoint sample_h_member(const RepContextPtr& ctx, int n, Rng& rng, int attempts) {
  for (int t = 0; t < attempts; ++t) {
    RepPoint p = identity_point(ctx, n);
    fill_random_gamma(p, rng);
    close_bottom_in_gamma(p, rng);
    if (solve_gamma_tail(p, false, rng) && accept_h(p)) return p;
  }
  throw ConstructionFailed("sample_h_member: no attempt closed the relation");
}

RepPoint sample_h_right_partner(const RepPoint& a, int ma, int nb, Rng& rng, int attempts) {
  const int mb = layout_of(a).k - ma, n = a.n();
  auto ctx = double_context(mb + nb);
  for (int t = 0; t < attempts; ++t) {
    RepPoint b = identity_point(ctx, n);
    fill_random_gamma(b, rng);
    copy_right_part_onto_left(a, ma, b, mb);
    const DoubleLayout lb = layout_of(b);
    if (nb > 1) b.values[lb.R(mb + 1)] = random_bplus(n, rng, false) * b.values[lb.L(mb + 1)];
    close_bottom_in_gamma(b, rng);
    if (solve_gamma_tail(b, nb == 1, rng) && accept_h(b)) return b;
  }
  throw ConstructionFailed("sample_h_right_partner: no attempt closed the relation");
}

RepPoint sample_h_vertical_partner(const RepPoint& b, Rng& rng, int attempts) {
  const DoubleLayout ly = layout_of(b);
  for (int t = 0; t < attempts; ++t) {
    RepPoint a = identity_point(b.ctx, b.n());
    fill_random_gamma(a, rng);
    for (int i = 1; i <= ly.k; ++i) a.values[ly.g(i)] = top_edge(b, i);
    if (solve_gamma_tail(a, false, rng) && accept_h(a)) return a;
  }
  throw ConstructionFailed("sample_h_vertical_partner: no attempt closed the relation");
}

// Tangent spaces

namespace {

void push_entries(std::vector<cd>& out, const Mat& M, bool lower, bool upper, bool diag) {
  const int n = static_cast<int>(M.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((i > j && lower) || (i < j && upper) || (i == j && diag)) out.push_back(M(i, j));
}

// Linear constraints of the decoration and the relation applied to one tangent.
std::vector<cd> linear_constraints(const RepPoint& p, const Tangent& xi) {
  const DoubleLayout ly = layout_of(p);
  const int k = ly.k;
  std::vector<cd> r;
  auto gstar = [&](const Mat& X, const Mat& Y) {
    push_entries(r, X, true, false, false);
    push_entries(r, Y, false, true, false);
    push_entries(r, Mat(pr_T(X) + pr_T(Y)), false, false, true);
  };
  gstar(xi[ly.R(1)], xi[ly.L(1)]);
  gstar(xi[ly.L(k + 1)], xi[ly.R(k + 1)]);
  for (int i = 2; i <= k; ++i) {
    push_entries(r, xi[ly.L(i)], true, false, false);
    push_entries(r, xi[ly.R(i)], true, false, false);
    push_entries(r, Mat(pr_T(xi[ly.L(i)]) - pr_T(xi[ly.R(i)])), false, false, true);
  }
  for (const Word& w : p.ctx->pres.relations) push_entries(r, dword(w, p.values, xi), true, true, true);
  return r;
}

Mat columns_to_matrix(const std::vector<std::vector<cd>>& cols) {
  Mat C(static_cast<Eigen::Index>(cols.front().size()), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    for (size_t r = 0; r < cols[c].size(); ++r) C(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];
  return C;
}

Tangent unit_tangent(const LieData& L, int size, int col) {
  Tangent t(size, Mat::Zero(L.n, L.n));
  t[col / L.dim] = L.basis[col % L.dim];
  return t;
}

Tangent combine(const std::vector<Tangent>& basis, const Vec& c, Eigen::Index offset, int n) {
  Tangent t(basis.front().size(), Mat::Zero(n, n));
  for (size_t j = 0; j < basis.size(); ++j)
    for (size_t e = 0; e < t.size(); ++e) t[e] += c(offset + static_cast<Eigen::Index>(j)) * basis[j][e];
  return t;
}

void append(std::vector<cd>& out, const Mat& M) {
  for (Eigen::Index i = 0; i < M.size(); ++i) out.push_back(M.data()[i]);
}

std::vector<std::pair<Tangent, Tangent>> solve_pairs(const std::vector<Tangent>& Ta, const std::vector<Tangent>& Tb,
                                                     const std::function<std::vector<cd>(const Tangent&, const Tangent&)>& cons,
                                                     int n) {
  const Tangent za(Ta.front().size(), Mat::Zero(n, n)), zb(Tb.front().size(), Mat::Zero(n, n));
  std::vector<std::vector<cd>> cols;
  for (const Tangent& t : Ta) cols.push_back(cons(t, zb));
  for (const Tangent& t : Tb) cols.push_back(cons(za, t));
  Mat K = null_space(columns_to_matrix(cols));
  std::vector<std::pair<Tangent, Tangent>> out;
  for (Eigen::Index c = 0; c < K.cols(); ++c) {
    Vec v = K.col(c);
    out.emplace_back(combine(Ta, v, 0, n), combine(Tb, v, static_cast<Eigen::Index>(Ta.size()), n));
  }
  return out;
}

}  // namespace

Mat decoration_constraints(const LieData& L, const RepPoint& p) {
  std::vector<std::vector<cd>> cols;
  for (int c = 0; c < p.size() * L.dim; ++c) cols.push_back(linear_constraints(p, unit_tangent(L, p.size(), c)));
  return columns_to_matrix(cols);
}

std::vector<Tangent> decorated_tangent_basis(const LieData& L, const RepPoint& p) {
  Mat K = null_space(decoration_constraints(L, p));
  std::vector<Tangent> out;
  for (Eigen::Index c = 0; c < K.cols(); ++c) out.push_back(from_coeffs(L, K.col(c)));
  return out;
}

double tangency_defect(const LieData& L, const std::vector<Tangent>& basis, const Tangent& t) {
  Mat B(static_cast<Eigen::Index>(t.size()) * L.dim, static_cast<Eigen::Index>(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) B.col(static_cast<Eigen::Index>(j)) = to_coeffs(L, basis[j]);
  Vec w = to_coeffs(L, t);
  Vec c = B.completeOrthogonalDecomposition().solve(w);
  return (B * c - w).norm() / (w.norm() + 1e-300);
}

std::vector<Tangent> hole_gauge_directions(const LieData& L, const RepPoint& p) {
  const DoubleLayout ly = layout_of(p);
  const int nv = static_cast<int>(p.ctx->surface.vertices.size());
  std::vector<Tangent> out;
  for (int i = 2; i <= ly.k; ++i)
    for (int v : {i - 1, ly.k + i})
      for (int j = 0; j < L.rank + L.npos; ++j) {
        std::vector<Mat> u(nv, Mat::Zero(L.n, L.n));
        u[v] = L.basis[j];
        out.push_back(infinitesimal_gauge(u, p));
      }
  return out;
}

std::vector<std::pair<Tangent, Tangent>> composable_vertical_tangents(const LieData& L, const RepPoint& a,
                                                                      const RepPoint& b) {
  const DoubleLayout ly = layout_of(a);
  std::vector<Word> top_words;
  for (int i = 1; i <= ly.k; ++i) top_words.push_back(b.ctx->pres.edge_words[b.ctx->surface.edge_id("h" + std::to_string(i))]);
  auto cons = [&](const Tangent& ta, const Tangent& tb) {
    std::vector<cd> r;
    for (int i = 1; i <= ly.k; ++i) append(r, Mat(ta[ly.g(i)] - dword(top_words[i - 1], b.values, tb)));
    return r;
  };
  return solve_pairs(decorated_tangent_basis(L, a), decorated_tangent_basis(L, b), cons, L.n);
}

std::vector<std::pair<Tangent, Tangent>> composable_horizontal_tangents(const LieData& L, const RepPoint& a, int ma,
                                                                        const RepPoint& b, int mb) {
  const DoubleLayout la = layout_of(a), lb = layout_of(b);
  const int ka = la.k;
  if (ka - ma != mb) throw NonComposable("composable_horizontal_tangents: part sizes differ");
  auto cons = [&](const Tangent& ta, const Tangent& tb) {
    std::vector<cd> r;
    for (int i = 1; i <= mb; ++i) {
      const Mat& g = a.values[la.g(ka + 1 - i)];
      append(r, Mat(tb[lb.g(i)] + g.inverse() * ta[la.g(ka + 1 - i)] * g));
    }
    for (int i = 0; i <= mb; ++i) append(r, Mat(tb[lb.L(i + 1)] - ta[la.R(ka + 1 - i)]));
    for (int i = 0; i < mb; ++i) append(r, Mat(tb[lb.R(i + 1)] - ta[la.L(ka + 1 - i)]));
    return r;
  };
  return solve_pairs(decorated_tangent_basis(L, a), decorated_tangent_basis(L, b), cons, L.n);
}

namespace {

nlohmann::json mats_json(const std::vector<Mat>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (const Mat& m : ms) a.push_back(mat_to_json(m));
  return a;
}

}  // namespace

nlohmann::json to_json(const BimoduleQuad& q) {
  nlohmann::json j{{"kind", "bimodule_quad"}, {"m", q.m()},          {"n", q.n()},
                   {"h", to_json(q.h)},      {"rho2", to_json(q.rho2)}, {"rho1", to_json(q.rho1)},
                   {"g", to_json(q.g)}};
  MemberResult r = is_member(q);
  j["member"] = r.ok;
  if (r.ok)
    j["witnesses"] = {{"gauge_rho1", mats_json(r.gauge_rho1)},
                      {"gauge_rho2", mats_json(r.gauge_rho2)},
                      {"gauge_top", mats_json(r.gauge_top)},
                      {"beta", mat_to_json(r.beta)}};
  else
    j["diagnostic"] = r.diagnostic;
  return j;
}

nlohmann::json to_json(const SlimQuad& q) {
  nlohmann::json j = to_json(to_bimodule(q));
  j["kind"] = "slim_quad";
  j["x"] = j["h"];
  j["v"] = j["rho2"];
  j["u"] = j["rho1"];
  j["y"] = j["g"];
  for (const char* key : {"h", "rho2", "rho1", "g", "m"}) j.erase(key);
  return j;
}

}  // namespace qpm
