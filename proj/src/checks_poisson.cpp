// Checks on plain discs and on the fission space.

#include "qpm/double_groupoid.hpp"
#include "qpm/fission.hpp"
#include "qpm/groupoid_flags.hpp"
#include "qpm/verify.hpp"

#include <algorithm>

namespace qpm {

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double rel(const Mat& a, const Mat& b) { return max_abs(a - b) / (1.0 + max_abs(b)); }

double rel(cd a, cd b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

RepContextPtr disc_ctx(const CheckContext& c) {
  return c.cfg.surface == SurfaceKind::Double ? double_context(c.cfg.surface_k) : make_context(disc(c.cfg.surface_k));
}

std::vector<Mat> random_gauge(int nv, int n, Rng& rng) {
  std::vector<Mat> g;
  for (int v = 0; v < nv; ++v) g.push_back(random_sl(n, rng));
  return g;
}

// f(p) = sum_e tr(F_e p(e)) and its right-trivialized differential.
struct LinearObservable {
  std::vector<Mat> F;
  Vec differential(const LieData& L, const RepPoint& p) const {
    Vec v(p.size() * L.dim);
    for (int e = 0; e < p.size(); ++e)
      for (int a = 0; a < L.dim; ++a) v(e * L.dim + a) = (F[e] * L.basis[a] * p.values[e]).trace();
    return v;
  }
};

LinearObservable random_observable(int n, int edges, Rng& rng) {
  LinearObservable f;
  for (int e = 0; e < edges; ++e) {
    Mat F(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) F(i, j) = rng.cnormal();
    f.F.push_back(F);
  }
  return f;
}

// Jacobiator of three linear observables for the quasi-Poisson bivector,
// with the derivatives of the inner brackets taken by central differences
// of step h along exp(t X_a) p(e).
cd fd_jacobiator(const LieData& L, const RepPoint& p, const LinearObservable* fs[3], double h) {
  const Mat P = quasi_bivector(L, p);
  cd total = 0;
  for (int c = 0; c < 3; ++c) {
    const LinearObservable& a = *fs[c];
    const LinearObservable& b = *fs[(c + 1) % 3];
    const LinearObservable& cc = *fs[(c + 2) % 3];
    auto inner = [&](const RepPoint& q) {
      return cd((b.differential(L, q).transpose() * quasi_bivector(L, q) * cc.differential(L, q))(0, 0));
    };
    Vec d(p.size() * L.dim);
    for (int e = 0; e < p.size(); ++e)
      for (int k = 0; k < L.dim; ++k) {
        RepPoint plus = p, minus = p;
        plus.values[e] = expm(h * L.basis[k]) * p.values[e];
        minus.values[e] = expm(-h * L.basis[k]) * p.values[e];
        d(e * L.dim + k) = (inner(plus) - inner(minus)) / (2 * h);
      }
    total += (a.differential(L, p).transpose() * P * d)(0, 0);
  }
  return total;
}

cd contract(const Tensor3& T, const Vec& a, const Vec& b, const Vec& c) {
  cd s = 0;
  for (int i = 0; i < T.dim(); ++i)
    for (int j = 0; j < T.dim(); ++j)
      for (int k = 0; k < T.dim(); ++k) s += T(i, j, k) * a(i) * b(j) * c(k);
  return s;
}

// max |1/2 [pi, pi] - rho(chi)|, absolute (the point is drawn near the
// identity); the mutation compares against -rho(chi). The finite-difference
// Jacobiator must equal minus the algebraic bracket (vector fields of the
// right action bracket with the opposite sign) up to 1e-6 relative.
SampleOutcome quasi_poisson_identity(const CheckContext& c) {
  const int n = c.cfg.group_n;
  RepPoint p = random_point(disc_ctx(c), n, c.rng);
  const Tensor3 hs = half_schouten(c.lie, p), rc = rho_chi(c.lie, p);
  const double sign = c.cfg.mutate ? -1.0 : 1.0;
  SampleOutcome o;
  for (int i = 0; i < hs.dim(); ++i)
    for (int j = 0; j < hs.dim(); ++j)
      for (int k = 0; k < hs.dim(); ++k) o.defect = std::max(o.defect, std::abs(hs(i, j, k) - sign * rc(i, j, k)));
  LinearObservable f = random_observable(n, p.size(), c.rng), g = random_observable(n, p.size(), c.rng),
                   h = random_observable(n, p.size(), c.rng);
  const LinearObservable* fs[3] = {&f, &g, &h};
  const cd fd = fd_jacobiator(c.lie, p, fs, c.cfg.fd_step);
  const cd alg = contract(hs, f.differential(c.lie, p), g.differential(c.lie, p), h.differential(c.lie, p));
  const double gap = std::abs(fd + alg) / (1.0 + std::abs(alg));
  o.extras.emplace_back("fd_disagreement", gap);
  if (gap > 1e-6) o.diagnostic = "finite-difference Jacobiator disagrees with the algebraic bracket";
  return o;
}

// Gauge equivariance of the bivector, relative: pushing pi forward by the
// gauge map (Ad of the target-vertex element on each generator) gives pi at
// the gauged point. Mutation: use the source vertex.
SampleOutcome gauge_invariance(const CheckContext& c) {
  const int n = c.cfg.group_n;
  auto ctx = disc_ctx(c);
  RepPoint p = random_point(ctx, n, c.rng);
  const int nv = static_cast<int>(ctx->surface.vertices.size());
  auto g = random_gauge(nv, n, c.rng);
  const LieData& L = c.lie;
  Mat P = quasi_bivector(L, p);
  Mat D = Mat::Zero(P.rows(), P.cols());
  for (int e = 0; e < p.size(); ++e) {
    const Edge& ed = ctx->surface.edges[ctx->pres.generators[e]];
    D.block(e * L.dim, e * L.dim, L.dim, L.dim) = L.ad_matrix(g[c.cfg.mutate ? ed.S : ed.T]);
  }
  return {rel(D * P * D.transpose(), quasi_bivector(L, gauge_act(g, p))), "", {}};
}

// Boundary holonomies transform as g_T e g_S^-1, relative. Mutation: swap
// the two ends.
SampleOutcome moment_equivariance(const CheckContext& c) {
  const int n = c.cfg.group_n;
  auto ctx = disc_ctx(c);
  const auto& S = ctx->surface;
  RepPoint p = random_point(ctx, n, c.rng);
  auto g = random_gauge(static_cast<int>(S.vertices.size()), n, c.rng);
  RepPoint q = gauge_act(g, p);
  SampleOutcome o;
  for (int e : S.boundary_edges()) {
    const int s = c.cfg.mutate ? S.edges[e].T : S.edges[e].S;
    const int t = c.cfg.mutate ? S.edges[e].S : S.edges[e].T;
    o.defect = std::max(o.defect, rel(eval_edge(q, e), g[t] * eval_edge(p, e) * g[s].inverse()));
  }
  return o;
}

// Bivector of the decorated disc against the closed mixed-product
// expression in the flag coordinates, termwise and relative. Mutation: drop
// the boundary decoration (every vertex B~+).
SampleOutcome psi_poisson(const CheckContext& c) {
  auto ctx = disc_ctx(c);
  RepPoint p = random_point(ctx, c.cfg.group_n, c.rng);
  Decoration d = disc_decoration(ctx->surface);
  if (c.cfg.mutate)
    for (auto& [v, tag] : d.vertex) tag = LagTag::BTildePlus;
  return {rel(full_bivector(c.lie, p, d), psi_printed_bivector(c.lie, p)), "", {}};
}

// Fission space G x G*: moment equivariance, antisymmetry and invariance of
// the form, and both moment conditions (factor 1 for G, 2 for T in the wedge
// convention used throughout). All relative. Mutation: factor 1 for T.
SampleOutcome fission_axioms(const CheckContext& c) {
  const int n = c.cfg.group_n;
  const LieData& L = c.lie;
  Rng& rng = c.rng;
  FissionPoint p = random_fission_point(n, rng);
  SampleOutcome o;
  auto note = [&](double d) { o.defect = std::max(o.defect, d); };
  if (!is_fission_point(p)) o.diagnostic = "sampled point is off G x G*";
  Mat g = random_sl(n, rng), t = random_torus(n, rng);
  FissionPoint q = fission_act(g, t, p);
  if (!is_fission_point(q)) o.diagnostic = "action leaves G x G*";
  FissionMoment m = fission_moment(p), mq = fission_moment(q);
  note(rel(mq.g, g * m.g * g.inverse()));
  note(rel(mq.t, m.t));
  FissionTangent u = random_fission_tangent(n, rng), v = random_fission_tangent(n, rng);
  const cd w = fission_form(L, p, u, v);
  note(rel(-fission_form(L, p, v, u), w));
  note(rel(fission_form(L, q, fission_act_tangent(g, t, u), fission_act_tangent(g, t, v)), w));
  auto [dg, dt] = fission_moment_derivative(p, v);
  Mat X = random_traceless(n, rng, 1.0);
  Mat Y = pr_T(random_traceless(n, rng, 1.0));
  Mat Z = Mat::Zero(n, n);
  Mat theta_l = m.g.inverse() * dg * m.g;
  note(rel(fission_form(L, p, fission_generator(p, X, Z), v), 0.5 * L.pair(theta_l + dg, X)));
  const double factor = c.cfg.mutate ? 1.0 : 2.0;
  note(rel(fission_form(L, p, fission_generator(p, Z, Y), v), factor * L.pair(dt, Y)));
  return o;
}

}  // namespace

void register_poisson_checks(std::vector<CheckInfo>& out) {
  out.push_back({"quasi_poisson_identity", "1/2 [pi, pi] = rho(chi) on disc(k) or its double, with a finite-difference Jacobiator",
                 SurfaceKind::Disc, "absolute max entry of 1/2 [pi, pi] - rho(chi)", "compare against -rho(chi)",
                 quasi_poisson_identity, true});
  out.push_back({"gauge_invariance", "the bivector is carried to itself by the gauge action", SurfaceKind::Disc,
                 "relative max entry", "use the source vertex in the pushforward", gauge_invariance, true});
  out.push_back({"moment_equivariance", "boundary holonomies transform as g_T e g_S^-1", SurfaceKind::Disc,
                 "relative max entry", "swap the two ends", moment_equivariance, true});
  out.push_back({"psi_poisson", "decorated disc bivector equals the mixed-product expression in flag coordinates",
                 SurfaceKind::Disc, "relative max entry", "drop the boundary decoration", psi_poisson});
  out.push_back({"fission_axioms", "G x T equivariance, invariance of the form and moment conditions on G x G*",
                 SurfaceKind::None, "relative", "factor 1 in the torus moment condition", fission_axioms});
}

}  // namespace qpm
