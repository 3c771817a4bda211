#include "qpm/rep_variety.hpp"

#include <set>

namespace qpm {

namespace {

std::shared_ptr<RepContext> context_from(const MarkedSurface& S, const Skeleton& sk, const std::vector<int>& gens) {
  auto ctx = std::make_shared<RepContext>();
  ctx->surface = S;
  ctx->skeleton = sk;
  ctx->pres = present(S, gens);
  if (ctx->pres.generators.size() != gens.size())
    throw Error("generator set of " + S.provenance + " does not determine every edge");
  return ctx;
}

int generator_index(const RepContext& ctx, int edge) {
  const auto& g = ctx.pres.generators;
  for (size_t i = 0; i < g.size(); ++i)
    if (g[i] == edge) return static_cast<int>(i);
  return -1;
}

}  // namespace

RepContextPtr make_context(const MarkedSurface& S) { return make_context(S, default_skeleton(S)); }

RepContextPtr make_context(const MarkedSurface& S, const Skeleton& sk) { return context_from(S, sk, sk.edges); }

RepContextPtr make_context(const MarkedSurface& S, const std::vector<int>& generators) {
  Presentation P = present(S, generators);
  return context_from(S, make_skeleton(S, P.generators), P.generators);
}

RepPoint identity_point(const RepContextPtr& ctx, int n) {
  return RepPoint{ctx, std::vector<Mat>(ctx->pres.generators.size(), identity(n))};
}

RepPoint random_point(const RepContextPtr& ctx, int n, Rng& rng, double scale) {
  RepPoint p{ctx, {}};
  for (size_t i = 0; i < ctx->pres.generators.size(); ++i) p.values.push_back(random_sl(n, rng, scale));
  return p;
}

Mat eval_word(const Word& w, const std::vector<Mat>& vals) {
  const int n = static_cast<int>(vals.front().rows());
  Mat M = identity(n);
  for (const Letter& l : w) M = M * (l.sign > 0 ? vals[l.id] : Mat(vals[l.id].inverse()));
  return M;
}

Mat dword(const Word& w, const std::vector<Mat>& vals, const Tangent& xi) {
  const int n = static_cast<int>(vals.front().rows());
  Mat pre = identity(n), pre_inv = identity(n);
  Mat out = Mat::Zero(n, n);
  for (const Letter& l : w) {
    const Mat& a = vals[l.id];
    if (l.sign > 0) {
      out += pre * xi[l.id] * pre_inv;
      pre = pre * a;
      pre_inv = a.inverse() * pre_inv;
    } else {
      Mat ai = a.inverse();
      pre = pre * ai;
      pre_inv = a * pre_inv;
      out -= pre * xi[l.id] * pre_inv;
    }
  }
  return out;
}

Mat eval_path(const RepPoint& p, const Path& path) { return eval_word(path_word(p.ctx->pres, path), p.values); }

Mat eval_edge(const RepPoint& p, int edge) { return eval_word(p.ctx->pres.edge_words[edge], p.values); }

Mat eval_boundary(const RepPoint& p, int edge) {
  auto b = p.ctx->surface.boundary_edges();
  if (std::find(b.begin(), b.end(), edge) == b.end())
    throw Error("edge " + p.ctx->surface.edges[edge].name + " is not a boundary edge");
  return eval_edge(p, edge);
}

std::vector<Mat> all_edge_values(const RepPoint& p) {
  std::vector<Mat> out;
  for (const Word& w : p.ctx->pres.edge_words) out.push_back(eval_word(w, p.values));
  return out;
}

Tangent all_edge_tangents(const RepPoint& p, const Tangent& xi) {
  Tangent out;
  for (const Word& w : p.ctx->pres.edge_words) out.push_back(dword(w, p.values, xi));
  return out;
}

double relation_defect(const RepPoint& p) {
  double d = 0;
  const int n = p.n();
  for (const Word& r : p.ctx->pres.relations) d = std::max(d, (eval_word(r, p.values) - identity(n)).cwiseAbs().maxCoeff());
  return d;
}

std::vector<Mat> moment(const RepPoint& p) {
  std::vector<Mat> out;
  for (int e : p.ctx->surface.boundary_edges()) out.push_back(eval_edge(p, e));
  return out;
}

RepPoint gauge_act(const std::vector<Mat>& g, const RepPoint& p) {
  RepPoint q = p;
  const auto& S = p.ctx->surface;
  for (size_t i = 0; i < p.values.size(); ++i) {
    const Edge& e = S.edges[p.ctx->pres.generators[i]];
    q.values[i] = g[e.T] * p.values[i] * g[e.S].inverse();
  }
  return q;
}

Tangent infinitesimal_gauge(const std::vector<Mat>& u, const RepPoint& p) {
  Tangent t;
  const auto& S = p.ctx->surface;
  for (size_t i = 0; i < p.values.size(); ++i) {
    const Edge& e = S.edges[p.ctx->pres.generators[i]];
    const Mat& a = p.values[i];
    t.push_back(u[e.T] - a * u[e.S] * a.inverse());
  }
  return t;
}

Vec to_coeffs(const LieData& L, const Tangent& xi) {
  Vec c(static_cast<Eigen::Index>(xi.size()) * L.dim);
  for (size_t e = 0; e < xi.size(); ++e) c.segment(static_cast<Eigen::Index>(e) * L.dim, L.dim) = L.coords(xi[e]);
  return c;
}

Tangent from_coeffs(const LieData& L, const Vec& c) {
  Tangent t;
  for (Eigen::Index e = 0; e < c.size() / L.dim; ++e) t.push_back(L.element(c.segment(e * L.dim, L.dim)));
  return t;
}

Mat quasi_bivector(const LieData& L, const RepPoint& p) {
  const int d = L.dim, N = p.size() * d;
  Mat P = Mat::Zero(N, N);
  std::vector<Mat> ads(p.values.size());
  for (size_t e = 0; e < p.values.size(); ++e) ads[e] = L.ad_matrix(p.values[e]);
  // column i of the returned block is X_i(h) in the right frame, placed at rows of edge g
  auto field = [&](const HalfEdge& h, int& g) -> Mat {
    g = generator_index(*p.ctx, h.edge);
    return h.at_target ? Mat(-Mat::Identity(d, d)) : ads[g];
  };
  for (const auto& [v, hs] : p.ctx->skeleton.half_edge_order) {
    for (size_t a = 0; a < hs.size(); ++a) {
      int ga;
      Mat U = field(hs[a], ga);
      for (size_t b = a + 1; b < hs.size(); ++b) {
        int gb;
        Mat W = field(hs[b], gb);
        Mat block = 0.5 * U * L.pairing_inv * W.transpose();
        P.block(ga * d, gb * d, d, d) += block;
        P.block(gb * d, ga * d, d, d) -= block.transpose();
      }
    }
  }
  return P;
}

Mat vertex_action_matrix(const LieData& L, const RepPoint& p, int v) {
  const int d = L.dim;
  Mat R = Mat::Zero(p.size() * d, d);
  const auto& S = p.ctx->surface;
  for (size_t i = 0; i < p.values.size(); ++i) {
    const Edge& e = S.edges[p.ctx->pres.generators[i]];
    if (e.T == v) R.block(static_cast<Eigen::Index>(i) * d, 0, d, d) += Mat::Identity(d, d);
    if (e.S == v) R.block(static_cast<Eigen::Index>(i) * d, 0, d, d) -= L.ad_matrix(p.values[i]);
  }
  return R;
}

namespace {

/// out(a,b,c) = sum A(a,x) B(b,y) C(c,z) T(x,y,z)
Tensor3 transform3(const Tensor3& T, const Mat& M) {
  const int D = static_cast<int>(M.rows()), K = T.dim();
  // contract each slot in turn; intermediate tensors are D x K x K etc.
  std::vector<cd> t1(static_cast<size_t>(D) * K * K, cd(0)), t2(static_cast<size_t>(D) * D * K, cd(0));
  for (int a = 0; a < D; ++a)
    for (int x = 0; x < K; ++x) {
      cd m = M(a, x);
      if (m == cd(0)) continue;
      for (int y = 0; y < K; ++y)
        for (int z = 0; z < K; ++z) t1[(static_cast<size_t>(a) * K + y) * K + z] += m * T(x, y, z);
    }
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int y = 0; y < K; ++y) {
        cd m = M(b, y);
        if (m == cd(0)) continue;
        for (int z = 0; z < K; ++z) t2[(static_cast<size_t>(a) * D + b) * K + z] += m * t1[(static_cast<size_t>(a) * K + y) * K + z];
      }
  Tensor3 out(D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c) {
        cd s = 0;
        for (int z = 0; z < K; ++z) s += M(c, z) * t2[(static_cast<size_t>(a) * D + b) * K + z];
        out(a, b, c) = s;
      }
  return out;
}

}  // namespace

Tensor3 rho_chi(const LieData& L, const RepPoint& p) {
  const int D = p.size() * L.dim;
  Tensor3 out(D);
  for (size_t v = 0; v < p.ctx->surface.vertices.size(); ++v) {
    Mat R = vertex_action_matrix(L, p, static_cast<int>(v));
    if (R.cwiseAbs().maxCoeff() == 0) continue;
    Tensor3 t = transform3(L.chi, R);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int c = 0; c < D; ++c) out(a, b, c) += t(a, b, c);
  }
  return out;
}

Tensor3 half_schouten(const LieData& L, const RepPoint& p) {
  const int d = L.dim, N = p.size(), K = 2 * N * d;
  auto idx = [d](int g, int side, int i) { return (2 * g + side) * d + i; };
  // constant bivector in the mixed frame
  Mat Pm = Mat::Zero(K, K);
  for (const auto& [v, hs] : p.ctx->skeleton.half_edge_order) {
    for (size_t a = 0; a < hs.size(); ++a)
      for (size_t b = a + 1; b < hs.size(); ++b) {
        int ga = generator_index(*p.ctx, hs[a].edge), gb = generator_index(*p.ctx, hs[b].edge);
        double sa = hs[a].at_target ? -1.0 : 1.0, sb = hs[b].at_target ? -1.0 : 1.0;
        int ka = hs[a].at_target ? 0 : 1, kb = hs[b].at_target ? 0 : 1;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            cd c = 0.5 * sa * sb * L.pairing_inv(i, j);
            if (c == cd(0)) continue;
            Pm(idx(ga, ka, i), idx(gb, kb, j)) += c;
            Pm(idx(gb, kb, j), idx(ga, ka, i)) -= c;
          }
      }
  }
  // T(X,Y,Z) = sum_{D,B} Pm(X,D) Pm(B,Z) C^Y_{DB}, C nonzero only inside one (edge, side) block
  Tensor3 T(K);
  for (int g = 0; g < N; ++g)
    for (int side = 0; side < 2; ++side) {
      const int off = idx(g, side, 0);
      const double sgn = side == 0 ? 1.0 : -1.0;
      Mat left = Pm.block(0, off, K, d);   // Pm(X, D)
      Mat right = Pm.block(off, 0, d, K);  // Pm(B, Z)
      for (int k = 0; k < d; ++k) {
        Mat Ck(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) Ck(i, j) = sgn * L.structure(k, i, j);
        Mat slice = left * Ck * right;
        for (int X = 0; X < K; ++X)
          for (int Z = 0; Z < K; ++Z) T(X, off + k, Z) = slice(X, Z);
      }
    }
  Tensor3 J(K);
  for (int X = 0; X < K; ++X)
    for (int Y = 0; Y < K; ++Y)
      for (int Z = 0; Z < K; ++Z) J(X, Y, Z) = T(X, Y, Z) + T(Y, Z, X) + T(Z, X, Y);
  // mixed frame -> right frame
  Mat M = Mat::Zero(N * d, K);
  for (int g = 0; g < N; ++g) {
    M.block(g * d, idx(g, 0, 0), d, d) = Mat::Identity(d, d);
    M.block(g * d, idx(g, 1, 0), d, d) = L.ad_matrix(p.values[g]);
  }
  return transform3(J, M);
}

double schouten_defect(const LieData& L, const RepPoint& p) {
  Tensor3 a = half_schouten(L, p), b = rho_chi(L, p);
  double m = 0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < a.dim(); ++k) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

Decoration disc_decoration(const MarkedSurface& S) {
  if (S.family != Family::Disc) throw UnsupportedFamily("disc decoration needs a disc");
  Decoration d;
  const int k = S.param;
  for (int i = 1; i <= k + 1; ++i) {
    LagTag t = i == 1 ? LagTag::GStar : (i == k + 1 ? LagTag::GStarDual : LagTag::BTildePlus);
    d.vertex[S.vertex_id("v" + std::to_string(i))] = t;
  }
  return d;
}

int first_violated(const Decoration& d, const RepPoint& p, double tol) {
  for (size_t c = 0; c < d.conditions.size(); ++c) {
    const BoundaryCondition& bc = d.conditions[c];
    bool ok = bc.second < 0 ? member(eval_edge(p, bc.first), bc.tag, tol)
                            : member(eval_edge(p, bc.first), eval_edge(p, bc.second), bc.tag, tol);
    if (!ok) return static_cast<int>(c);
  }
  return -1;
}

Mat full_bivector(const LieData& L, const RepPoint& p, const Decoration& d) {
  Mat P = quasi_bivector(L, p);
  for (const auto& [v, tag] : d.vertex) {
    Mat pv = correction_bivector(L, lagrangian(L, tag));
    if (pv.cwiseAbs().maxCoeff() == 0) continue;
    Mat R = vertex_action_matrix(L, p, v);
    P += R * pv * R.transpose();
  }
  return P;
}

namespace {

Mat submatrix(const Mat& W, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat A(rows.size(), cols.size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) A(r, c) = W(rows[r], cols[c]);
  return A;
}

cd factor_base(const Factor& f, const Mat& W) {
  if (f.rows.size() == 1) return W(f.rows[0], f.cols[0]);
  return submatrix(W, f.rows, f.cols).determinant();
}

/// Cofactor matrix of the selected minor.
Mat cofactors(const Factor& f, const Mat& W) {
  const int m = static_cast<int>(f.rows.size());
  Mat C(m, m);
  if (m == 1) {
    C(0, 0) = 1;
    return C;
  }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<int> r, c;
      for (int i = 0; i < m; ++i)
        if (i != a) r.push_back(f.rows[i]);
      for (int j = 0; j < m; ++j)
        if (j != b) c.push_back(f.cols[j]);
      C(a, b) = ((a + b) % 2 ? -1.0 : 1.0) * submatrix(W, r, c).determinant();
    }
  return C;
}

/// Directional derivatives of the factor base along every (generator, basis) direction.
Vec factor_differential(const LieData& L, const Factor& f, const RepPoint& p) {
  const int d = L.dim, n = p.n();
  Vec out = Vec::Zero(p.size() * d);
  Mat W = eval_word(f.word, p.values);
  Mat C = cofactors(f, W);
  Mat pre = identity(n);
  for (const Letter& l : f.word) {
    const Mat& a = p.values[l.id];
    Mat conj;
    double sign;
    if (l.sign > 0) {
      conj = pre;
      sign = 1;
      pre = pre * a;
    } else {
      pre = pre * a.inverse();
      conj = pre;
      sign = -1;
    }
    Mat conj_inv = conj.inverse();
    for (int i = 0; i < d; ++i) {
      Mat dW = sign * conj * L.basis[i] * conj_inv * W;
      cd s = 0;
      for (size_t r = 0; r < f.rows.size(); ++r)
        for (size_t c = 0; c < f.cols.size(); ++c) s += C(r, c) * dW(f.rows[r], f.cols[c]);
      out(l.id * d + i) += s;
    }
  }
  return out;
}

}  // namespace

Observable Observable::constant(cd c) {
  Observable o;
  o.terms.push_back({c, {}});
  return o;
}

Observable Observable::entry(const Word& w, int i, int j) {
  Observable o;
  o.terms.push_back({cd(1), {Factor{w, {i}, {j}, 1}}});
  return o;
}

Observable Observable::minor(const Word& w, std::vector<int> rows, std::vector<int> cols) {
  if (rows.size() != cols.size() || rows.empty()) throw Error("minor needs equally many rows and columns");
  Observable o;
  o.terms.push_back({cd(1), {Factor{w, std::move(rows), std::move(cols), 1}}});
  return o;
}

Observable Observable::operator+(const Observable& o) const {
  Observable r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

Observable Observable::operator*(const Observable& o) const {
  Observable r;
  for (const auto& [c1, f1] : terms)
    for (const auto& [c2, f2] : o.terms) {
      std::vector<Factor> f = f1;
      f.insert(f.end(), f2.begin(), f2.end());
      r.terms.push_back({c1 * c2, f});
    }
  return r;
}

Observable Observable::scaled(cd c) const {
  Observable r = *this;
  for (auto& t : r.terms) t.first *= c;
  return r;
}

Observable Observable::inverse() const {
  if (terms.size() != 1) throw Error("only single-term observables can be inverted");
  Observable r;
  std::vector<Factor> f = terms[0].second;
  for (Factor& x : f) x.power = -x.power;
  r.terms.push_back({cd(1) / terms[0].first, f});
  return r;
}

cd Observable::value(const RepPoint& p) const {
  cd total = 0;
  for (const auto& [c, fs] : terms) {
    cd v = c;
    for (const Factor& f : fs) v *= std::pow(factor_base(f, eval_word(f.word, p.values)), f.power);
    total += v;
  }
  return total;
}

Vec Observable::differential(const LieData& L, const RepPoint& p) const {
  Vec out = Vec::Zero(p.size() * L.dim);
  for (const auto& [c, fs] : terms) {
    std::vector<cd> base;
    for (const Factor& f : fs) base.push_back(factor_base(f, eval_word(f.word, p.values)));
    for (size_t i = 0; i < fs.size(); ++i) {
      cd coef = c * static_cast<double>(fs[i].power) * std::pow(base[i], fs[i].power - 1);
      for (size_t j = 0; j < fs.size(); ++j)
        if (j != i) coef *= std::pow(base[j], fs[j].power);
      out += coef * factor_differential(L, fs[i], p);
    }
  }
  return out;
}

cd bracket(const LieData& L, const Observable& f, const Observable& g, const RepPoint& p, const Mat& P) {
  Vec df = f.differential(L, p), dg = g.differential(L, p);
  return (df.transpose() * P * dg)(0, 0);
}

}  // namespace qpm
