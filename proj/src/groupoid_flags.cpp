#include "qpm/groupoid_flags.hpp"

#include <sstream>

namespace qpm {

namespace {

double scale_of(const Mat& m) { return 1.0 + m.cwiseAbs().maxCoeff(); }

bool near(const Mat& a, const Mat& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol * std::max(scale_of(a), scale_of(b));
}

bool in_bplus(const Mat& b, double tol) { return member(b, Subgroup::BPlus, tol * scale_of(b)); }

std::string edge_name(char c, int i) { return std::string(1, c) + std::to_string(i); }

}  // namespace

FtildePoint act_ftilde(const std::vector<Mat>& b, const FtildePoint& p) {
  const int k = p.k();
  if (static_cast<int>(b.size()) != k - 1) throw Error("act_ftilde: expected k-1 gauge elements");
  FtildePoint out = p;
  for (int i = 0; i < k - 1; ++i) {
    out.g[i] = out.g[i] * b[i].inverse();
    out.g[i + 1] = b[i] * out.g[i + 1];
  }
  return out;
}

FnPoint act_fn(const std::vector<Mat>& b, const FnPoint& p) {
  const int n = p.n();
  if (static_cast<int>(b.size()) != n) throw Error("act_fn: expected n gauge elements");
  FnPoint out = p;
  for (int i = 0; i < n; ++i) {
    out.g[i] = out.g[i] * b[i].inverse();
    if (i + 1 < n) out.g[i + 1] = b[i] * out.g[i + 1];
  }
  return out;
}

namespace {

// Sequential solve of a_1 b_1^-1 = c_1, b_{i-1} a_i b_i^-1 = c_i for i <= m,
// with every candidate checked for membership in B+.
std::optional<std::vector<Mat>> sequential_solve(const std::vector<Mat>& a, const std::vector<Mat>& c, int m,
                                                 double tol) {
  std::vector<Mat> b;
  Mat prev = identity(static_cast<int>(a.front().rows()));
  for (int i = 0; i < m; ++i) {
    Mat bi = c[i].inverse() * prev * a[i];
    if (!in_bplus(bi, tol)) return std::nullopt;
    b.push_back(bi);
    prev = bi;
  }
  return b;
}

}  // namespace

std::optional<std::vector<Mat>> solve_ftilde_gauge(const FtildePoint& a, const FtildePoint& c, double tol) {
  if (a.k() != c.k()) return std::nullopt;
  const int k = a.k();
  auto b = sequential_solve(a.g, c.g, k - 1, tol);
  if (!b) return std::nullopt;
  Mat last = k >= 2 ? Mat((*b)[k - 2] * a.g[k - 1]) : a.g[0];
  if (!near(last, c.g[k - 1], tol)) return std::nullopt;
  return b;
}

std::optional<std::vector<Mat>> solve_fn_gauge(const FnPoint& a, const FnPoint& c, double tol) {
  if (a.n() != c.n()) return std::nullopt;
  return sequential_solve(a.g, c.g, a.n(), tol);
}

bool equal_ftilde(const FtildePoint& a, const FtildePoint& b, double tol) {
  return solve_ftilde_gauge(a, b, tol).has_value();
}

bool equal_fn(const FnPoint& a, const FnPoint& b, double tol) { return solve_fn_gauge(a, b, tol).has_value(); }

FtildePoint random_ftilde(int k, int n, Rng& rng, double scale) {
  FtildePoint p;
  for (int i = 0; i < k; ++i) p.g.push_back(random_sl(n, rng, scale));
  return p;
}

FnPoint random_fn(int count, int n, Rng& rng, double scale) {
  FnPoint p;
  for (int i = 0; i < count; ++i) p.g.push_back(random_sl(n, rng, scale));
  return p;
}

std::vector<Mat> random_bplus_tuple(int count, int n, Rng& rng, double scale) {
  std::vector<Mat> b;
  for (int i = 0; i < count; ++i) b.push_back(random_bplus(n, rng, true, scale));
  return b;
}

FtildePoint psi(const RepPoint& p) {
  const MarkedSurface& S = p.ctx->surface;
  if (S.family != Family::Disc) throw Error("psi: expected a disc");
  if (relation_defect(p) > 1e-8) throw NonMatchingPoint("psi: relations do not hold");
  FtildePoint out;
  for (int i = 1; i <= S.param; ++i) out.g.push_back(eval_boundary(p, S.edge_id(edge_name('a', i))));
  return out;
}

RepPoint psi_inverse(const RepContextPtr& ctx, const FtildePoint& a) {
  const MarkedSurface& S = ctx->surface;
  if (S.family != Family::Disc || S.param != a.k()) throw Error("psi_inverse: disc and point lengths differ");
  const int k = a.k(), n = static_cast<int>(a.g.front().rows());
  // x_i = a_1 ... a_i, a_{k+1} = x_k^-1
  std::map<int, Mat> edge_value;
  Mat prod = identity(n);
  for (int i = 1; i <= k; ++i) {
    edge_value[S.edge_id(edge_name('a', i))] = a.g[i - 1];
    prod = prod * a.g[i - 1];
    edge_value[S.edge_id(edge_name('x', i))] = prod;
  }
  edge_value[S.edge_id(edge_name('a', k + 1))] = prod.inverse();
  RepPoint p{ctx, {}};
  for (int e : ctx->pres.generators) p.values.push_back(edge_value.at(e));
  return p;
}

FtildePoint chi_pair(const FtildePoint& g, const FtildePoint& h) {
  if (g.k() != h.k()) throw Error("chi_pair: lengths differ");
  FtildePoint out = g;
  for (int i = h.k() - 1; i >= 0; --i) out.g.push_back(h.g[i].inverse());
  return out;
}

std::optional<Mat> coset_representative(const Mat& g, double tol) {
  try {
    return gauss_decompose(g, tol).lower;
  } catch (const OffBigCell&) {
    return std::nullopt;
  }
}

bool same_coset(const Mat& g, const Mat& h, double tol) { return in_bplus(Mat(g.inverse() * h), tol); }

JImage j_map(const FtildePoint& p, double tol) {
  JImage J;
  Mat prod = identity(static_cast<int>(p.g.front().rows()));
  for (int i = 0; i < p.k(); ++i) {
    prod = prod * p.g[i];
    if (i + 1 == p.k()) break;
    auto rep = coset_representative(prod, tol);
    J.flags.push_back(rep ? *rep : prod);
    J.off_cell.push_back(!rep);
  }
  J.product = prod;
  return J;
}

Mat psi_printed_bivector(const LieData& L, const RepPoint& p) {
  const MarkedSurface& S = p.ctx->surface;
  if (S.family != Family::Disc) throw Error("psi_printed_bivector: expected a disc");
  const int k = S.param, d = L.dim;
  std::vector<int> slot(k);
  for (int i = 1; i <= k; ++i) {
    const int e = S.edge_id(edge_name('x', i));
    const auto& gens = p.ctx->pres.generators;
    auto it = std::find(gens.begin(), gens.end(), e);
    if (it == gens.end()) throw Error("psi_printed_bivector: generators must be x_1..x_k");
    slot[i - 1] = static_cast<int>(it - gens.begin());
  }
  Mat Q = Mat::Zero(p.size() * d, p.size() * d);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      Q.block(slot[a] * d, slot[b] * d, d, d) += L.r_tensor;
      Q.block(slot[b] * d, slot[a] * d, d, d) -= L.r_tensor.transpose();
    }
  for (int a = 0; a + 1 < k; ++a) Q.block(slot[a] * d, slot[a] * d, d, d) += L.lambda;
  Mat Ad = L.ad_matrix(p.values[slot[k - 1]]);
  Q.block(slot[k - 1] * d, slot[k - 1] * d, d, d) += L.lambda - Ad * L.lambda * Ad.transpose();
  return Q;
}

FstarElement fstar_identity_element(int count, int n) {
  Mat I = identity(n);
  return FstarElement{I, I, std::vector<Mat>(count - 1, I), std::vector<Mat>(count - 1, I), I};
}

FstarElement fstar_element(const FstarPoint& p) {
  const int n = static_cast<int>(p.x.rows());
  Mat I = identity(n);
  return FstarElement{p.x, p.y, std::vector<Mat>(p.nus.size(), I), p.nus, I};
}

FstarElement operator*(const FstarElement& a, const FstarElement& b) {
  FstarElement c{a.x * b.x, a.y * b.y, {}, {}, a.b * b.b};
  for (size_t i = 0; i < a.z.size(); ++i) {
    c.z.push_back(a.z[i] * b.z[i]);
    c.zp.push_back(a.zp[i] * b.zp[i]);
  }
  return c;
}

FstarElement inverse(const FstarElement& a) {
  FstarElement c{a.x.inverse(), a.y.inverse(), {}, {}, a.b.inverse()};
  for (size_t i = 0; i < a.z.size(); ++i) {
    c.z.push_back(a.z[i].inverse());
    c.zp.push_back(a.zp[i].inverse());
  }
  return c;
}

FstarElement gauge_element(const std::vector<Mat>& b) {
  const int n = static_cast<int>(b.front().rows());
  FstarElement k{identity(n), identity(n), {}, {}, b.back()};
  for (size_t i = 0; i + 1 < b.size(); ++i) {
    k.z.push_back(b[i]);
    k.zp.push_back(b[i]);
  }
  return k;
}

FnPoint fstar_act(const FstarElement& k, const FnPoint& g) {
  const int n = g.n();
  if (static_cast<int>(k.z.size()) != n - 1) throw Error("fstar_act: lengths differ");
  FnPoint h = g;
  for (int i = 0; i < n; ++i) {
    Mat left = i == 0 ? k.x : k.zp[i - 1];
    Mat right = i + 1 < n ? k.z[i] : k.b;
    h.g[i] = left * g.g[i] * right.inverse();
  }
  return h;
}

FstarPoint normalize(const FstarElement& k, const FnPoint& base) {
  FstarPoint p{k.x, k.y, {}, base.g};
  for (size_t i = 0; i < k.z.size(); ++i) p.nus.push_back(k.z[i].inverse() * k.zp[i]);
  return p;
}

bool is_fstar_point(const FstarPoint& p, double tol) {
  if (static_cast<int>(p.nus.size()) != p.n() - 1) return false;
  if (!member(p.x, p.y, Subgroup::GStar, tol)) return false;
  for (const Mat& m : p.nus)
    if (!member(m, Subgroup::NPlus, tol * scale_of(m))) return false;
  for (const Mat& g : p.base)
    if (std::abs(g.determinant() - 1.0) > tol * scale_of(g)) return false;
  return true;
}

FstarPoint random_fstar(int count, int n, Rng& rng, double scale) {
  Mat t = random_torus(n, rng, scale);
  FstarPoint p{t * random_bplus(n, rng, false, scale), t.inverse() * random_bminus(n, rng, false, scale), {}, {}};
  for (int i = 0; i + 1 < count; ++i) p.nus.push_back(random_bplus(n, rng, false, scale));
  for (int i = 0; i < count; ++i) p.base.push_back(random_sl(n, rng, scale));
  return p;
}

FnPoint fstar_source(const FstarPoint& p) { return FnPoint{p.base}; }

FnPoint fstar_target(const FstarPoint& p) { return fstar_act(fstar_element(p), FnPoint{p.base}); }

FstarPoint fstar_unit(const FnPoint& g) {
  const int n = static_cast<int>(g.g.front().rows());
  return FstarPoint{identity(n), identity(n), std::vector<Mat>(g.n() - 1, identity(n)), g.g};
}

FstarPoint fstar_inverse(const FstarPoint& p) {
  FstarElement k = fstar_element(p);
  return normalize(inverse(k), fstar_act(k, FnPoint{p.base}));
}

FstarPoint fstar_compose(const FstarPoint& p, const FstarPoint& q, double tol) {
  FstarElement kq = fstar_element(q);
  FnPoint tq = fstar_act(kq, FnPoint{q.base});
  auto c = solve_fn_gauge(tq, FnPoint{p.base}, tol);
  if (!c) throw NonComposable("fstar_compose: source of the first arrow differs from the target of the second");
  return normalize(fstar_element(p) * gauge_element(*c) * kq, FnPoint{q.base});
}

FstarPoint fstar_twist(const std::vector<Mat>& c, const FstarPoint& p) {
  FstarPoint out = p;
  out.base = act_fn(c, FnPoint{p.base}).g;
  for (size_t i = 0; i < p.nus.size(); ++i) out.nus[i] = c[i] * p.nus[i] * c[i].inverse();
  return out;
}

bool equal_fstar(const FstarPoint& p, const FstarPoint& q, double tol) {
  if (p.n() != q.n()) return false;
  if (!near(p.x, q.x, tol) || !near(p.y, q.y, tol)) return false;
  auto c = solve_fn_gauge(FnPoint{p.base}, FnPoint{q.base}, tol);
  if (!c) return false;
  for (size_t i = 0; i < p.nus.size(); ++i)
    if (!near((*c)[i] * p.nus[i] * (*c)[i].inverse(), q.nus[i], tol)) return false;
  return true;
}

SchubertWord schubert_word(const FnPoint& p, double tol) {
  SchubertWord w;
  for (const Mat& g : p.g) w.words.push_back(bruhat_word(g, tol));
  return w;
}

SchubertWord schubert_word(const FtildePoint& p, double tol) { return schubert_word(FnPoint{p.g}, tol); }

std::string to_string(const SchubertWord& w) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < w.words.size(); ++i) os << (i ? ", " : "") << perm_to_string(w.words[i]);
  os << ")";
  return os.str();
}

bool gamma_member(const FtildePoint& p, double tol) {
  Mat prod = identity(static_cast<int>(p.g.front().rows()));
  for (const Mat& g : p.g) prod = prod * g;
  return member(prod, Subgroup::BMinus, tol * scale_of(prod));
}

bool gamma_star_member(const FstarPoint& p, double tol) {
  if (!member(p.y, Subgroup::T, tol)) return false;
  return near(p.y, pr_T(p.x).inverse(), tol);
}

nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

namespace {

nlohmann::json mats_to_json(const std::vector<Mat>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (const Mat& m : ms) a.push_back(mat_to_json(m));
  return a;
}

}  // namespace

nlohmann::json to_json(const FtildePoint& p) { return {{"kind", "ftilde"}, {"g", mats_to_json(p.g)}}; }

nlohmann::json to_json(const FnPoint& p) { return {{"kind", "fn"}, {"g", mats_to_json(p.g)}}; }

nlohmann::json to_json(const FstarPoint& p) {
  return {{"kind", "fstar"},
          {"x", mat_to_json(p.x)},
          {"y", mat_to_json(p.y)},
          {"nus", mats_to_json(p.nus)},
          {"base", mats_to_json(p.base)}};
}

}  // namespace qpm
