#include "qpm/two_form.hpp"

namespace qpm {

namespace {

// Holonomy word of a path, with letters indexing surface edges.
Word path_as_edge_word(const Path& p) {
  Word w;
  for (auto it = p.rbegin(); it != p.rend(); ++it) w.push_back(*it);
  return w;
}

}  // namespace

cd triangle_form(const LieData& L, const Mat& a1, const Mat& x1, const Mat& x2, const Mat& y1, const Mat& y2) {
  Mat ai = a1.inverse();
  return 0.5 * (L.pair(ai * x1 * a1, y2) - L.pair(ai * y1 * a1, x2));
}

cd two_form_edges(const LieData& L, const MarkedSurface& S, const Triangulation& T, const std::vector<Mat>& values,
                  const Tangent& xi, const Tangent& eta, double tol) {
  const int n = static_cast<int>(values.front().rows());
  for (const Path& f : S.faces) {
    Mat h = eval_word(path_as_edge_word(f), values);
    if ((h - identity(n)).cwiseAbs().maxCoeff() > tol * (1 + h.norm()))
      throw NonMatchingPoint("edge values do not close up around a face");
  }
  cd total = 0;
  for (const Triangle& t : T.triangles) {
    Word w1 = path_as_edge_word(t.side[2]), w2 = path_as_edge_word(t.side[1]);
    Mat a1 = eval_word(w1, values);
    total += triangle_form(L, a1, dword(w1, values, xi), dword(w2, values, xi), dword(w1, values, eta),
                           dword(w2, values, eta));
  }
  return total;
}

cd two_form(const LieData& L, const Triangulation& T, const RepPoint& p, const Tangent& xi, const Tangent& eta) {
  return two_form_edges(L, p.ctx->surface, T, all_edge_values(p), all_edge_tangents(p, xi), all_edge_tangents(p, eta));
}

Mat two_form_gram(const LieData& L, const Triangulation& T, const RepPoint& p, const std::vector<Tangent>& ts) {
  std::vector<Mat> vals = all_edge_values(p);
  std::vector<Tangent> et;
  for (const Tangent& t : ts) et.push_back(all_edge_tangents(p, t));
  const int m = static_cast<int>(ts.size());
  Mat G = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      G(i, j) = two_form_edges(L, p.ctx->surface, T, vals, et[i], et[j]);
      G(j, i) = -G(i, j);
    }
  return G;
}

Mat null_space(const Mat& C, double tol) {
  const Eigen::Index N = C.cols();
  if (C.rows() == 0) return Mat::Identity(N, N);
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, smax)) ++rank;
  return svd.matrixV().rightCols(N - rank);
}

}  // namespace qpm
