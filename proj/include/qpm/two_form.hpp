#pragma once

#include "qpm/rep_variety.hpp"

namespace qpm {

// Wedge convention used by every 2-form in the library:
//   <a, b>(u, v) = <a(u), b(v)> - <a(v), b(u)>.

/// omega_{(a1,a2)} = 1/2 <a1^* theta^l, a2^* theta^r> for one triangle, with
/// right-trivialized tangents (x1, x2) and (y1, y2) of (a1, a2).
cd triangle_form(const LieData& L, const Mat& a1, const Mat& x1, const Mat& x2, const Mat& y1, const Mat& y2);

/// Sum of triangle_form over the triangulation. `values` and the tangents are
/// given for every edge of the surface; values must satisfy the face
/// relations or NonMatchingPoint is thrown.
cd two_form_edges(const LieData& L, const MarkedSurface& S, const Triangulation& T, const std::vector<Mat>& values,
                  const Tangent& xi, const Tangent& eta, double tol = 1e-8);

/// Same form at a representation point, tangents given per generator.
cd two_form(const LieData& L, const Triangulation& T, const RepPoint& p, const Tangent& xi, const Tangent& eta);

/// Gram matrix Omega(t_i, t_j) of a list of generator tangents.
Mat two_form_gram(const LieData& L, const Triangulation& T, const RepPoint& p, const std::vector<Tangent>& ts);

/// Basis of the kernel of a stack of linear constraints (rows) on Nd-dimensional
/// coefficient vectors, by SVD with relative threshold tol.
Mat null_space(const Mat& constraints, double tol = 1e-10);

}  // namespace qpm
