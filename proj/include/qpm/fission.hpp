#pragma once

#include "qpm/lie_core.hpp"

namespace qpm {

/// A point (c, x, y) of G x G*, with (x, y) in B+ x B- and inverse torus parts.
struct FissionPoint {
  Mat c;
  Mat x;
  Mat y;
};

/// Right-trivialized tangent (dc c^-1, dx x^-1, dy y^-1).
struct FissionTangent {
  Mat dc;
  Mat dx;
  Mat dy;
};

struct FissionMoment {
  Mat g;  ///< c^-1 y^-1 x c
  Mat t;  ///< pr_T(x)^-1
};

FissionPoint random_fission_point(int n, Rng& rng);
/// Random tangent of G x G* at any point: dx upper triangular, dy strictly
/// lower plus the opposite diagonal.
FissionTangent random_fission_tangent(int n, Rng& rng);
bool is_fission_point(const FissionPoint& p, double tol = 1e-9);

FissionMoment fission_moment(const FissionPoint& p);
/// (g, s) . (c, x, y) = (s c g^-1, s x s^-1, s y s^-1).
FissionPoint fission_act(const Mat& g, const Mat& s, const FissionPoint& p);
/// Push-forward of a tangent under the action of (g, s).
FissionTangent fission_act_tangent(const Mat& g, const Mat& s, const FissionTangent& v);
/// Fundamental vector field of (X, Y) in g x t: derivative of the action of
/// (exp(-tX), exp(-tY)).
FissionTangent fission_generator(const FissionPoint& p, const Mat& X, const Mat& Y);

/// 1/2 [<(yc)^* theta^r, (xc)^* theta^r> + <(yc)^* theta^l, c^* theta^l> - <(xc)^* theta^l, c^* theta^l>].
cd fission_form(const LieData& L, const FissionPoint& p, const FissionTangent& u, const FissionTangent& v);

/// d mu mu^-1 of both moment components along v.
std::pair<Mat, Mat> fission_moment_derivative(const FissionPoint& p, const FissionTangent& v);

}  // namespace qpm
