#include "qpm/fission.hpp"

namespace qpm {

FissionPoint random_fission_point(int n, Rng& rng) {
  Mat t = random_torus(n, rng);
  return FissionPoint{random_sl(n, rng), t * random_bplus(n, rng, false), t.inverse() * random_bminus(n, rng, false)};
}

FissionTangent random_fission_tangent(int n, Rng& rng) {
  Mat X = random_traceless(n, rng, 1.0), Y = random_traceless(n, rng, 1.0), C = random_traceless(n, rng, 1.0);
  Mat dx = X.triangularView<Eigen::Upper>();
  Mat dy = strict_lower(Y) - pr_T(dx);
  return FissionTangent{C, dx, dy};
}

bool is_fission_point(const FissionPoint& p, double tol) {
  return std::abs(p.c.determinant() - 1.0) < tol && member(p.x, p.y, Subgroup::GStar, tol);
}

FissionMoment fission_moment(const FissionPoint& p) {
  Mat ci = p.c.inverse();
  return FissionMoment{ci * p.y.inverse() * p.x * p.c, pr_T(p.x).inverse()};
}

FissionPoint fission_act(const Mat& g, const Mat& s, const FissionPoint& p) {
  Mat si = s.inverse();
  return FissionPoint{s * p.c * g.inverse(), s * p.x * si, s * p.y * si};
}

FissionTangent fission_act_tangent(const Mat&, const Mat& s, const FissionTangent& v) {
  Mat si = s.inverse();
  return FissionTangent{s * v.dc * si, s * v.dx * si, s * v.dy * si};
}

FissionTangent fission_generator(const FissionPoint& p, const Mat& X, const Mat& Y) {
  // d/dt (exp(-tY) c exp(tX), exp(-tY) x exp(tY), ...) right-trivialized
  Mat dc = -Y + p.c * X * p.c.inverse();
  Mat dx = -Y + p.x * Y * p.x.inverse();
  Mat dy = -Y + p.y * Y * p.y.inverse();
  return FissionTangent{dc, dx, dy};
}

namespace {

struct Pullbacks {
  Mat r_yc, r_xc, l_yc, l_xc, l_c;
};

Pullbacks pullbacks(const FissionPoint& p, const FissionTangent& v) {
  Mat yc = p.y * p.c, xc = p.x * p.c;
  Mat r_yc = v.dy + p.y * v.dc * p.y.inverse();
  Mat r_xc = v.dx + p.x * v.dc * p.x.inverse();
  return Pullbacks{r_yc, r_xc, yc.inverse() * r_yc * yc, xc.inverse() * r_xc * xc, p.c.inverse() * v.dc * p.c};
}

}  // namespace

cd fission_form(const LieData& L, const FissionPoint& p, const FissionTangent& u, const FissionTangent& v) {
  Pullbacks a = pullbacks(p, u), b = pullbacks(p, v);
  auto w = [&](const Mat& a1, const Mat& b1, const Mat& a2, const Mat& b2) {
    return L.pair(a1, b2) - L.pair(b1, a2);
  };
  return 0.5 * (w(a.r_yc, b.r_yc, a.r_xc, b.r_xc) + w(a.l_yc, b.l_yc, a.l_c, b.l_c) - w(a.l_xc, b.l_xc, a.l_c, b.l_c));
}

std::pair<Mat, Mat> fission_moment_derivative(const FissionPoint& p, const FissionTangent& v) {
  // mu_G = c^-1 y^-1 x c ; right-trivialized derivative
  Mat ci = p.c.inverse(), yi = p.y.inverse();
  Mat mu = ci * yi * p.x * p.c;
  Mat dmu = -ci * v.dc * p.c * mu + ci * (-yi * v.dy) * p.x * p.c + ci * yi * v.dx * p.x * p.c + ci * yi * p.x * v.dc * p.c;
  Mat dt = -pr_T(v.dx);
  return {dmu * mu.inverse(), dt};
}

}  // namespace qpm
