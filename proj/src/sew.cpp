#include "yumik/sew.hpp"

namespace yumik {

namespace {
constexpr double kHardCollinearTol = 1e-8;
constexpr double kWarnCollinearTol = 1e-3;

void require_margin(const Vec3d& p_SW, const Vec3d& e_r) {
  if (coordinate_margin(p_SW, e_r) < kHardCollinearTol)
    throw CoordinateSingularity(
        "reference direction parallel to the shoulder-wrist line");
}
}  // namespace

double coordinate_margin(const Vec3d& p_SW, const Vec3d& e_r) {
  return p_SW.normalized().cross(e_r).norm();
}

SewFrame sew_frame(const Vec3d& p_SW, const Vec3d& e_r) {
  require_margin(p_SW, e_r);
  SewFrame f;
  f.e_zC = p_SW.normalized();
  f.e_xC = (e_r - f.e_zC * f.e_zC.dot(e_r)).normalized();
  f.e_yC = f.e_zC.cross(f.e_xC);
  return f;
}

double sew_conventional(const Vec3d& p_SW, const Vec3d& d, const Vec3d& e_r) {
  require_margin(p_SW, e_r);
  const Vec3d a = p_SW.normalized();
  // ATAN2((e_SW x e_r)'d, -(e_SW^x^2 e_r)'d)
  const double num = a.cross(e_r).dot(d);
  const double den = -(skew(a) * skew(a) * e_r).dot(d);
  return std::atan2(num, den);
}

double sew_abb(const Vec3d& p_SW, const Vec3d& d, const Vec3d& e_r) {
  require_margin(p_SW, e_r);
  const Vec3d a = p_SW.normalized();
  // wrap_to_pi(psi_conv + pi/2) collapses to a single ATAN2
  const double num = -(skew(a) * skew(a) * d).dot(e_r);
  const double den = a.cross(d).dot(e_r);
  return std::atan2(num, den);
}

SignVariant sew_sign_variant(const Vec3d& p_SW, const Vec3d& d,
                             const Vec3d& e_r) {
  SewFrame f = sew_frame(p_SW, e_r);
  const Vec3d m = -f.e_yC;
  const double s = e_r.dot(d);
  SignVariant out;
  out.sigma = (s > 0.0) - (s < 0.0);
  out.psi = std::atan2(out.sigma * m.cross(d).norm(), m.dot(d));
  return out;
}

namespace {
// p_SW and d = R_03*h4 for the YuMi chain.
std::pair<Vec3d, Vec3d> chain_sw_d(const FrameChain& chain) {
  SewGeometry g = sew_geometry(chain);
  return {g.p_SW, g.h4_0};
}
}  // namespace

double sew_conventional(const FrameChain& chain, const Vec3d& e_r) {
  auto [p_SW, d] = chain_sw_d(chain);
  return sew_conventional(p_SW, d, e_r);
}

double sew_abb(const FrameChain& chain, const Vec3d& e_r) {
  auto [p_SW, d] = chain_sw_d(chain);
  return sew_abb(p_SW, d, e_r);
}

SignVariant sew_sign_variant(const FrameChain& chain, const Vec3d& e_r) {
  auto [p_SW, d] = chain_sw_d(chain);
  return sew_sign_variant(p_SW, d, e_r);
}

SewAngles sew_angles(const FrameChain& chain, const Vec3d& e_r) {
  auto [p_SW, d] = chain_sw_d(chain);
  SewAngles a;
  a.psi_conv = sew_conventional(p_SW, d, e_r);
  a.psi_abb = sew_abb(p_SW, d, e_r);
  SignVariant sv = sew_sign_variant(p_SW, d, e_r);
  a.psi_sign = sv.psi;
  a.sigma = sv.sigma;
  a.near_coordinate_singularity = coordinate_margin(p_SW, e_r) < kWarnCollinearTol;
  return a;
}

Eigen::Matrix<double, 1, 7> sew_jacobian(const KinematicParams& params,
                                         const JointVector& q,
                                         const Vec3d& e_r) {
  const FrameChain chain = forward_kinematics(params, q);
  const Vec3d p_SW = chain.O[7] - chain.O[1];
  const Vec3d d = chain.R0i[3] * params.h[3];
  const double nsw = p_SW.norm();
  const Vec3d a = p_SW / nsw;
  if (a.cross(e_r).norm() < kHardCollinearTol || a.cross(d).norm() < kHardCollinearTol)
    throw SewJacobianUndefined(
        "arm-angle gradient undefined: reference or elbow axis collinear "
        "with the shoulder-wrist line");

  // psi_abb = atan2(N, D) with N = e_r'd - (e_r'a)(a'd), D = e_r'(a x d);
  // chain rule with d' = h_i^0 x d (i <= 3) and p_SW' = h_i^0 x (O_W - O_i)
  // (i <= 6; O_W lies on axis 7, so joint 7 contributes nothing).
  const double N = e_r.dot(d) - e_r.dot(a) * a.dot(d);
  const double D = e_r.dot(a.cross(d));
  const double denom = N * N + D * D;
  if (denom < 1e-24) throw SewJacobianUndefined("arm-angle gradient undefined");

  Eigen::Matrix<double, 1, 7> J;
  for (int i = 0; i < 7; ++i) {
    const Vec3d hi = chain.R0i[i] * params.h[i];
    const Vec3d dd = i < 3 ? hi.cross(d).eval() : Vec3d::Zero().eval();
    const Vec3d dpsw =
        i < 6 ? hi.cross(chain.O[7] - chain.O[i + 1]).eval() : Vec3d::Zero().eval();
    const Vec3d da = (dpsw - a * a.dot(dpsw)) / nsw;
    const double dN = e_r.dot(dd) - e_r.dot(da) * a.dot(d) -
                      e_r.dot(a) * (da.dot(d) + a.dot(dd));
    const double dD = e_r.dot(da.cross(d) + a.cross(dd));
    J(i) = (D * dN - N * dD) / denom;
  }
  return J;
}

}  // namespace yumik
