#pragma once

// Arm-angle (SEW angle) definitions for a shoulder-elbow-wrist chain:
// the conventional angle, the ABB RobotStudio variant (a quarter-turn
// offset), and a sign-based variant that matches RobotStudio only on part
// of the workspace. All of them measure the elbow direction R_03*h4 around
// the shoulder-wrist line against a fixed reference direction e_r.

#include "yumik/errors.hpp"
#include "yumik/model.hpp"
#include "yumik/spatial.hpp"

namespace yumik {

enum class SewConvention { conventional, abb, sign_variant };

struct SewConfig {
  Vec3d e_r = Vec3d::UnitZ();
  SewConvention convention = SewConvention::abb;

  // Presets: the first joint axis coincides with world z for the default
  // (table) mounting, but is listed separately for custom parameter files.
  static SewConfig joint1_axis(const KinematicParams& params) {
    return {params.h[0], SewConvention::abb};
  }
  static SewConfig world_z() { return {Vec3d::UnitZ(), SewConvention::abb}; }
  static SewConfig world_y() { return {Vec3d::UnitY(), SewConvention::abb}; }
};

// Right-handed measurement triad: e_zC along the shoulder-wrist line,
// e_xC the in-plane part of e_r, e_yC their cross product.
struct SewFrame {
  Vec3d e_xC, e_yC, e_zC;
};

struct SewAngles {
  double psi_conv = 0.0;
  double psi_abb = 0.0;
  double psi_sign = 0.0;
  int sigma = 0;  // sign term of the sign-variant definition
  bool near_coordinate_singularity = false;  // ||e_SW x e_r|| < 1e-3
};

// ||e_SW x e_r||: 0 at the coordinate singularity, 1 when orthogonal.
double coordinate_margin(const Vec3d& p_SW, const Vec3d& e_r);

// Throws CoordinateSingularity when e_r is (numerically) parallel to p_SW.
SewFrame sew_frame(const Vec3d& p_SW, const Vec3d& e_r);

// Core forms taking the shoulder-wrist vector and the base-frame elbow
// axis d = R_03*h4 directly; the angle depends on q only through these.
double sew_conventional(const Vec3d& p_SW, const Vec3d& d, const Vec3d& e_r);
double sew_abb(const Vec3d& p_SW, const Vec3d& d, const Vec3d& e_r);
struct SignVariant {
  double psi;
  int sigma;
};
SignVariant sew_sign_variant(const Vec3d& p_SW, const Vec3d& d,
                             const Vec3d& e_r);

double sew_conventional(const FrameChain& chain, const Vec3d& e_r);
double sew_abb(const FrameChain& chain, const Vec3d& e_r);
SignVariant sew_sign_variant(const FrameChain& chain, const Vec3d& e_r);

// All three conventions at once.
SewAngles sew_angles(const FrameChain& chain, const Vec3d& e_r);

// Row vector J such that d(psi_abb) = J dq to first order (identical for the
// conventional angle). Throws SewJacobianUndefined when e_r or the elbow
// axis is collinear with the shoulder-wrist line.
Eigen::Matrix<double, 1, 7> sew_jacobian(const KinematicParams& params,
                                         const JointVector& q,
                                         const Vec3d& e_r);

}  // namespace yumik
