#include "yumik/jacobian.hpp"

#include <Eigen/SVD>

namespace yumik {

KinematicJacobian kinematic_jacobian(const KinematicParams& params,
                                     const JointVector& q) {
  const FrameChain chain = forward_kinematics(params, q);
  KinematicJacobian J;
  for (int i = 0; i < 7; ++i) {
    const Vec3d hi = chain.R0i[i] * params.h[i];
    J.col(i).head<3>() = hi;
    J.col(i).tail<3>() = hi.cross(chain.tool.p - chain.O[i + 1]);
  }
  return J;
}

AugmentedJacobian augmented_jacobian(const KinematicParams& params,
                                     const JointVector& q, const Vec3d& e_r) {
  AugmentedJacobian A;
  A.topRows<6>() = kinematic_jacobian(params, q);
  A.row(6) = sew_jacobian(params, q, e_r);
  return A;
}

double smallest_singular_ratio(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

Eigen::Matrix<double, 7, 1> null_direction(const KinematicJacobian& J,
                                           double rank_tol) {
  const Eigen::Matrix<double, 6, 7> Jn = row_normalized(J);
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 7>> svd(Jn, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0 || s(5) / s(0) < rank_tol)
    throw AmbiguousNullSpace(
        "kinematic Jacobian rank below 6: self-motion direction not unique");
  Eigen::Matrix<double, 7, 1> v = svd.matrixV().col(6);
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
  return v;
}

}  // namespace yumik
