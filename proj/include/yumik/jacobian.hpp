#pragma once

// Kinematic (6x7) and arm-angle-augmented (7x7) Jacobians with the
// rank-diagnostic helpers used by the singularity classifier.

#include "yumik/errors.hpp"
#include "yumik/model.hpp"
#include "yumik/sew.hpp"

namespace yumik {

// Rows 1-3 angular (rad/s in, rad/s out), rows 4-6 linear (mm/s out);
// task point is the tool origin.
using KinematicJacobian = Eigen::Matrix<double, 6, 7>;

// Kinematic Jacobian stacked over the arm-angle gradient row.
using AugmentedJacobian = Eigen::Matrix<double, 7, 7>;

// Characteristic length (mm) multiplying angular rows so singular values of
// the mixed-unit matrix compare consistently.
constexpr double kRowScaleMm = 500.0;

KinematicJacobian kinematic_jacobian(const KinematicParams& params,
                                     const JointVector& q);

AugmentedJacobian augmented_jacobian(const KinematicParams& params,
                                     const JointVector& q, const Vec3d& e_r);

// Angular rows scaled by kRowScaleMm (works for both Jacobian shapes).
template <class Derived>
auto row_normalized(const Eigen::MatrixBase<Derived>& J) {
  typename Derived::PlainObject out = J;
  out.template topRows<3>() *= kRowScaleMm;
  return out;
}

// sigma_min / sigma_max of an arbitrary matrix.
double smallest_singular_ratio(const Eigen::Ref<const Eigen::MatrixXd>& M);

// Unit vector spanning the null space of a rank-6 kinematic Jacobian, sign
// fixed so the largest-magnitude component is positive. Throws
// AmbiguousNullSpace when the null space is more than one-dimensional
// (row-normalized sigma_6/sigma_1 below rank_tol).
Eigen::Matrix<double, 7, 1> null_direction(const KinematicJacobian& J,
                                           double rank_tol = 1e-6);

}  // namespace yumik
