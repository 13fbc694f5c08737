#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "yumik/jacobian.hpp"

#include "oracles.hpp"

using namespace yumik;
using namespace yumik::testing;

namespace {

// Joint vectors where the arm-angle row is well defined: away from the
// collinear-axis pairs, from e_SW || e_r, and from an elbow direction along
// the shoulder-wrist line.
JointVector sew_defined_joints(Rng& rng, const RobotModel& model,
                               const Vec3d& e_r, double gap = 0.1) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    const JointVector q = random_joints_in_limits(rng, model.limits);
    if (std::abs(q(1)) < gap || std::abs(q(5)) < gap) continue;
    const SewGeometry g = sew_geometry(forward_kinematics(model.params, q));
    if (std::acos(std::min(1.0, std::abs(g.e_SW.dot(e_r)))) < gap) continue;
    if (g.e_SW.cross(g.h4_0).norm() < gap) continue;
    return q;
  }
  return JointVector::Zero();
}

}  // namespace

TEST_CASE("kinematic Jacobian matches central differences of the pose") {
  const RobotModel model = yumi_model();
  Rng rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    const JointVector q = random_joints_in_limits(rng, model.limits);
    const KinematicJacobian J = kinematic_jacobian(model.params, q);
    const auto Jfd = fd_kinematic_jacobian(model.params, q);
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    CHECK((J - Jfd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
  }
}

TEST_CASE("Jacobian columns carry the joint axes") {
  const RobotModel model = yumi_model();
  Rng rng(402);
  for (int trial = 0; trial < 50; ++trial) {
    const JointVector q = random_joints_in_limits(rng, model.limits);
    const FrameChain chain = forward_kinematics(model.params, q);
    const KinematicJacobian J = kinematic_jacobian(model.params, q);
    for (int i = 0; i < 7; ++i) {
      const Vec3d hi = chain.R0i[i] * model.params.h[i];
      CHECK((J.col(i).head<3>() - hi).norm() < 1e-14);
      const Vec3d lin = hi.cross(chain.tool.p - chain.O[i + 1]);
      CHECK((J.col(i).tail<3>() - lin).norm() < 1e-9);
    }
  }

  // Numeric anchors at the zero configuration.
  const KinematicJacobian J0 =
      kinematic_jacobian(model.params, JointVector::Zero());
  Eigen::Matrix<double, 6, 1> col0, col6;
  col0 << 0, 0, 1, 0, 341.5, 0;  // e_z axis through (0,0,306)
  col6 << 1, 0, 0, 0, 0, 0;      // e_x axis through the tool origin's line
  CHECK((J0.col(0) - col0).norm() < 1e-12);
  CHECK((J0.col(6) - col6).norm() < 1e-12);
}

TEST_CASE("augmented Jacobian stacks the arm-angle gradient row") {
  const RobotModel model = yumi_model();
  Rng rng(403);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3d e_r = (trial % 2 == 0) ? Vec3d::UnitZ() : random_unit_vector(rng);
    const JointVector q = sew_defined_joints(rng, model, e_r);
    const AugmentedJacobian A = augmented_jacobian(model.params, q, e_r);
    const KinematicJacobian J = kinematic_jacobian(model.params, q);
    CHECK(A.topRows<6>() == J);
    const auto row = sew_jacobian(model.params, q, e_r);
    CHECK(A.row(6) == row);
    const auto row_fd = fd_sew_jacobian(model.params, q, e_r);
    const double scale = std::max(1.0, row.cwiseAbs().maxCoeff());
    CHECK((row - row_fd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
  }
}

TEST_CASE("null_direction spans the self-motion of a rank-6 Jacobian") {
  const RobotModel model = yumi_model();
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const JointVector q = sew_defined_joints(rng, model, Vec3d::UnitZ());
    const KinematicJacobian J = kinematic_jacobian(model.params, q);
    const auto v = null_direction(J);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto Jn = row_normalized(J);
    CHECK((Jn * v).norm() <= 1e-8 * Jn.cwiseAbs().maxCoeff());
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    CHECK(v(imax) > 0.0);
  }
}

TEST_CASE("collinear axis pairs give the expected self-motion directions") {
  const RobotModel model = yumi_model();
  Rng rng(405);

  Eigen::Matrix<double, 7, 1> v13;
  v13 << 1, 0, -1, 0, 0, 0, 0;
  v13 /= std::sqrt(2.0);
  Eigen::Matrix<double, 7, 1> v57;
  v57 << 0, 0, 0, 0, 1, 0, -1;
  v57 /= std::sqrt(2.0);

  for (int trial = 0; trial < 20; ++trial) {
    JointVector q = random_joints_in_limits(rng, model.limits);

    // q2 = 0: axes 1 and 3 are the same line, so rotating joint 1 by delta
    // and joint 3 by -delta leaves the whole distal chain untouched.
    q(1) = 0.0;
    if (std::abs(q(5)) < 0.1) q(5) = 0.5;
    const KinematicJacobian J13 = kinematic_jacobian(model.params, q);
    const auto n13 = null_direction(J13);
    // the two nonzero components tie in magnitude, so the sign convention
    // may resolve to either antipode
    CHECK(std::min((n13 - v13).norm(), (n13 + v13).norm()) < 1e-6);
    const double delta = 0.3;
    JointVector qs = q;
    qs(0) += delta;
    qs(2) -= delta;
    const FrameChain a = forward_kinematics(model.params, q);
    const FrameChain b = forward_kinematics(model.params, qs);
    CHECK((a.tool.p - b.tool.p).norm() < 1e-9);
    CHECK((a.tool.R - b.tool.R).norm() < 1e-12);

    // q6 = 0: same story for axes 5 and 7.
    q = random_joints_in_limits(rng, model.limits);
    q(5) = 0.0;
    if (std::abs(q(1)) < 0.1) q(1) = 0.5;
    const KinematicJacobian J57 = kinematic_jacobian(model.params, q);
    const auto n57 = null_direction(J57);
    CHECK(std::min((n57 - v57).norm(), (n57 + v57).norm()) < 1e-6);
    qs = q;
    qs(4) += delta;
    qs(6) -= delta;
    const FrameChain c = forward_kinematics(model.params, q);
    const FrameChain d = forward_kinematics(model.params, qs);
    CHECK((c.tool.p - d.tool.p).norm() < 1e-9);
    CHECK((c.tool.R - d.tool.R).norm() < 1e-12);
  }

  // Both pairs collinear at once: the null space is two-dimensional.
  CHECK_THROWS_AS(
      null_direction(kinematic_jacobian(model.params, JointVector::Zero())),
      AmbiguousNullSpace);
}

TEST_CASE("smallest_singular_ratio and row scaling behave as documented") {
  Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
  CHECK(smallest_singular_ratio(I3) == doctest::Approx(1.0));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 1.0;
  CHECK(smallest_singular_ratio(D) == doctest::Approx(0.5));

  Eigen::MatrixXd rank1 = Eigen::Vector3d(1, 2, 3) * Eigen::RowVector3d(4, 5, 6);
  CHECK(smallest_singular_ratio(rank1) < 1e-14);

  CHECK(smallest_singular_ratio(Eigen::MatrixXd::Zero(2, 2)) == 0.0);

  KinematicJacobian ones = KinematicJacobian::Ones();
  const KinematicJacobian scaled = row_normalized(ones);
  CHECK(scaled.topRows<3>() == (kRowScaleMm * ones.topRows<3>()).eval());
  CHECK(scaled.bottomRows<3>() == ones.bottomRows<3>());

  AugmentedJacobian aug = AugmentedJacobian::Ones();
  const AugmentedJacobian ascaled = row_normalized(aug);
  CHECK(ascaled.topRows<3>() == (kRowScaleMm * aug.topRows<3>()).eval());
  CHECK(ascaled.bottomRows<4>() == aug.bottomRows<4>());
}

TEST_CASE("row scaling changes conditioning but not the null space") {
  const RobotModel model = yumi_model();
  Rng rng(406);
  for (int trial = 0; trial < 20; ++trial) {
    const JointVector q = sew_defined_joints(rng, model, Vec3d::UnitZ());
    const KinematicJacobian J = kinematic_jacobian(model.params, q);
    const auto v = null_direction(J);
    // The raw (mixed-unit) Jacobian annihilates the same direction.
    CHECK((J * v).norm() <= 1e-8 * J.cwiseAbs().maxCoeff());
  }
}
