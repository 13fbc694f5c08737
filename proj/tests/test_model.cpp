#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "yumik/model.hpp"

#include "oracles.hpp"

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>

using namespace yumik;
using namespace yumik::testing;

namespace {

// Base-frame line of the joint driven by q(i) (0-based): through O[i+1]
// along R0i[i] * h[i].
struct JointAxis {
  Vec3d point, dir;
};

JointAxis joint_axis(const KinematicParams& params, const FrameChain& chain,
                     int i) {
  return {chain.O[i + 1], chain.R0i[i] * params.h[i]};
}

// Closest point on line a to line b (lines assumed non-parallel).
Vec3d closest_point_on_line(const JointAxis& a, const JointAxis& b) {
  const Vec3d w = b.point - a.point;
  const double dd = a.dir.dot(b.dir);
  const double denom = 1.0 - dd * dd;
  const double t = (a.dir.dot(w) - dd * b.dir.dot(w)) / denom;
  return a.point + t * a.dir;
}

double line_line_distance(const JointAxis& a, const JointAxis& b) {
  const Vec3d n = a.dir.cross(b.dir);
  const Vec3d w = b.point - a.point;
  if (n.norm() < 1e-12) return (w - a.dir * a.dir.dot(w)).norm();
  return std::abs(w.dot(n)) / n.norm();
}

}  // namespace

TEST_CASE("factory constants reproduce the zero-configuration frames") {
  const KinematicParams params = yumi_params();
  const FrameChain chain = forward_kinematics(params, JointVector::Zero());

  CHECK((chain.tool.p - Vec3d(341.5, 0, 598)).norm() < 1e-9);
  CHECK((chain.tool.R - rot(Vec3d::UnitY(), kPi / 2)).norm() < 1e-12);
  CHECK((chain.O[7] - Vec3d(305.5, 0, 598)).norm() < 1e-9);
  CHECK((chain.R0i[7] - Mat3d::Identity()).norm() < 1e-12);

  const SewGeometry g = sew_geometry(chain);
  CHECK((g.O_S - Vec3d(0, 0, 306)).norm() < 1e-9);
  CHECK((g.O_W - Vec3d(305.5, 0, 598)).norm() < 1e-9);
  CHECK((g.p_SW - Vec3d(305.5, 0, 292)).norm() < 1e-9);
  CHECK((g.h4_0 - Vec3d::UnitY()).norm() < 1e-12);
  CHECK(g.e_SW.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forward kinematics preserves link lengths and frame orthonormality") {
  const KinematicParams params = yumi_params();
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    JointVector q;
    for (int i = 0; i < 7; ++i) q(i) = random_angle(rng);
    const FrameChain chain = forward_kinematics(params, q);
    for (int i = 0; i < 7; ++i) {
      CHECK((chain.O[i + 1] - chain.O[i]).norm() ==
            doctest::Approx(params.p_link[i].norm()).epsilon(1e-12));
      CHECK((chain.R0i[i + 1] * chain.R0i[i + 1].transpose() -
             Mat3d::Identity())
                .norm() < 1e-12);
    }
    // Turning joint 1 rotates the whole arm rigidly about the base z axis.
    const double delta = random_angle(rng);
    JointVector q2 = q;
    q2(0) += delta;
    const FrameChain turned = forward_kinematics(params, q2);
    const Mat3d Rz = rot(params.h[0], delta);
    for (int i = 0; i <= 7; ++i)
      CHECK((turned.O[i] - Rz * chain.O[i]).norm() < 1e-9);
    CHECK((turned.tool.p - Rz * chain.tool.p).norm() < 1e-9);
    CHECK((turned.tool.R - Rz * chain.tool.R).norm() < 1e-12);
  }
}

TEST_CASE("wrist_pose strips the fixed tool transform") {
  const KinematicParams params = yumi_params();
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    JointVector q;
    for (int i = 0; i < 7; ++i) q(i) = random_angle(rng);
    const FrameChain chain = forward_kinematics(params, q);
    const Pose w = wrist_pose(params, chain.tool);
    CHECK((w.R - chain.R0i[7]).norm() < 1e-12);
    CHECK((w.p - chain.O[7]).norm() < 1e-9);
  }
}

TEST_CASE("the fixture configurations share one tool pose") {
  const KinematicParams params = yumi_params();
  const auto rows = load_csv(data_path("table2_ik.csv"));
  REQUIRE(rows.size() == 10);
  const FrameChain ref = forward_kinematics(params, joints_from_deg_row(rows[0]));
  for (const auto& row : rows) {
    const FrameChain c = forward_kinematics(params, joints_from_deg_row(row));
    CHECK((c.tool.p - ref.tool.p).norm() < 0.3);  // mm; table is 2-decimal deg
    const Eigen::AngleAxisd aa(c.tool.R * ref.tool.R.transpose());
    CHECK(std::abs(aa.angle()) < 1e-3);
  }
}

TEST_CASE("robotstudio joint order swaps axis 3 to the last slot") {
  JointVector q;
  q << 1, 2, 3, 4, 5, 6, 7;
  const JointVector rs = to_robotstudio_order(q);
  JointVector expected;
  expected << 1, 2, 4, 5, 6, 7, 3;
  CHECK((rs - expected).norm() == 0.0);
  CHECK((from_robotstudio_order(rs) - q).norm() == 0.0);

  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    JointVector r;
    for (int i = 0; i < 7; ++i) r(i) = random_angle(rng);
    CHECK((from_robotstudio_order(to_robotstudio_order(r)) - r).norm() == 0.0);
    CHECK((to_robotstudio_order(from_robotstudio_order(r)) - r).norm() == 0.0);
  }
}

TEST_CASE("within_limits reports per-joint violations with inclusive bounds") {
  const JointLimits lim = yumi_joint_limits();

  CHECK(within_limits(JointVector::Zero(), lim).ok);
  CHECK(within_limits(lim.q_min, lim).ok);
  CHECK(within_limits(lim.q_max, lim).ok);

  // Fixture row 5 swings joint 2 far past its -143.5 deg stop.
  const auto rows = load_csv(data_path("table2_ik.csv"));
  const LimitCheck row5 = within_limits(joints_from_deg_row(rows[4]), lim);
  CHECK_FALSE(row5.ok);
  CHECK(row5.violation[1]);
  CHECK_FALSE(row5.violation[0]);

  // The in_limits fixture column agrees with the checker on all rows.
  for (const auto& row : rows)
    CHECK(within_limits(joints_from_deg_row(row), lim).ok == (row[7] != 0.0));

  JointVector q = JointVector::Zero();
  q(6) = lim.q_max(6) + 1e-6;
  const LimitCheck over = within_limits(q, lim);
  CHECK_FALSE(over.ok);
  CHECK(over.violation[6]);
}

TEST_CASE("enumerate_2pi_shifts lists exactly the in-limit full turns") {
  const JointLimits lim = yumi_joint_limits();

  // Small q5/q7: a full turn in either direction leaves the range.
  JointVector q = JointVector::Zero();
  q(4) = deg2rad(10.0);
  auto shifts = enumerate_2pi_shifts(q, lim);
  REQUIRE(shifts.size() == 1);
  CHECK((shifts[0] - q).norm() == 0.0);

  // q5 = 175.8 deg admits 175.8 - 360 = -184.2 (within +-290); q7 = -160.2
  // admits +360 = 199.8 (within +-229): four combinations.
  q = JointVector::Zero();
  q(4) = deg2rad(175.8);
  q(6) = deg2rad(-160.2);
  shifts = enumerate_2pi_shifts(q, lim);
  CHECK(shifts.size() == 4);

  // Brute-force agreement on random joint vectors, and only joints 5 and 7
  // ever move.
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    JointVector r;
    for (int i = 0; i < 7; ++i)
      r(i) = random_angle(rng) * (i == 4 || i == 6 ? 2.0 : 1.0);
    const auto got = enumerate_2pi_shifts(r, lim);
    size_t expected = 0;
    for (int n5 = -2; n5 <= 2; ++n5) {
      for (int n7 = -2; n7 <= 2; ++n7) {
        JointVector s = r;
        s(4) += 2 * kPi * n5;
        s(6) += 2 * kPi * n7;
        if (within_limits(s, lim).ok) ++expected;
      }
    }
    CHECK(got.size() == expected);
    for (const JointVector& s : got) {
      CHECK(within_limits(s, lim).ok);
      for (int i = 0; i < 7; ++i) {
        if (i == 4 || i == 6)
          CHECK(std::abs(std::remainder(s(i) - r(i), 2 * kPi)) < 1e-12);
        else
          CHECK(s(i) == r(i));
      }
    }
  }

  // An out-of-limits joint 2 cannot be repaired by turning joints 5/7.
  q = JointVector::Zero();
  q(1) = deg2rad(-175.83);
  CHECK(enumerate_2pi_shifts(q, lim).empty());
}

TEST_CASE("axes 5 and 7 intersect when q6 is nonzero") {
  const KinematicParams params = yumi_params();
  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    JointVector q;
    for (int i = 0; i < 7; ++i) q(i) = random_angle(rng);
    if (std::abs(q(5)) < 0.05) q(5) = 0.3;
    const FrameChain chain = forward_kinematics(params, q);
    const JointAxis a5 = joint_axis(params, chain, 4);
    const JointAxis a7 = joint_axis(params, chain, 6);
    CHECK(line_line_distance(a5, a7) < 1e-9);

    // The intersection point does not move with q5 or q7.
    const Vec3d meet = closest_point_on_line(a5, a7);
    JointVector q2 = q;
    q2(4) = random_angle(rng);
    q2(6) = random_angle(rng);
    const FrameChain chain2 = forward_kinematics(params, q2);
    const Vec3d meet2 = closest_point_on_line(joint_axis(params, chain2, 4),
                                              joint_axis(params, chain2, 6));
    CHECK((meet2 - meet).norm() < 1e-9);
  }

  // q6 = 0 folds the two axes onto one line.
  JointVector q = JointVector::Zero();
  q(0) = 0.4;
  q(3) = 1.1;
  const FrameChain chain = forward_kinematics(params, q);
  const JointAxis a5 = joint_axis(params, chain, 4);
  const JointAxis a7 = joint_axis(params, chain, 6);
  CHECK(a5.dir.cross(a7.dir).norm() < 1e-12);
  CHECK(line_line_distance(a5, a7) < 1e-9);
}

TEST_CASE("sew_geometry returns the mutual closest axis points") {
  const KinematicParams params = yumi_params();
  Rng rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    JointVector q;
    for (int i = 0; i < 7; ++i) q(i) = random_angle(rng);
    const FrameChain chain = forward_kinematics(params, q);
    const SewGeometry g = sew_geometry(chain);

    // Shoulder: point on axis 1 closest to axis 2 (fixed by construction).
    const Vec3d S = closest_point_on_line(joint_axis(params, chain, 0),
                                          joint_axis(params, chain, 1));
    CHECK((g.O_S - S).norm() < 1e-9);

    // Wrist: point on axis 7 closest to axis 6.
    const Vec3d W = closest_point_on_line(joint_axis(params, chain, 6),
                                          joint_axis(params, chain, 5));
    CHECK((g.O_W - W).norm() < 1e-9);

    CHECK((g.p_SW - (g.O_W - g.O_S)).norm() < 1e-12);
    CHECK((g.e_SW - g.p_SW.normalized()).norm() < 1e-12);
    CHECK((g.h4_0 - chain.R0i[3] * Vec3d::UnitY()).norm() < 1e-12);
  }

  // Coincident shoulder and wrist centers are rejected.
  FrameChain degenerate{};
  for (auto& R : degenerate.R0i) R = Mat3d::Identity();
  for (auto& O : degenerate.O) O = Vec3d::Zero();
  degenerate.tool = {Mat3d::Identity(), Vec3d::Zero()};
  CHECK_THROWS_AS(sew_geometry(degenerate), std::domain_error);
}

TEST_CASE("parameter files round-trip and match the factory constants") {
  const RobotModel model = yumi_model();
  const std::string tmp = "/tmp/yumik_model_roundtrip.json";
  save_model_json(model, tmp);
  const RobotModel back = load_model_json(tmp);
  for (int i = 0; i < 7; ++i) {
    CHECK((back.params.p_link[i] - model.params.p_link[i]).norm() < 1e-9);
    CHECK((back.params.h[i] - model.params.h[i]).norm() < 1e-12);
  }
  CHECK((back.params.p_7T - model.params.p_7T).norm() < 1e-9);
  CHECK((back.params.R_7T - model.params.R_7T).norm() < 1e-12);
  CHECK((back.limits.q_min - model.limits.q_min).norm() < 1e-12);
  CHECK((back.limits.q_max - model.limits.q_max).norm() < 1e-12);
  std::remove(tmp.c_str());

  // The shipped parameter file is the factory model.
  const RobotModel shipped = load_model_json(data_path("yumi_params.json"));
  for (int i = 0; i < 7; ++i) {
    CHECK((shipped.params.p_link[i] - model.params.p_link[i]).norm() == 0.0);
    CHECK((shipped.params.h[i] - model.params.h[i]).norm() == 0.0);
  }
  CHECK((shipped.limits.q_min - model.limits.q_min).norm() < 1e-12);

  // Malformed inputs are rejected with a diagnostic.
  const std::string bad = "/tmp/yumik_model_bad.json";
  std::ofstream(bad) << "{\"p_link\": [[1,2,3]]}";
  CHECK_THROWS(load_model_json(bad));
  std::remove(bad.c_str());
  CHECK_THROWS_AS(load_model_json("/nonexistent/params.json"),
                  std::runtime_error);
}
