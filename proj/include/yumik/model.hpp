#pragma once

// Kinematic description of the ABB YuMi (IRB 14050) arm: product-of-
// exponentials parameters, forward kinematics, joint limits, joint orderings,
// and the shoulder/wrist geometry the arm-angle definitions are built on.

#include "yumik/spatial.hpp"

#include <array>
#include <string>
#include <vector>

namespace yumik {

using JointVector = Eigen::Matrix<double, 7, 1>;  // radians, q3 third

template <class S>
constexpr S deg2rad(S d) {
  return d * S(kPi) / S(180);
}
template <class S>
constexpr S rad2deg(S r) {
  return r * S(180) / S(kPi);
}

struct KinematicParams {
  std::array<Vec3d, 7> p_link;  // p_link[i] = offset frame i -> i+1, in frame i, mm
  Vec3d p_7T;                   // frame 7 -> tool offset, mm
  std::array<Vec3d, 7> h;       // joint axes, local frames, unit
  Mat3d R_7T;                   // fixed frame 7 -> tool rotation
};

struct JointLimits {
  JointVector q_min, q_max;  // radians
};

struct Pose {
  Mat3d R;
  Vec3d p;  // mm
};

struct FrameChain {
  std::array<Mat3d, 8> R0i;  // R0i[i] = base->frame-i rotation; R0i[0] = I
  std::array<Vec3d, 8> O;    // O[i] = frame-i origin in base frame, mm; O[0] = 0
  Pose tool;
};

// Shoulder center, wrist center, the line between them, and the elbow axis
// direction in the base frame.
struct SewGeometry {
  Vec3d O_S, O_W;  // mm
  Vec3d p_SW;      // O_W - O_S, mm
  Vec3d e_SW;      // unit
  Vec3d h4_0;      // R_03 * h4, unit
};

struct RobotModel {
  KinematicParams params;
  JointLimits limits;
};

// Factory-default YuMi constants (millimeters, radians).
KinematicParams yumi_params();
JointLimits yumi_joint_limits();
RobotModel yumi_model();

FrameChain forward_kinematics(const KinematicParams& params,
                              const JointVector& q);

// Strip the fixed tool transform: R_07 = R_0T R_7T', p_07 = p_0T - R_07 p_7T.
Pose wrist_pose(const KinematicParams& params, const Pose& tool);

// h4 is the elbow axis in its local frame (joint 4). Throws std::domain_error
// if the shoulder and wrist coincide (degenerate for this geometry).
SewGeometry sew_geometry(const FrameChain& chain,
                         const Vec3d& h4 = Vec3d::UnitY());

// RobotStudio lists axis 3 last: [q1 q2 q4 q5 q6 q7 q3].
JointVector to_robotstudio_order(const JointVector& q);
JointVector from_robotstudio_order(const JointVector& q_rs);

struct LimitCheck {
  bool ok = true;
  std::array<bool, 7> violation{};  // true where q[i] outside [min, max]
};
LimitCheck within_limits(const JointVector& q, const JointLimits& limits);

// All joint vectors reachable from q by adding multiples of 2*pi to q5 and q7
// (independently) while staying within limits; includes q itself when q is
// within limits. Joints 1-4 and 6 have ranges below a full turn.
std::vector<JointVector> enumerate_2pi_shifts(const JointVector& q,
                                              const JointLimits& limits);

// Parameter files: JSON with keys p_link (7x3, mm), p_7T, h (7x3),
// R_7T (3x3 row-major), q_min_deg, q_max_deg.
RobotModel load_model_json(const std::string& path);
void save_model_json(const RobotModel& model, const std::string& path);

}  // namespace yumik
