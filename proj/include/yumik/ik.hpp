#pragma once

// Inverse kinematics for (tool pose, arm angle): closed-form branch
// evaluation via rotation subproblems, a 2D grid search over (q1, q2) with
// local-minimum seeding and damped least-squares polish, and an independent
// nested 1D method (outer search on q1, inner search on q6).

#include "yumik/errors.hpp"
#include "yumik/model.hpp"
#include "yumik/sew.hpp"

#include <vector>

namespace yumik {

struct IkRequest {
  Pose tool_pose;
  double psi = 0.0;  // radians
  SewConvention psi_convention = SewConvention::abb;
  Vec3d e_r = Vec3d::UnitZ();
};

// Pose-side quantities shared by every branch of one request.
struct IkGeometry {
  Mat3d R07;
  Vec3d p07;      // mm
  Vec3d p_SW;     // wrist center minus shoulder center, mm
  Vec3d e_SW;     // unit
  Vec3d n_SEW;    // normal of the half-plane containing the elbow axis
  Vec3d e_CE;     // in-plane direction; solutions satisfy e_CE . R03 h4 > 0
  double psi_conv = 0.0;
};

struct IkSolution {
  JointVector q;                   // radians, wrapped to (-pi, pi]
  double pose_rot_residual = 0.0;  // rad
  double pose_pos_residual = 0.0;  // mm
  double psi_residual = 0.0;       // rad
  bool within_limits = false;
  int branch_id = -1;
  Eigen::Vector2d search_origin = Eigen::Vector2d::Zero();  // (q1,q2) or (q1,q6)
  // In-limits variants reachable by full turns of joints 5/7 (includes q
  // itself when in limits).
  std::vector<JointVector> windings;
};

struct IkSolutionSet {
  std::vector<IkSolution> solutions;  // lexicographically sorted by q
};

struct SearchSettings {
  double grid_step = deg2rad(0.5);
  // Grid minima above this error are noise, below it they seed a polish.
  double minimum_threshold = 0.35;
  double polish_tolerance = 1e-10;
  int max_polish_iters = 100;
  double dedup_tolerance = 1e-6;  // rad, componentwise mod 2*pi
  Eigen::Vector2d domain_min = {-kPi, -kPi};  // (q1,q2), half-open [min,max)
  Eigen::Vector2d domain_max = {kPi, kPi};
};

// Converts the request to conventional-angle geometry. Throws
// CoordinateSingularity when e_r is parallel to the shoulder-wrist line.
IkGeometry ik_geometry(const IkRequest& request, const KinematicParams& params);

struct Q3Candidates {
  double q3[2] = {0.0, 0.0};
  int count = 0;
  bool degenerate = false;
};
// Roots of n_SEW . R03 h4 = 0 that put the elbow axis in the correct
// half-plane (e_CE . R03 h4 > 0).
Q3Candidates solve_q3(double q1, double q2, const IkGeometry& geom,
                      const KinematicParams& params);

struct WristTriple {
  double q5, q6, q7;
};
// All wrist angle triples placing frame 7 consistently with the pose given
// the proximal chain (subproblem 5); up to four.
std::vector<WristTriple> solve_wrist(double q1, double q2, double q3,
                                     const IkGeometry& geom,
                                     const KinematicParams& params);

// || R03' R07 R47' h4 - h4 ||: zero exactly when a consistent q4 exists.
double branch_error(double q1, double q2, double q3, double q5, double q6,
                    double q7, const IkGeometry& geom,
                    const KinematicParams& params);

// Least-squares q4 aligning the residual rotation about h4 (exact when
// branch_error is zero).
double solve_q4(double q1, double q2, double q3, double q5, double q6,
                double q7, const IkGeometry& geom,
                const KinematicParams& params);

// Full-torus search over (q1,q2). Throws EmptySolutionSet when nothing
// verifies.
IkSolutionSet ik_2d_search(const IkRequest& request, const RobotModel& model,
                           const SearchSettings& settings = {});

// All configurations with the given q1 reaching the pose (no arm-angle
// constraint), found by a 1D search over q6; pose-verified.
std::vector<JointVector> ik_fixed_q1(const Pose& tool_pose, double q1,
                                     const KinematicParams& params,
                                     const SearchSettings& settings = {});

// Outer 1D search on q1; solutions are arm-angle crossings along continuous
// fixed-q1 branches. Same verification and output pipeline as ik_2d_search.
IkSolutionSet ik_nested_1d(const IkRequest& request, const RobotModel& model,
                           const SearchSettings& settings = {});

// Per-node minimum branch error over the (q1,q2) grid, for plotting and
// diagnostics.
struct LandscapeSample {
  double q1, q2;
  double min_error;  // +inf encoded as a large sentinel when no branch exists
  int branch_count;
};
std::vector<LandscapeSample> ik_error_landscape(
    const IkRequest& request, const KinematicParams& params,
    const SearchSettings& settings = {});

// Pose/arm-angle residuals every emitted solution must satisfy.
constexpr double kVerifyPosMm = 1e-6;
constexpr double kVerifyRotRad = 1e-8;
constexpr double kVerifyPsiRad = 1e-8;

}  // namespace yumik
