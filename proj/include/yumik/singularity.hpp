#pragma once

// Classification of the redundancy-resolution singularities at a
// configuration (kinematic rank loss, augmentation, shoulder-wrist/reference
// collinearity, elbow-axis collinearity, vanishing arm-angle gradient) and a
// self-motion sweep for locating augmentation singularities graphically.

#include "yumik/ik.hpp"
#include "yumik/jacobian.hpp"
#include "yumik/model.hpp"

#include <vector>

namespace yumik {

struct SingularityTolerances {
  double kinematic_sigma_ratio = 1e-6;  // row-normalized sigma_min/sigma_max
  double coordinate_hard = 1e-8;
  double coordinate_warn = 1e-3;
  double collinear_hard = 1e-8;
  double collinear_warn = 1e-3;
  // augmentation: |J_psi . v_null| <= slope_tol * ||J_psi||
  double augmentation_slope = 1e-8;
  double parameterization_zero = 1e-6;  // ||J_psi|| below this

  static SingularityTolerances exact() { return {}; }
  // For configurations quoted to two decimal degrees, exact zeros are
  // unattainable; relax the rank and slope thresholds.
  static SingularityTolerances table_rounded() {
    SingularityTolerances t;
    t.kinematic_sigma_ratio = 1e-3;
    t.augmentation_slope = 1e-3;
    return t;
  }
};

struct SingularityReport {
  struct {
    double sigma_min_ratio = 0.0;
    bool is_singular = false;
  } kinematic;
  struct {
    double cross_norm = 0.0;  // ||e_SW x e_r||
    bool flag = false;
    bool warn = false;
  } coordinate;
  struct {
    double cross_norm = 0.0;  // ||e_SW x R03 h4||
    bool flag = false;
    bool warn = false;
  } collinear;
  struct {
    double sigma_min_ratio = 0.0;  // of the row-normalized augmented Jacobian
    bool flag = false;
    double null_slope = 0.0;  // |J_psi . v_null|
    bool defined = false;     // kinematic nonsingular and J_psi defined
  } augmentation;
  struct {
    double jpsi_norm = 0.0;
    bool flag = false;
    bool defined = false;
  } parameterization_zero;
};

SingularityReport classify(const KinematicParams& params, const JointVector& q,
                           const Vec3d& e_r,
                           const SingularityTolerances& tol = {});

struct SweepSettings {
  double q1_min = -kPi;
  double q1_max = kPi;
  double q1_step = deg2rad(0.25);
  bool refine_extrema = true;  // golden-section refinement per branch
  SearchSettings ik;           // inner fixed-q1 solver settings
};

struct SweepSample {
  double q1;
  double psi;  // arm angle (RobotStudio convention)
  JointVector q;
  int branch_id;
};

// All pose-preserving configurations over a q1 range with their arm angles,
// labeled by continuous branch. Throws EmptySweep when no q1 in the range
// admits a solution.
std::vector<SweepSample> self_motion_sweep(const KinematicParams& params,
                                           const Pose& pose, const Vec3d& e_r,
                                           const SweepSettings& settings = {});

}  // namespace yumik
