#pragma once

#include <stdexcept>
#include <string>

namespace yumik {

// Reference direction parallel to the shoulder-wrist line: the arm angle is
// undefined there.
struct CoordinateSingularity : std::runtime_error {
  explicit CoordinateSingularity(const std::string& what)
      : std::runtime_error(what) {}
};

// Arm-angle gradient has no defined value (singular SEW geometry).
struct SewJacobianUndefined : std::runtime_error {
  explicit SewJacobianUndefined(const std::string& what)
      : std::runtime_error(what) {}
};

// Kinematic Jacobian rank < 6: the self-motion direction is not unique.
struct AmbiguousNullSpace : std::runtime_error {
  explicit AmbiguousNullSpace(const std::string& what)
      : std::runtime_error(what) {}
};

// Inverse kinematics found no configuration for the requested pose/arm angle.
struct EmptySolutionSet : std::runtime_error {
  explicit EmptySolutionSet(const std::string& what)
      : std::runtime_error(what) {}
};

// Self-motion sweep found no feasible sample in the requested range.
struct EmptySweep : std::runtime_error {
  explicit EmptySweep(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace yumik
