#include "yumik/singularity.hpp"

#include <algorithm>
#include <cmath>

namespace yumik {

SingularityReport classify(const KinematicParams& params, const JointVector& q,
                           const Vec3d& e_r,
                           const SingularityTolerances& tol) {
  SingularityReport rep;
  const FrameChain chain = forward_kinematics(params, q);
  const KinematicJacobian J = kinematic_jacobian(params, q);
  rep.kinematic.sigma_min_ratio = smallest_singular_ratio(row_normalized(J));
  rep.kinematic.is_singular =
      rep.kinematic.sigma_min_ratio < tol.kinematic_sigma_ratio;

  const Vec3d p_SW = chain.O[7] - chain.O[1];
  const Vec3d e_SW = p_SW.normalized();
  const Vec3d d = chain.R0i[3] * params.h[3];
  rep.coordinate.cross_norm = e_SW.cross(e_r).norm();
  rep.coordinate.flag = rep.coordinate.cross_norm < tol.coordinate_hard;
  rep.coordinate.warn = rep.coordinate.cross_norm < tol.coordinate_warn;
  rep.collinear.cross_norm = e_SW.cross(d).norm();
  rep.collinear.flag = rep.collinear.cross_norm < tol.collinear_hard;
  rep.collinear.warn = rep.collinear.cross_norm < tol.collinear_warn;

  Eigen::Matrix<double, 1, 7> jpsi;
  bool jpsi_defined = false;
  try {
    jpsi = sew_jacobian(params, q, e_r);
    jpsi_defined = true;
  } catch (const SewJacobianUndefined&) {
  }
  if (jpsi_defined) {
    rep.parameterization_zero.defined = true;
    rep.parameterization_zero.jpsi_norm = jpsi.norm();
    rep.parameterization_zero.flag =
        rep.parameterization_zero.jpsi_norm < tol.parameterization_zero;
  }

  if (jpsi_defined && !rep.kinematic.is_singular) {
    AugmentedJacobian A;
    A.topRows<6>() = J;
    A.row(6) = jpsi;
    rep.augmentation.sigma_min_ratio =
        smallest_singular_ratio(row_normalized(A));
    try {
      const Eigen::Matrix<double, 7, 1> v = null_direction(J);
      rep.augmentation.null_slope = std::abs(jpsi * v);
      rep.augmentation.defined = true;
      rep.augmentation.flag =
          rep.augmentation.null_slope <= tol.augmentation_slope * jpsi.norm();
    } catch (const AmbiguousNullSpace&) {
    }
  }
  return rep;
}

namespace {

double psi_of_config(const KinematicParams& params, const JointVector& q,
                     const Vec3d& e_r) {
  const FrameChain chain = forward_kinematics(params, q);
  const Vec3d p_SW = chain.O[7] - chain.O[1];
  const Vec3d d = chain.R0i[3] * params.h[3];
  return sew_abb(p_SW, d, e_r);
}

double branch_dist(const JointVector& a, const JointVector& b) {
  double m = 0.0;
  for (int i = 1; i < 7; ++i)
    m = std::max(m, std::abs(wrap_to_pi(a(i) - b(i))));
  return m;
}

}  // namespace

std::vector<SweepSample> self_motion_sweep(const KinematicParams& params,
                                           const Pose& pose, const Vec3d& e_r,
                                           const SweepSettings& settings) {
  const int n =
      std::max(1, (int)std::lround((settings.q1_max - settings.q1_min) /
                                   settings.q1_step));
  std::vector<SweepSample> samples;
  struct Branch {
    JointVector last;
    int id;
    bool alive;
  };
  std::vector<Branch> branches;
  int next_id = 0;

  for (int k = 0; k <= n; ++k) {
    const double q1 = settings.q1_min + k * settings.q1_step;
    const std::vector<JointVector> sols =
        ik_fixed_q1(pose, q1, params, settings.ik);
    for (Branch& br : branches) br.alive = false;
    for (const JointVector& q : sols) {
      int best = -1;
      double bestd = 0.35;
      for (size_t j = 0; j < branches.size(); ++j) {
        const double dd = branch_dist(q, branches[j].last);
        if (dd < bestd) {
          bestd = dd;
          best = (int)j;
        }
      }
      int id;
      if (best >= 0 && !branches[best].alive) {
        branches[best].last = q;
        branches[best].alive = true;
        id = branches[best].id;
      } else {
        branches.push_back({q, next_id++, true});
        id = branches.back().id;
      }
      samples.push_back({q1, psi_of_config(params, q, e_r), q, id});
    }
    branches.erase(std::remove_if(branches.begin(), branches.end(),
                                  [](const Branch& b) { return !b.alive; }),
                   branches.end());
  }
  if (samples.empty())
    throw EmptySweep("no configuration reaches the pose in the q1 range");

  if (settings.refine_extrema) {
    // Re-solve the pose at an arbitrary q1 and pick the solution continuing
    // the branch the seed belongs to.
    auto track = [&](double q1, const JointVector& seed, JointVector& out,
                     double& psi) -> bool {
      std::vector<JointVector> cand = ik_fixed_q1(pose, q1, params, settings.ik);
      int best = -1;
      double bestd = 0.5;
      for (size_t i = 0; i < cand.size(); ++i) {
        const double dd = branch_dist(cand[i], seed);
        if (dd < bestd) {
          bestd = dd;
          best = (int)i;
        }
      }
      if (best < 0) return false;
      out = cand[best];
      psi = psi_of_config(params, out, e_r);
      return true;
    };

    std::vector<SweepSample> refined;
    // group sample indices per branch, ascending q1 (insertion order)
    std::vector<int> ids;
    for (const SweepSample& s : samples)
      if (std::find(ids.begin(), ids.end(), s.branch_id) == ids.end())
        ids.push_back(s.branch_id);
    for (int id : ids) {
      std::vector<const SweepSample*> bs;
      for (const SweepSample& s : samples)
        if (s.branch_id == id) bs.push_back(&s);
      for (size_t i = 1; i + 1 < bs.size(); ++i) {
        const double dl = wrap_to_pi(bs[i]->psi - bs[i - 1]->psi);
        const double dr = wrap_to_pi(bs[i + 1]->psi - bs[i]->psi);
        if (dl == 0.0 || dr == 0.0 || (dl > 0) == (dr > 0)) continue;
        // golden-section refinement of the extremum in [q1(i-1), q1(i+1)]
        const bool maximize = dl > 0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = bs[i - 1]->q1, b = bs[i + 1]->q1;
        JointVector seed = bs[i]->q;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        JointVector qx1, qx2;
        double f1, f2;
        if (!track(x1, seed, qx1, f1) || !track(x2, seed, qx2, f2)) continue;
        for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
          const bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
          if (keep_left) {
            b = x2;
            x2 = x1;
            f2 = f1;
            qx2 = qx1;
            x1 = b - gr * (b - a);
            if (!track(x1, qx2, qx1, f1)) break;
          } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            qx1 = qx2;
            x2 = a + gr * (b - a);
            if (!track(x2, qx1, qx2, f2)) break;
          }
        }
        refined.push_back({qx1(0), f1, qx1, id});
      }
    }
    samples.insert(samples.end(), refined.begin(), refined.end());
  }

  std::sort(samples.begin(), samples.end(),
            [](const SweepSample& a, const SweepSample& b) {
              if (a.q1 != b.q1) return a.q1 < b.q1;
              return a.branch_id < b.branch_id;
            });
  return samples;
}

}  // namespace yumik
