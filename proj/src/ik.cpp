#include "yumik/ik.hpp"

#include "yumik/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace yumik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3d rotvec(const Mat3d& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

double wrapped_maxdiff(const JointVector& a, const JointVector& b, int first,
                       int last) {
  double m = 0.0;
  for (int i = first; i <= last; ++i)
    m = std::max(m, std::abs(wrap_to_pi(a(i) - b(i))));
  return m;
}

JointVector wrap_joints(const JointVector& q) {
  JointVector w;
  for (int i = 0; i < 7; ++i) w(i) = wrap_to_pi(q(i));
  return w;
}

// Proximal rotations for a branch prefix.
struct Prefix {
  Mat3d R01, R02, R03;
  Vec3d p14;  // frame-1 origin to frame-4 origin, base frame
};

Prefix prefix_chain(double q1, double q2, double q3,
                    const KinematicParams& params) {
  Prefix c;
  c.R01 = rot(params.h[0], q1);
  c.R02 = c.R01 * rot(params.h[1], q2);
  c.R03 = c.R02 * rot(params.h[2], q3);
  c.p14 = c.R01 * params.p_link[1] + c.R02 * params.p_link[2] +
          c.R03 * params.p_link[3];
  return c;
}

// Wrist subproblem-5 instance for a fixed proximal chain:
// -p67 + rot(h7,q7) R07'(p07 - p01 - p14) = rot(-h6,q6)(p56 + rot(-h5,q5) p45)
detail::Sp5Core wrist_core(const Prefix& pre, const IkGeometry& geom,
                           const KinematicParams& params) {
  detail::Sp5Core core;
  const Vec3d p1 =
      geom.R07.transpose() * (geom.p07 - params.p_link[0] - pre.p14);
  core.init(-params.p_link[6], p1, params.p_link[5], params.p_link[4],
            params.h[6], -params.h[5], -params.h[4]);
  return core;
}

struct WristRecord {
  double q5, q6, q7;
  double imag;      // relative imaginary part of the originating root
  double residual;  // subproblem-5 equation residual
};

// Candidate wrist triples, including pseudo-solutions from nearly-real
// quartic roots so the branch-error field stays informative across folds
// where a real root pair turns complex.
std::vector<WristRecord> wrist_records(const Prefix& pre,
                                       const IkGeometry& geom,
                                       const KinematicParams& params,
                                       double imag_tol) {
  detail::Sp5Core core = wrist_core(pre, geom, params);
  std::vector<Sp5Candidate> cands;
  core.candidates(cands, imag_tol, true);
  std::vector<WristRecord> out;
  out.reserve(cands.size());
  for (const Sp5Candidate& c : cands)
    out.push_back({c.theta3, c.theta2, c.theta1, c.imag, c.residual});
  return out;
}

double branch_error_impl(const Prefix& pre, double q5, double q6, double q7,
                         const IkGeometry& geom, const KinematicParams& params) {
  const Mat3d R47 = rot(params.h[4], q5) * rot(params.h[5], q6) *
                    rot(params.h[6], q7);
  const Vec3d h4 = params.h[3];
  return (pre.R03.transpose() * geom.R07 * R47.transpose() * h4 - h4).norm();
}

struct Q3Record {
  double q3;
  double penalty;  // |n_SEW . R03 h4| at q3; zero for exact elbow roots
};

// Conditioning bound below which the elbow-plane equation stops pinning q3:
// |n_SEW . d(q3)| stays under this for the whole circle, so its exact roots
// are ill-conditioned and the wrist equation decides feasibility instead.
constexpr double kQ3SweepConditioning = 0.15;
constexpr double kQ3SweepStep = 3.0 * kPi / 180.0;

// Exact elbow roots plus, when the elbow equation is only nearly satisfiable,
// the least-squares angle with its constraint violation as a penalty. When
// n_SEW is nearly parallel to the joint-3 axis the equation barely depends on
// q3 and its roots jump wildly between neighbouring (q1, q2) nodes; sampling
// the half-plane-feasible circle then keeps the error field informative,
// mirroring what the pseudo wrist roots do across wrist folds.
std::vector<Q3Record> q3_records(double q1, double q2, const IkGeometry& geom,
                                 const KinematicParams& params,
                                 double penalty_tol) {
  std::vector<Q3Record> out;
  const Mat3d R02 = rot(params.h[0], q1) * rot(params.h[1], q2);
  const Vec3d n2 = R02.transpose() * geom.n_SEW;
  const Sp4Result roots = subproblem4(n2, params.h[3], params.h[2], 0.0);
  if (!roots.degenerate) {
    for (int i = 0; i < roots.count; ++i) {
      const Vec3d d = R02 * (rot(params.h[2], roots.theta[i]) * params.h[3]);
      if (geom.e_CE.dot(d) <= 0.0) continue;
      const double penalty =
          roots.least_squares ? std::abs(geom.n_SEW.dot(d)) : 0.0;
      if (penalty <= penalty_tol) out.push_back({roots.theta[i], penalty});
    }
  }
  const double conditioning = (n2 - params.h[2] * params.h[2].dot(n2)).norm();
  if (conditioning < kQ3SweepConditioning) {
    for (double q3 = -kPi; q3 < kPi; q3 += kQ3SweepStep) {
      const Vec3d d = R02 * (rot(params.h[2], q3) * params.h[3]);
      if (geom.e_CE.dot(d) <= 0.0) continue;
      const double penalty = std::abs(geom.n_SEW.dot(d));
      if (penalty <= penalty_tol) out.push_back({q3, penalty});
    }
  }
  return out;
}

double psi_abb_of_request(const IkRequest& request) {
  // The sign variant is not invertible (it is diagnostic only), so requests
  // must use one of the two faithful conventions.
  if (request.psi_convention == SewConvention::sign_variant)
    throw std::invalid_argument(
        "arm-angle requests take the abb or conventional convention");
  return request.psi_convention == SewConvention::abb
             ? wrap_to_pi(request.psi)
             : wrap_to_pi(request.psi + kPi / 2);
}

// Generic damped least-squares on a square residual with a central-difference
// Jacobian. Accepts when the residual norm reaches accept_tol.
template <class F>
bool polish_lm(const F& f, Eigen::VectorXd& x, double accept_tol,
               int max_iters) {
  const int n = static_cast<int>(x.size());
  const double fd_step = 1e-6;
  Eigen::VectorXd r = f(x);
  double rn = r.norm();
  double lambda = 1e-4;
  for (int iter = 0; iter < max_iters && rn > 1e-12; ++iter) {
    Eigen::MatrixXd J(r.size(), n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += fd_step;
      xm(j) -= fd_step;
      J.col(j) = (f(xp) - f(xm)) / (2 * fd_step);
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda;
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + step;
      const Eigen::VectorXd rnew = f(xn);
      if (rnew.norm() < rn) {
        x = xn;
        r = rnew;
        rn = rnew.norm();
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e10) break;
    }
    if (!accepted) break;
  }
  return rn <= accept_tol;
}

struct Verified {
  bool ok = false;
  double rot_res = 0.0, pos_res = 0.0, psi_res = 0.0;
};

Verified verify_solution(const JointVector& q, const IkRequest& request,
                         double psi_req_abb, const KinematicParams& params) {
  Verified v;
  const FrameChain chain = forward_kinematics(params, q);
  v.rot_res = std::abs(
      Eigen::AngleAxisd(chain.tool.R * request.tool_pose.R.transpose()).angle());
  v.pos_res = (chain.tool.p - request.tool_pose.p).norm();
  const Vec3d p_SW = chain.O[7] - chain.O[1];
  const Vec3d d = chain.R0i[3] * params.h[3];
  v.psi_res = std::abs(wrap_to_pi(sew_abb(p_SW, d, request.e_r) - psi_req_abb));
  v.ok = v.rot_res <= kVerifyRotRad && v.pos_res <= kVerifyPosMm &&
         v.psi_res <= kVerifyPsiRad;
  return v;
}

// Full residual for the arm-angle-constrained polish: stacked rotation
// vector, scaled position error, wrapped arm-angle error.
struct FullResidual {
  const IkRequest* request;
  const KinematicParams* params;
  double psi_req_abb;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    JointVector q = x;
    const FrameChain chain = forward_kinematics(*params, q);
    Eigen::VectorXd r(7);
    r.head<3>() = rotvec(chain.tool.R * request->tool_pose.R.transpose());
    r.segment<3>(3) = (chain.tool.p - request->tool_pose.p) / kRowScaleMm;
    const Vec3d p_SW = chain.O[7] - chain.O[1];
    const Vec3d d = chain.R0i[3] * params->h[3];
    r(6) = wrap_to_pi(sew_abb(p_SW, d, request->e_r) - psi_req_abb);
    return r;
  }
};

// Pose-only residual with q1 frozen (six unknowns q2..q7).
struct PoseResidualFixedQ1 {
  const Pose* pose;
  const KinematicParams* params;
  double q1;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    JointVector q;
    q(0) = q1;
    q.tail<6>() = x;
    const FrameChain chain = forward_kinematics(*params, q);
    Eigen::VectorXd r(6);
    r.head<3>() = rotvec(chain.tool.R * pose->R.transpose());
    r.tail<3>() = (chain.tool.p - pose->p) / kRowScaleMm;
    return r;
  }
};

void dedup_insert(std::vector<IkSolution>& sols, IkSolution&& cand,
                  double tol) {
  for (const IkSolution& s : sols) {
    if (wrapped_maxdiff(s.q, cand.q, 0, 6) < tol) return;
  }
  sols.push_back(std::move(cand));
}

void finalize_set(IkSolutionSet& set, const RobotModel& model) {
  for (IkSolution& s : set.solutions) {
    s.within_limits = within_limits(s.q, model.limits).ok;
    s.windings = enumerate_2pi_shifts(s.q, model.limits);
  }
  std::sort(set.solutions.begin(), set.solutions.end(),
            [](const IkSolution& a, const IkSolution& b) {
              for (int i = 0; i < 7; ++i) {
                if (a.q(i) != b.q(i)) return a.q(i) < b.q(i);
              }
              return false;
            });
}

}  // namespace

IkGeometry ik_geometry(const IkRequest& request,
                       const KinematicParams& params) {
  IkGeometry g;
  g.R07 = request.tool_pose.R * params.R_7T.transpose();
  g.p07 = request.tool_pose.p - g.R07 * params.p_7T;
  g.p_SW = g.p07 - params.p_link[0];
  const double n = g.p_SW.norm();
  if (n <= 1e-9)
    throw CoordinateSingularity("shoulder and wrist coincide");
  g.e_SW = g.p_SW / n;
  if (g.e_SW.cross(request.e_r).norm() < 1e-8)
    throw CoordinateSingularity(
        "reference direction parallel to the shoulder-wrist line");
  g.psi_conv = wrap_to_pi(psi_abb_of_request(request) - kPi / 2);
  const Vec3d e_yC = g.p_SW.cross(request.e_r).normalized();
  g.n_SEW = rot(g.e_SW, g.psi_conv) * e_yC;
  g.e_CE = g.n_SEW.cross(g.e_SW);
  return g;
}

Q3Candidates solve_q3(double q1, double q2, const IkGeometry& geom,
                      const KinematicParams& params) {
  Q3Candidates out;
  const Mat3d R02 = rot(params.h[0], q1) * rot(params.h[1], q2);
  const Sp4Result roots = subproblem4(R02.transpose() * geom.n_SEW,
                                      params.h[3], params.h[2], 0.0);
  out.degenerate = roots.degenerate;
  if (roots.least_squares || roots.degenerate) return out;
  for (int i = 0; i < roots.count; ++i) {
    const Vec3d d = R02 * (rot(params.h[2], roots.theta[i]) * params.h[3]);
    if (geom.e_CE.dot(d) > 0.0) out.q3[out.count++] = roots.theta[i];
  }
  return out;
}

std::vector<WristTriple> solve_wrist(double q1, double q2, double q3,
                                     const IkGeometry& geom,
                                     const KinematicParams& params) {
  const Prefix pre = prefix_chain(q1, q2, q3, params);
  detail::Sp5Core core = wrist_core(pre, geom, params);
  std::vector<Sp5Candidate> cands;
  core.candidates(cands, 1e-7, true);
  std::vector<WristTriple> out;
  for (const Sp5Candidate& c : cands) {
    if (c.residual > 1e-8 * std::max(1.0, core.scale)) continue;
    WristTriple t{c.theta3, c.theta2, c.theta1};
    const bool dup =
        std::any_of(out.begin(), out.end(), [&](const WristTriple& s) {
          return std::abs(wrap_to_pi(s.q5 - t.q5)) < 1e-6 &&
                 std::abs(wrap_to_pi(s.q6 - t.q6)) < 1e-6 &&
                 std::abs(wrap_to_pi(s.q7 - t.q7)) < 1e-6;
        });
    if (!dup) out.push_back(t);
  }
  return out;
}

double branch_error(double q1, double q2, double q3, double q5, double q6,
                    double q7, const IkGeometry& geom,
                    const KinematicParams& params) {
  return branch_error_impl(prefix_chain(q1, q2, q3, params), q5, q6, q7, geom,
                           params);
}

double solve_q4(double q1, double q2, double q3, double q5, double q6,
                double q7, const IkGeometry& geom,
                const KinematicParams& params) {
  const Prefix pre = prefix_chain(q1, q2, q3, params);
  const Mat3d R47 = rot(params.h[4], q5) * rot(params.h[5], q6) *
                    rot(params.h[6], q7);
  const Mat3d M = pre.R03.transpose() * geom.R07 * R47.transpose();
  const Vec3d h4 = params.h[3];
  const Vec3d probe =
      std::abs(h4.dot(Vec3d::UnitX())) < 0.9 ? Vec3d::UnitX() : Vec3d::UnitZ();
  return subproblem1(probe, M * probe, h4).theta;
}

std::vector<LandscapeSample> ik_error_landscape(const IkRequest& request,
                                                const KinematicParams& params,
                                                const SearchSettings& settings) {
  const IkGeometry geom = ik_geometry(request, params);
  const double step = settings.grid_step;
  const int n1 = std::max(
      1, (int)std::lround((settings.domain_max(0) - settings.domain_min(0)) / step));
  const int n2 = std::max(
      1, (int)std::lround((settings.domain_max(1) - settings.domain_min(1)) / step));
  std::vector<LandscapeSample> out;
  out.reserve((size_t)n1 * n2);
  for (int i1 = 0; i1 < n1; ++i1) {
    const double q1 = settings.domain_min(0) + i1 * step;
    for (int i2 = 0; i2 < n2; ++i2) {
      const double q2 = settings.domain_min(1) + i2 * step;
      LandscapeSample s{q1, q2, kInf, 0};
      for (const Q3Record& r :
           q3_records(q1, q2, geom, params, settings.minimum_threshold)) {
        const Prefix pre = prefix_chain(q1, q2, r.q3, params);
        for (const WristRecord& w :
             wrist_records(pre, geom, params, 0.35)) {
          s.min_error = std::min(
              s.min_error,
              r.penalty + branch_error_impl(pre, w.q5, w.q6, w.q7, geom, params));
          ++s.branch_count;
        }
      }
      out.push_back(s);
    }
  }
  return out;
}

IkSolutionSet ik_2d_search(const IkRequest& request, const RobotModel& model,
                           const SearchSettings& settings) {
  const KinematicParams& params = model.params;
  const IkGeometry geom = ik_geometry(request, params);
  const double psi_req_abb = psi_abb_of_request(request);
  const double step = settings.grid_step;
  const double span1 = settings.domain_max(0) - settings.domain_min(0);
  const double span2 = settings.domain_max(1) - settings.domain_min(1);
  const int n1 = std::max(1, (int)std::lround(span1 / step));
  const int n2 = std::max(1, (int)std::lround(span2 / step));
  const bool wrap1 = std::abs(span1 - 2 * kPi) < 1e-9;
  const bool wrap2 = std::abs(span2 - 2 * kPi) < 1e-9;

  // Merged minimum branch error per node (wrist pseudo-roots and penalized
  // elbow records included so the field extends across both kinds of fold).
  std::vector<double> field((size_t)n1 * n2, kInf);
  auto at = [&](int i1, int i2) -> double& {
    return field[(size_t)i1 * n2 + i2];
  };
  for (int i1 = 0; i1 < n1; ++i1) {
    const double q1 = settings.domain_min(0) + i1 * step;
    for (int i2 = 0; i2 < n2; ++i2) {
      const double q2 = settings.domain_min(1) + i2 * step;
      double best = kInf;
      for (const Q3Record& r :
           q3_records(q1, q2, geom, params, settings.minimum_threshold)) {
        const Prefix pre = prefix_chain(q1, q2, r.q3, params);
        for (const WristRecord& w : wrist_records(pre, geom, params, 0.35))
          best = std::min(
              best,
              r.penalty + branch_error_impl(pre, w.q5, w.q6, w.q7, geom, params));
      }
      at(i1, i2) = best;
    }
  }

  // Seeds: sub-threshold local minima on the (torus-wrapped) 8-neighborhood.
  std::vector<std::pair<int, int>> seeds;
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const double e = at(i1, i2);
      if (!(e < settings.minimum_threshold)) continue;
      bool is_min = true;
      for (int d1 = -1; d1 <= 1 && is_min; ++d1) {
        for (int d2 = -1; d2 <= 1 && is_min; ++d2) {
          if (d1 == 0 && d2 == 0) continue;
          int j1 = i1 + d1, j2 = i2 + d2;
          if (wrap1) j1 = (j1 + n1) % n1;
          if (wrap2) j2 = (j2 + n2) % n2;
          if (j1 < 0 || j1 >= n1 || j2 < 0 || j2 >= n2) continue;
          if (at(j1, j2) < e) is_min = false;
        }
      }
      if (is_min) seeds.emplace_back(i1, i2);
    }
  }

  IkSolutionSet set;
  for (auto [i1, i2] : seeds) {
    const double q1 = settings.domain_min(0) + i1 * step;
    const double q2 = settings.domain_min(1) + i2 * step;
    const auto q3r = q3_records(q1, q2, geom, params, settings.minimum_threshold);
    for (size_t c = 0; c < q3r.size(); ++c) {
      const Prefix pre = prefix_chain(q1, q2, q3r[c].q3, params);
      const auto recs = wrist_records(pre, geom, params, 0.35);
      for (size_t w = 0; w < recs.size(); ++w) {
        const WristRecord& rec = recs[w];
        if (q3r[c].penalty +
                branch_error_impl(pre, rec.q5, rec.q6, rec.q7, geom, params) >=
            settings.minimum_threshold)
          continue;
        JointVector q0;
        q0 << q1, q2, q3r[c].q3,
            solve_q4(q1, q2, q3r[c].q3, rec.q5, rec.q6, rec.q7, geom, params),
            rec.q5, rec.q6, rec.q7;
        Eigen::VectorXd x = q0;
        FullResidual f{&request, &params, psi_req_abb};
        if (!polish_lm(f, x, settings.polish_tolerance,
                       settings.max_polish_iters))
          continue;
        IkSolution sol;
        sol.q = wrap_joints(JointVector(x));
        const Verified v = verify_solution(sol.q, request, psi_req_abb, params);
        if (!v.ok) continue;
        sol.pose_rot_residual = v.rot_res;
        sol.pose_pos_residual = v.pos_res;
        sol.psi_residual = v.psi_res;
        sol.branch_id = (int)c * 8 + (int)std::min<size_t>(w, 7);
        sol.search_origin = {q1, q2};
        dedup_insert(set.solutions, std::move(sol), settings.dedup_tolerance);
      }
    }
  }
  if (set.solutions.empty())
    throw EmptySolutionSet("no solution verified for the requested pose/arm angle");
  finalize_set(set, model);
  return set;
}

// ---------------------------------------------------------------------------
// Fixed-q1 solver: 1D search over q6.
//
// For q6 != 0 the axis-5 and axis-7 lines intersect at a point P that is
// invariant under q5 and q7. P is known from the pose side (it lies on the
// axis-7 line through p07 along R07 h7) and, expressed in frame 1, yields a
// subproblem-5 position equation for (q2,q3,q4). q5 and q7 follow from
// subproblem 1; the leftover orientation mismatch e(q6) = h5' R47 h7 - cos q6
// is the scalar zeroed over q6.

namespace {

struct InnerTriple {
  double q2, q3, q4;
};

// Frame-5 intersection of axes 5 and 7: offsets (t along h5 from O5,
// tau along h7 from O7). Fails near q6 = 0 (parallel axes).
struct AxisIntersection {
  double t = 0.0, tau = 0.0;
  bool ok = false;
};

AxisIntersection axis57_intersection(double q6, const KinematicParams& params) {
  AxisIntersection isec;
  const Mat3d R56 = rot(params.h[5], q6);
  const Vec3d dir7 = R56 * params.h[6];
  const Vec3d A5 = params.p_link[5] + R56 * params.p_link[6];
  Eigen::Matrix<double, 3, 2> M;
  M.col(0) = params.h[4];
  M.col(1) = -dir7;
  const Eigen::Vector2d sol = M.colPivHouseholderQr().solve(A5);
  const double resid = (M * sol - A5).norm();
  const double scale = std::max(1.0, A5.norm());
  if (resid > 1e-6 * scale || std::abs(sol(0)) > 1e5 || std::abs(sol(1)) > 1e5)
    return isec;
  isec.t = sol(0);
  isec.tau = sol(1);
  isec.ok = true;
  return isec;
}

struct InnerEval {
  std::vector<InnerTriple> triples;
  std::vector<double> err;  // e(q6) per triple
};

InnerEval inner_eval(const Pose& wrist, double q1, double q6,
                     const KinematicParams& params) {
  InnerEval out;
  const AxisIntersection isec = axis57_intersection(q6, params);
  if (!isec.ok) return out;
  const Mat3d R01 = rot(params.h[0], q1);
  const Vec3d P0 = wrist.p + isec.tau * (wrist.R * params.h[6]);
  const Vec3d pi2 = R01.transpose() * (P0 - params.p_link[0]);
  const Vec3d c = params.p_link[4] + isec.t * params.h[4];
  // -p23 + rot(-h2,q2)(pi2 - p12) = rot(h3,q3)(p34 + rot(h4,q4) c)
  // Pseudo-solutions from nearly-real roots are kept so the e(q6) sheets
  // stay continuous across folds where root pairs turn complex; the pose
  // polish and verification downstream discard the ones that do not close.
  detail::Sp5Core core;
  core.init(-params.p_link[2], pi2 - params.p_link[1], params.p_link[3], c,
            -params.h[1], params.h[2], params.h[3]);
  std::vector<Sp5Candidate> cands;
  core.candidates(cands, 0.35, true);
  const double c6 = std::cos(q6);
  for (const Sp5Candidate& tr : cands) {
    const Mat3d R04 = R01 * rot(params.h[1], tr.theta1) *
                      rot(params.h[2], tr.theta2) * rot(params.h[3], tr.theta3);
    const Vec3d w = R04.transpose() * (wrist.R * params.h[6]);
    out.triples.push_back({tr.theta1, tr.theta2, tr.theta3});
    out.err.push_back(params.h[4].dot(w) - c6);
  }
  return out;
}

double triple_dist(const InnerTriple& a, const InnerTriple& b) {
  return std::max({std::abs(wrap_to_pi(a.q2 - b.q2)),
                   std::abs(wrap_to_pi(a.q3 - b.q3)),
                   std::abs(wrap_to_pi(a.q4 - b.q4))});
}

// Completes (q1, q2, q3, q4, q6) to a full joint vector.
JointVector assemble_inner(const Pose& wrist, double q1, double q6,
                           const InnerTriple& tr,
                           const KinematicParams& params) {
  const Mat3d R56 = rot(params.h[5], q6);
  const Mat3d R04 = rot(params.h[0], q1) * rot(params.h[1], tr.q2) *
                    rot(params.h[2], tr.q3) * rot(params.h[3], tr.q4);
  const Vec3d w = R04.transpose() * (wrist.R * params.h[6]);
  const double q5 = subproblem1(R56 * params.h[6], w, params.h[4]).theta;
  const Mat3d R67 = R56.transpose() * rot(params.h[4], q5).transpose() *
                    R04.transpose() * wrist.R;
  const double q7 = axis_angle_about(R67, params.h[6]);
  JointVector q;
  q << q1, tr.q2, tr.q3, tr.q4, q5, q6, q7;
  return q;
}

}  // namespace

std::vector<JointVector> ik_fixed_q1(const Pose& tool_pose, double q1,
                                     const KinematicParams& params,
                                     const SearchSettings& settings) {
  const Pose wrist = wrist_pose(params, tool_pose);
  const double step = settings.grid_step;
  const int n = std::max(2, (int)std::lround(2 * kPi / step));

  struct Node {
    double q6;
    InnerEval eval;
  };
  std::vector<JointVector> found;
  auto try_accept = [&](JointVector q) {
    // pose-only polish with q1 frozen, then residual verification
    PoseResidualFixedQ1 f{&tool_pose, &params, q1};
    Eigen::VectorXd x = q.tail<6>();
    if (!polish_lm(f, x, settings.polish_tolerance, settings.max_polish_iters))
      return;
    q(0) = q1;
    q.tail<6>() = x;
    q = wrap_joints(q);
    const FrameChain chain = forward_kinematics(params, q);
    if (std::abs(Eigen::AngleAxisd(chain.tool.R * tool_pose.R.transpose())
                     .angle()) > kVerifyRotRad ||
        (chain.tool.p - tool_pose.p).norm() > kVerifyPosMm)
      return;
    for (const JointVector& s : found)
      if (wrapped_maxdiff(s, q, 0, 6) < std::max(settings.dedup_tolerance, 1e-6))
        return;
    found.push_back(q);
  };

  Node prev;
  bool have_prev = false;
  for (int k = 0; k <= n; ++k) {
    // one wrapped extra sample closes the q6 circle
    const double q6 = -kPi + (k % n) * step;
    if (std::abs(q6) < step * 0.5) {
      have_prev = false;
      continue;
    }
    Node cur{q6, inner_eval(wrist, q1, q6, params)};
    if (cur.eval.triples.empty()) {
      have_prev = false;
      continue;
    }
    if (have_prev) {
      // pair triples across the step and bisect sign changes of e(q6)
      for (size_t i = 0; i < cur.eval.triples.size(); ++i) {
        int best = -1;
        double bestd = 0.35;
        for (size_t j = 0; j < prev.eval.triples.size(); ++j) {
          const double d = triple_dist(cur.eval.triples[i], prev.eval.triples[j]);
          if (d < bestd) {
            bestd = d;
            best = (int)j;
          }
        }
        if (best < 0) {
          // a sheet accelerating into a fold can move farther than the strict
          // gate in one step; retry relaxed and let the bisection re-anchor
          // (pose verification discards any mispairing downstream)
          bestd = 1.2;
          for (size_t j = 0; j < prev.eval.triples.size(); ++j) {
            const double d =
                triple_dist(cur.eval.triples[i], prev.eval.triples[j]);
            if (d < bestd) {
              bestd = d;
              best = (int)j;
            }
          }
        }
        if (best < 0) continue;
        const double ea = prev.eval.err[best], eb = cur.eval.err[i];
        if (ea == 0.0) {
          try_accept(assemble_inner(wrist, q1, prev.q6,
                                    prev.eval.triples[best], params));
          continue;
        }
        if ((ea > 0) == (eb > 0)) continue;
        double lo = prev.q6, hi = prev.q6 + step;  // monotone bracket in q6
        InnerTriple tlo = prev.eval.triples[best], thi = cur.eval.triples[i];
        double elo = ea;
        InnerTriple tmid = tlo;
        double qmid = lo;
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
          qmid = 0.5 * (lo + hi);
          const InnerEval ev = inner_eval(wrist, q1, qmid, params);
          int bi = -1;
          double bd = 0.35;
          for (size_t j = 0; j < ev.triples.size(); ++j) {
            const double d = std::min(triple_dist(ev.triples[j], tlo),
                                      triple_dist(ev.triples[j], thi));
            if (d < bd) {
              bd = d;
              bi = (int)j;
            }
          }
          if (bi < 0) break;
          tmid = ev.triples[bi];
          if ((ev.err[bi] > 0) == (elo > 0)) {
            lo = qmid;
            tlo = tmid;
            elo = ev.err[bi];
          } else {
            hi = qmid;
            thi = tmid;
          }
        }
        try_accept(assemble_inner(wrist, q1, qmid, tmid, params));
      }
    }
    prev = std::move(cur);
    have_prev = true;
  }
  std::sort(found.begin(), found.end(),
            [](const JointVector& a, const JointVector& b) {
              for (int i = 0; i < 7; ++i)
                if (a(i) != b(i)) return a(i) < b(i);
              return false;
            });
  return found;
}

IkSolutionSet ik_nested_1d(const IkRequest& request, const RobotModel& model,
                           const SearchSettings& settings) {
  const KinematicParams& params = model.params;
  ik_geometry(request, params);  // validates the request (coordinate singularity)
  const double psi_req_abb = psi_abb_of_request(request);
  const double step = settings.grid_step;
  const int n = std::max(2, (int)std::lround(2 * kPi / step));

  auto psi_of = [&](const JointVector& q) {
    const FrameChain chain = forward_kinematics(params, q);
    const Vec3d p_SW = chain.O[7] - chain.O[1];
    const Vec3d d = chain.R0i[3] * params.h[3];
    return sew_abb(p_SW, d, request.e_r);
  };
  // Re-solves the pose at a new q1 starting from a nearby branch sample.
  auto track = [&](double q1, const JointVector& seed,
                   JointVector& out) -> bool {
    PoseResidualFixedQ1 f{&request.tool_pose, &params, q1};
    Eigen::VectorXd x = seed.tail<6>();
    if (!polish_lm(f, x, settings.polish_tolerance, settings.max_polish_iters))
      return false;
    out(0) = q1;
    out.tail<6>() = x;
    return true;
  };

  IkSolutionSet set;
  auto polish_and_insert = [&](const JointVector& q_near, int branch_id) {
    FullResidual f{&request, &params, psi_req_abb};
    Eigen::VectorXd x = q_near;
    if (!polish_lm(f, x, settings.polish_tolerance, settings.max_polish_iters))
      return;
    IkSolution sol;
    sol.q = wrap_joints(JointVector(x));
    const Verified v = verify_solution(sol.q, request, psi_req_abb, params);
    if (!v.ok) return;
    sol.pose_rot_residual = v.rot_res;
    sol.pose_pos_residual = v.pos_res;
    sol.psi_residual = v.psi_res;
    sol.branch_id = branch_id;
    sol.search_origin = {sol.q(0), sol.q(5)};
    dedup_insert(set.solutions, std::move(sol), settings.dedup_tolerance);
  };
  auto bisect_crossing = [&](double q1a, const JointVector& qa, double da,
                             double q1b, const JointVector& qb, double db,
                             int branch_id) {
    double lo = q1a, hi = q1b, dlo = da;
    JointVector qlo = qa, qhi = qb, qm = qa;
    (void)db;
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      JointVector seed = qlo;
      for (int i = 1; i < 7; ++i)
        seed(i) = qlo(i) + 0.5 * wrap_to_pi(qhi(i) - qlo(i));
      if (!track(mid, seed, qm)) return;
      const double dm = wrap_to_pi(psi_of(qm) - psi_req_abb);
      if (std::abs(dm) < 1e-13) break;
      if ((dm > 0) == (dlo > 0)) {
        lo = mid;
        qlo = qm;
        dlo = dm;
      } else {
        hi = mid;
        qhi = qm;
      }
    }
    // exact polish with the arm-angle constraint included
    polish_and_insert(qm, branch_id);
  };

  struct BranchSample {
    JointVector q;
    double delta;
  };
  std::vector<BranchSample> prev;
  std::vector<BranchSample> first;  // kept to close the q1 seam
  double prev_q1 = 0.0;
  int branch_counter = 0;
  for (int k = 0; k <= n; ++k) {
    const bool seam = k == n;
    const double q1 = -kPi + k * step;  // last sample wraps to the first
    std::vector<BranchSample> cur;
    if (!seam) {
      for (const JointVector& q : ik_fixed_q1(request.tool_pose, q1, params,
                                              settings))
        cur.push_back({q, wrap_to_pi(psi_of(q) - psi_req_abb)});
      if (k == 0) first = cur;
    } else {
      for (const BranchSample& s : first) {
        JointVector q = s.q;
        q(0) = q1;  // same configuration expressed with q1 = +pi
        cur.push_back({q, s.delta});
      }
    }
    if (k > 0) {
      for (const BranchSample& b : cur) {
        int best = -1;
        double bestd = 0.35;
        for (size_t j = 0; j < prev.size(); ++j) {
          const double d = wrapped_maxdiff(b.q, prev[j].q, 1, 6);
          if (d < bestd) {
            bestd = d;
            best = (int)j;
          }
        }
        if (best < 0) continue;
        const BranchSample& a = prev[best];
        if (std::abs(a.delta) < 1e-9) {
          // the sample itself already sits on the requested arm angle
          polish_and_insert(a.q, branch_counter++);
        } else if ((a.delta > 0) != (b.delta > 0) &&
                   std::abs(a.delta) + std::abs(b.delta) < kPi) {
          bisect_crossing(prev_q1, a.q, a.delta, q1, b.q, b.delta,
                          branch_counter++);
        }
      }
    }
    prev = std::move(cur);
    prev_q1 = q1;
  }
  if (set.solutions.empty())
    throw EmptySolutionSet("no arm-angle crossing verified along any branch");
  finalize_set(set, model);
  return set;
}

}  // namespace yumik
