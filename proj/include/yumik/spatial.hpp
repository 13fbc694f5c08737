#pragma once

// 3D primitives and the canonical rotation subproblems (1, 4, 5) that the
// kinematics modules are built from. Everything here is a pure function.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <vector>

namespace yumik {

template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

constexpr double kPi = 3.14159265358979323846;

// skew(v) * w == v.cross(w)
template <class Derived>
Mat3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& v) {
  using S = typename Derived::Scalar;
  Mat3<S> m;
  m << S(0), -v.z(), v.y(), v.z(), S(0), -v.x(), -v.y(), v.x(), S(0);
  return m;
}

// Rodrigues: R(k, theta) = exp(skew(k) * theta), k unit length.
template <class Derived, class S = typename Derived::Scalar>
Mat3<S> rot(const Eigen::MatrixBase<Derived>& k, S theta) {
  const S c = std::cos(theta), s = std::sin(theta);
  Mat3<S> kx = skew(k);
  return Mat3<S>::Identity() + s * kx + (S(1) - c) * (kx * kx);
}

// Wrap to the half-open interval (-pi, pi]; -pi maps to +pi.
template <class S>
S wrap_to_pi(S theta) {
  S r = std::fmod(theta + S(kPi), S(2) * S(kPi));
  if (r < S(0)) r += S(2) * S(kPi);
  r -= S(kPi);
  return r == S(-kPi) ? S(kPi) : r;
}

// Rotation angle of R about a known axis k (R assumed to be rot(k, theta)
// up to noise); probe is any unit vector not collinear with k.
inline double axis_angle_about(const Mat3d& R, const Vec3d& k) {
  Vec3d probe = std::abs(k.x()) < 0.9 ? Vec3d::UnitX() : Vec3d::UnitY();
  Vec3d p = (probe - k * k.dot(probe)).normalized();
  Vec3d q = R * p;
  return std::atan2(k.dot(p.cross(q)), p.dot(q - k * k.dot(q)));
}

// ---------------------------------------------------------------------------
// Subproblem 1: rot(k, theta) * p1 = p2. Returns the least-squares minimizer
// of ||rot(k,theta) p1 - p2||; exact iff the residual is small.

struct Sp1Result {
  double theta = 0.0;
  bool least_squares = false;
  bool degenerate = false;  // p1 (or p2) collinear with k: theta arbitrary
};

inline Sp1Result subproblem1(const Vec3d& p1, const Vec3d& p2, const Vec3d& k) {
  Sp1Result r;
  const double scale = std::max({1.0, p1.norm(), p2.norm()});
  Vec3d u = p1 - k * k.dot(p1);
  Vec3d v = p2 - k * k.dot(p2);
  if (u.norm() <= 1e-12 * scale || v.norm() <= 1e-12 * scale) {
    r.degenerate = true;
    r.least_squares = true;
    r.theta = 0.0;
    return r;
  }
  r.theta = std::atan2(k.dot(p1.cross(p2)), u.dot(v));
  const double resid = (rot(k, r.theta) * p1 - p2).norm();
  r.least_squares = resid > 1e-8 * scale;
  return r;
}

// ---------------------------------------------------------------------------
// Subproblem 4: h' * rot(k, theta) * p = d. Up to two roots; tangency
// collapses them to one; when no exact root exists the single minimizer is
// returned with least_squares set.

struct Sp4Result {
  double theta[2] = {0.0, 0.0};
  int count = 0;
  bool least_squares = false;
  bool degenerate = false;  // h'rot(k,theta)p constant in theta
};

inline Sp4Result subproblem4(const Vec3d& h, const Vec3d& p, const Vec3d& k,
                             double d) {
  Sp4Result r;
  // h'rot(k,th)p = A sin(th) + B cos(th) + C0
  const double A = h.dot(k.cross(p));
  const double B = h.dot(p) - h.dot(k) * k.dot(p);
  const double C0 = h.dot(k) * k.dot(p);
  const double amp = std::hypot(A, B);
  const double scale = std::max({1.0, p.norm(), std::abs(d)});
  if (amp <= 1e-12 * scale) {
    r.degenerate = true;
    r.least_squares = std::abs(C0 - d) > 1e-8 * scale;
    r.theta[0] = 0.0;
    r.count = 1;
    return r;
  }
  // A sin + B cos = amp * cos(theta - theta0), theta0 = atan2(A, B)
  const double theta0 = std::atan2(A, B);
  const double c = (d - C0) / amp;
  if (c > 1.0 || c < -1.0) {
    const double margin = (std::abs(c) - 1.0) * amp;
    if (margin <= 1e-8 * scale) {
      // tangency within tolerance: double root
      r.theta[0] = wrap_to_pi(c > 0 ? theta0 : theta0 + kPi);
      r.count = 1;
      return r;
    }
    r.least_squares = true;
    r.theta[0] = wrap_to_pi(c > 0 ? theta0 : theta0 + kPi);
    r.count = 1;
    return r;
  }
  const double delta = std::acos(std::clamp(c, -1.0, 1.0));
  r.theta[0] = wrap_to_pi(theta0 + delta);
  r.count = 1;
  if (delta > 1e-9 && delta < kPi - 1e-9) {
    r.theta[1] = wrap_to_pi(theta0 - delta);
    r.count = 2;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quartic roots (possibly degree-deflated). Ferrari's method with a companion
// matrix fallback when the closed form loses accuracy.

struct PolyRoots {
  std::complex<double> z[4];
  int count = 0;
};

namespace detail {

inline std::complex<double> poly_eval(const double* c, int deg,
                                      std::complex<double> x) {
  std::complex<double> v = c[0];
  for (int i = 1; i <= deg; ++i) v = v * x + c[i];
  return v;
}

// One or two Newton steps tighten roots from either solver path.
inline void poly_polish(const double* c, int deg, std::complex<double>& x) {
  for (int it = 0; it < 2; ++it) {
    std::complex<double> f = c[0], df = 0.0;
    for (int i = 1; i <= deg; ++i) {
      df = df * x + f;
      f = f * x + c[i];
    }
    if (std::abs(df) < 1e-300) break;
    x -= f / df;
  }
}

inline PolyRoots companion_roots(const double* c, int deg) {
  PolyRoots out;
  if (deg <= 0) return out;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) C(0, i) = -c[i + 1] / c[0];
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  for (int i = 0; i < deg; ++i) out.z[out.count++] = es.eigenvalues()(i);
  return out;
}

}  // namespace detail

// Roots of c[0] x^4 + c[1] x^3 + c[2] x^2 + c[3] x + c[4], with leading
// coefficients below tol treated as zero (degree deflation).
inline PolyRoots quartic_roots(const double c_in[5]) {
  using C = std::complex<double>;
  PolyRoots out;
  double maxc = 0.0;
  for (int i = 0; i < 5; ++i) maxc = std::max(maxc, std::abs(c_in[i]));
  if (maxc == 0.0) return out;
  int lead = 0;
  while (lead < 4 && std::abs(c_in[lead]) <= 1e-13 * maxc) ++lead;
  const double* c = c_in + lead;
  const int deg = 4 - lead;
  if (deg == 0) return out;
  if (deg == 1) {
    out.z[out.count++] = C(-c[1] / c[0]);
    return out;
  }
  if (deg == 2) {
    const double a = c[0], b = c[1], cc = c[2];
    C disc = C(b * b - 4 * a * cc);
    C sq = std::sqrt(disc);
    // avoid cancellation: compute the larger-magnitude root first
    C q = -0.5 * (b >= 0 ? (C(b) + sq) : (C(b) - sq));
    out.z[out.count++] = q / a;
    out.z[out.count++] = std::abs(q) > 0 ? C(cc) / q : C(0);
    return out;
  }
  if (deg == 3) {
    out = detail::companion_roots(c, 3);
    for (int i = 0; i < out.count; ++i) detail::poly_polish(c, 3, out.z[i]);
    return out;
  }
  // Ferrari. Normalize to monic x^4 + a x^3 + b x^2 + cc x + d.
  const double a = c[1] / c[0], b = c[2] / c[0], cc = c[3] / c[0],
               d = c[4] / c[0];
  // depressed: y^4 + p y^2 + q y + r, x = y - a/4
  const double a2 = a * a;
  const double p = b - 3.0 / 8.0 * a2;
  const double q = cc - 0.5 * a * b + a2 * a / 8.0;
  const double r = d - 0.25 * a * cc + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
  const double shift = -a / 4.0;
  if (std::abs(q) <= 1e-13 * (1.0 + std::abs(p) + std::abs(r))) {
    // biquadratic
    C disc = C(p * p - 4 * r);
    C sq = std::sqrt(disc);
    C u1 = 0.5 * (-p + sq), u2 = 0.5 * (-p - sq);
    C s1 = std::sqrt(u1), s2 = std::sqrt(u2);
    out.z[out.count++] = s1 + shift;
    out.z[out.count++] = -s1 + shift;
    out.z[out.count++] = s2 + shift;
    out.z[out.count++] = -s2 + shift;
  } else {
    // resolvent cubic 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0 has a
    // positive real root; take the largest real root for stability.
    const double rc[4] = {8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q};
    PolyRoots cub = detail::companion_roots(rc, 3);
    for (int i = 0; i < cub.count; ++i) detail::poly_polish(rc, 3, cub.z[i]);
    double m = -1.0;
    for (int i = 0; i < cub.count; ++i)
      if (std::abs(cub.z[i].imag()) <= 1e-8 * (1.0 + std::abs(cub.z[i].real())))
        m = std::max(m, cub.z[i].real());
    if (m <= 0.0) {
      out = detail::companion_roots(c, 4);
      for (int i = 0; i < out.count; ++i) detail::poly_polish(c, 4, out.z[i]);
      return out;
    }
    const double s = std::sqrt(2.0 * m);
    // y^4 + p y^2 + q y + r = (y^2 + s y + w1)(y^2 - s y + w2)
    const double w1 = p / 2.0 + m - q / (2.0 * s);
    const double w2 = p / 2.0 + m + q / (2.0 * s);
    C d1 = std::sqrt(C(s * s - 4.0 * w1));
    C d2 = std::sqrt(C(s * s - 4.0 * w2));
    out.z[out.count++] = 0.5 * (C(-s) + d1) + shift;
    out.z[out.count++] = 0.5 * (C(-s) - d1) + shift;
    out.z[out.count++] = 0.5 * (C(s) + d2) + shift;
    out.z[out.count++] = 0.5 * (C(s) - d2) + shift;
  }
  for (int i = 0; i < out.count; ++i) detail::poly_polish(c, 4, out.z[i]);
  // closed form occasionally loses digits on near-degenerate inputs;
  // fall back to the companion matrix when residuals are off
  double worst = 0.0;
  for (int i = 0; i < out.count; ++i) {
    double mag = std::abs(out.z[i]);
    double denom = maxc * std::max(1.0, mag * mag * mag * mag);
    worst = std::max(worst, std::abs(detail::poly_eval(c, 4, out.z[i])) / denom);
  }
  if (worst > 1e-9) {
    out = detail::companion_roots(c, 4);
    for (int i = 0; i < out.count; ++i) detail::poly_polish(c, 4, out.z[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subproblem 5: p0 + rot(k1,th1) p1 = rot(k2,th2) (p2 + rot(k3,th3) p3).
// Up to four isolated solutions.

struct Sp5Triple {
  double theta1, theta2, theta3;
};

struct Sp5Candidate {
  double theta1, theta2, theta3;
  double imag = 0.0;      // relative imaginary part of the originating root
  double residual = 0.0;  // equation residual at the (refined) angles
};

struct Sp5Result {
  std::vector<Sp5Triple> triples;
  bool degenerate = false;  // a solution continuum (not isolated roots)
};

namespace detail {

// Scalar equations after eliminating theta2: the k2-component and the squared
// norm of both sides. Side i contributes a_i cos + b_i sin + c_i (projection)
// and e_i cos + f_i sin (+ const, folded into K) (norm).
struct Sp5Side {
  double a, b, c, e, f, g, n;
  void init(const Vec3d& pc, const Vec3d& pr, const Vec3d& k, const Vec3d& k2) {
    // pc + rot(k, th) pr, projected on k2 / squared
    a = k2.dot(pr - k * k.dot(pr));
    b = k2.dot(k.cross(pr));
    c = k2.dot(pc) + k2.dot(k) * k.dot(pr);
    e = pc.dot(pr - k * k.dot(pr));
    f = pc.dot(k.cross(pr));
    g = pc.dot(k) * k.dot(pr);
    n = pc.squaredNorm() + pr.squaredNorm();
  }
};

struct Sp5Core {
  Sp5Side s1, s3;
  double K = 0.0;
  Vec3d p0, p1, p2, p3, k1, k2, k3;
  double scale = 1.0;

  void init(const Vec3d& p0_, const Vec3d& p1_, const Vec3d& p2_,
            const Vec3d& p3_, const Vec3d& k1_, const Vec3d& k2_,
            const Vec3d& k3_) {
    p0 = p0_; p1 = p1_; p2 = p2_; p3 = p3_; k1 = k1_; k2 = k2_; k3 = k3_;
    s1.init(p0, p1, k1, k2);
    s3.init(p2, p3, k3, k2);
    K = 0.5 * (s1.n + 2 * s1.g - s3.n - 2 * s3.g);
    scale = std::max({1.0, p0.norm(), p1.norm(), p2.norm(), p3.norm()});
  }

  // F(th1, th3) = both scalar equations; used for Newton refinement.
  Eigen::Vector2d F(double t1, double t3) const {
    const double c1 = std::cos(t1), sn1 = std::sin(t1);
    const double c3 = std::cos(t3), sn3 = std::sin(t3);
    return {s1.a * c1 + s1.b * sn1 + s1.c - (s3.a * c3 + s3.b * sn3 + s3.c),
            s1.e * c1 + s1.f * sn1 + K - (s3.e * c3 + s3.f * sn3)};
  }

  Eigen::Matrix2d J(double t1, double t3) const {
    const double c1 = std::cos(t1), sn1 = std::sin(t1);
    const double c3 = std::cos(t3), sn3 = std::sin(t3);
    Eigen::Matrix2d j;
    j << -s1.a * sn1 + s1.b * c1, s3.a * sn3 - s3.b * c3,
        -s1.e * sn1 + s1.f * c1, s3.e * sn3 - s3.f * c3;
    return j;
  }

  bool newton(double& t1, double& t3, int iters = 20) const {
    for (int i = 0; i < iters; ++i) {
      Eigen::Vector2d f = F(t1, t3);
      Eigen::Matrix2d j = J(t1, t3);
      const double det = j.determinant();
      if (std::abs(det) < 1e-14 * scale * scale) return false;
      Eigen::Vector2d dt = j.inverse() * (-f);
      t1 += dt(0);
      t3 += dt(1);
      if (dt.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    return true;
  }

  // theta2 aligning rot(k2, th2) * rhs onto lhs about k2.
  double solve_theta2(double t1, double t3) const {
    Vec3d lhs = p0 + rot(k1, t1) * p1;
    Vec3d rhs = p2 + rot(k3, t3) * p3;
    Vec3d lp = lhs - k2 * k2.dot(lhs);
    Vec3d rp = rhs - k2 * k2.dot(rhs);
    return std::atan2(k2.dot(rhs.cross(lhs)), rp.dot(lp));
  }

  double equation_residual(double t1, double t2, double t3) const {
    Vec3d lhs = p0 + rot(k1, t1) * p1;
    Vec3d rhs = rot(k2, t2) * (p2 + rot(k3, t3) * p3);
    return (lhs - rhs).norm();
  }

  // Enumerate candidate (th1, th2, th3) triples. Roots of the elimination
  // quartic with relative imaginary part up to imag_tol are kept so callers
  // can seed searches across fold boundaries; exact solutions are the subset
  // with small residuals. eliminate_first: express (cos th3, sin th3) in
  // terms of th1 (quartic in tan(th1/2)); otherwise the mirror image.
  void candidates(std::vector<Sp5Candidate>& out, double imag_tol,
                  bool refine) const {
    const double det1 = s1.a * s1.f - s1.b * s1.e;
    const double det3 = s3.a * s3.f - s3.b * s3.e;
    const bool eliminate_first = std::abs(det3) >= std::abs(det1);
    const Sp5Side& sa = eliminate_first ? s1 : s3;  // side kept as the unknown
    const Sp5Side& sb = eliminate_first ? s3 : s1;  // side solved linearly
    const double det = eliminate_first ? det3 : det1;
    if (std::abs(det) < 1e-12 * scale * scale) return;
    // [cos_b; sin_b] = (A cos_a + B sin_a + D)
    const double i00 = sb.f / det, i01 = -sb.b / det;
    const double i10 = -sb.e / det, i11 = sb.a / det;
    const double ka = eliminate_first ? (s1.c - s3.c) : (s3.c - s1.c);
    const double kb = eliminate_first ? K : -K;
    Eigen::Vector2d A(i00 * sa.a + i01 * sa.e, i10 * sa.a + i11 * sa.e);
    Eigen::Vector2d B(i00 * sa.b + i01 * sa.f, i10 * sa.b + i11 * sa.f);
    Eigen::Vector2d D(i00 * ka + i01 * kb, i10 * ka + i11 * kb);
    // cos_b (1+t^2) = (D-A)(0) t^2 + 2 B(0) t + (A+D)(0), same for sin_b;
    // unit circle: u^2 + v^2 = (1+t^2)^2
    const double u2 = D(0) - A(0), u1 = 2 * B(0), u0 = D(0) + A(0);
    const double v2 = D(1) - A(1), v1 = 2 * B(1), v0 = D(1) + A(1);
    const double quart[5] = {u2 * u2 + v2 * v2 - 1.0,
                             2 * (u2 * u1 + v2 * v1),
                             2 * (u2 * u0 + v2 * v0) + u1 * u1 + v1 * v1 - 2.0,
                             2 * (u1 * u0 + v1 * v0),
                             u0 * u0 + v0 * v0 - 1.0};
    PolyRoots roots = quartic_roots(quart);
    double maxq = 0.0;
    for (double qc : quart) maxq = std::max(maxq, std::abs(qc));
    const bool lead_small = std::abs(quart[0]) <= 1e-9 * maxq;

    auto push = [&](double ta, double rel_imag) {
      const double ca = std::cos(ta), sn = std::sin(ta);
      Eigen::Vector2d cb = A * ca + B * sn + D;
      double tb = std::atan2(cb(1), cb(0));
      double t1 = eliminate_first ? ta : tb;
      double t3 = eliminate_first ? tb : ta;
      // Newton refinement only near real roots; across a fold (complex pair)
      // there is no nearby real solution and the iteration diverges.
      if (refine && rel_imag < 1e-7) newton(t1, t3);
      const double t2 = solve_theta2(t1, t3);
      Sp5Candidate cand;
      cand.theta1 = wrap_to_pi(t1);
      cand.theta2 = wrap_to_pi(t2);
      cand.theta3 = wrap_to_pi(t3);
      cand.imag = rel_imag;
      cand.residual = equation_residual(t1, t2, t3);
      out.push_back(cand);
    };

    for (int i = 0; i < roots.count; ++i) {
      const double re = roots.z[i].real(), im = std::abs(roots.z[i].imag());
      const double rel = im / (1.0 + std::abs(re));
      if (rel > imag_tol) continue;
      push(2.0 * std::atan(re), rel);
    }
    if (lead_small) push(kPi, 0.0);  // tan blow-up: theta = pi root
  }
};

}  // namespace detail

inline Sp5Result subproblem5(const Vec3d& p0, const Vec3d& p1, const Vec3d& p2,
                             const Vec3d& p3, const Vec3d& k1, const Vec3d& k2,
                             const Vec3d& k3) {
  Sp5Result result;
  detail::Sp5Core core;
  core.init(p0, p1, p2, p3, k1, k2, k3);
  // continuum cases: a rotation that never moves its vector
  const double s = core.scale;
  if (p1.cross(k1).norm() <= 1e-12 * s || p3.cross(k3).norm() <= 1e-12 * s) {
    result.degenerate = true;
  }
  std::vector<Sp5Candidate> cands;
  core.candidates(cands, 1e-7, true);
  for (const Sp5Candidate& c : cands) {
    if (c.residual > 1e-8 * std::max(1.0, s)) continue;
    bool dup = false;
    for (const Sp5Triple& t : result.triples) {
      if (std::abs(wrap_to_pi(t.theta1 - c.theta1)) < 1e-6 &&
          std::abs(wrap_to_pi(t.theta2 - c.theta2)) < 1e-6 &&
          std::abs(wrap_to_pi(t.theta3 - c.theta3)) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) result.triples.push_back({c.theta1, c.theta2, c.theta3});
  }
  return result;
}

}  // namespace yumik
