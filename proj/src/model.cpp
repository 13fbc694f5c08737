#include "yumik/model.hpp"

#include "json.hpp"

#include <fstream>
#include <stdexcept>

namespace yumik {

KinematicParams yumi_params() {
  KinematicParams p;
  p.p_link[0] = {0.0, 0.0, 306.0};
  p.p_link[1] = {-30.0, 0.0, 0.0};
  p.p_link[2] = {30.0, 0.0, 0.0};
  p.p_link[3] = {40.5, 0.0, 251.5};
  p.p_link[4] = {0.0, 0.0, 40.5};
  p.p_link[5] = {265.0, 0.0, -27.0};
  p.p_link[6] = {0.0, 0.0, 27.0};
  p.p_7T = {36.0, 0.0, 0.0};
  p.h[0] = Vec3d::UnitZ();
  p.h[1] = Vec3d::UnitY();
  p.h[2] = Vec3d::UnitZ();
  p.h[3] = Vec3d::UnitY();
  p.h[4] = Vec3d::UnitX();
  p.h[5] = Vec3d::UnitY();
  p.h[6] = Vec3d::UnitX();
  p.R_7T = rot(Vec3d::UnitY(), kPi / 2);
  return p;
}

JointLimits yumi_joint_limits() {
  JointLimits l;
  l.q_min << -168.5, -143.5, -168.5, -123.5, -290.0, -88.0, -229.0;
  l.q_max << 168.5, 43.5, 168.5, 80.0, 290.0, 138.0, 229.0;
  l.q_min *= kPi / 180.0;
  l.q_max *= kPi / 180.0;
  return l;
}

RobotModel yumi_model() { return {yumi_params(), yumi_joint_limits()}; }

FrameChain forward_kinematics(const KinematicParams& params,
                              const JointVector& q) {
  FrameChain c;
  c.R0i[0] = Mat3d::Identity();
  c.O[0] = Vec3d::Zero();
  for (int i = 0; i < 7; ++i) {
    c.O[i + 1] = c.O[i] + c.R0i[i] * params.p_link[i];
    c.R0i[i + 1] = c.R0i[i] * rot(params.h[i], q(i));
  }
  c.tool.R = c.R0i[7] * params.R_7T;
  c.tool.p = c.O[7] + c.R0i[7] * params.p_7T;
  return c;
}

Pose wrist_pose(const KinematicParams& params, const Pose& tool) {
  Pose w;
  w.R = tool.R * params.R_7T.transpose();
  w.p = tool.p - w.R * params.p_7T;
  return w;
}

SewGeometry sew_geometry(const FrameChain& chain, const Vec3d& h4) {
  SewGeometry g;
  g.O_S = chain.O[1];
  g.O_W = chain.O[7];
  g.p_SW = g.O_W - g.O_S;
  const double n = g.p_SW.norm();
  if (n <= 1e-9) {
    throw std::domain_error(
        "sew_geometry: shoulder and wrist coincide (unreachable geometry)");
  }
  g.e_SW = g.p_SW / n;
  g.h4_0 = chain.R0i[3] * h4;
  return g;
}

namespace {
// PoE index of each RobotStudio slot: axis 3 is listed last.
constexpr int kRsFromPoe[7] = {0, 1, 3, 4, 5, 6, 2};
}  // namespace

JointVector to_robotstudio_order(const JointVector& q) {
  JointVector out;
  for (int i = 0; i < 7; ++i) out(i) = q(kRsFromPoe[i]);
  return out;
}

JointVector from_robotstudio_order(const JointVector& q_rs) {
  JointVector out;
  for (int i = 0; i < 7; ++i) out(kRsFromPoe[i]) = q_rs(i);
  return out;
}

LimitCheck within_limits(const JointVector& q, const JointLimits& limits) {
  LimitCheck c;
  for (int i = 0; i < 7; ++i) {
    c.violation[i] = q(i) < limits.q_min(i) || q(i) > limits.q_max(i);
    c.ok = c.ok && !c.violation[i];
  }
  return c;
}

std::vector<JointVector> enumerate_2pi_shifts(const JointVector& q,
                                              const JointLimits& limits) {
  auto windings = [&](int j) {
    std::vector<double> vals;
    for (int n = -2; n <= 2; ++n) {
      const double v = q(j) + 2 * kPi * n;
      if (v >= limits.q_min(j) && v <= limits.q_max(j)) vals.push_back(v);
    }
    return vals;
  };
  std::vector<JointVector> out;
  for (double q5 : windings(4)) {
    for (double q7 : windings(6)) {
      JointVector s = q;
      s(4) = q5;
      s(6) = q7;
      if (within_limits(s, limits).ok) out.push_back(s);
    }
  }
  return out;
}

namespace {

nlohmann::json vec_to_json(const Vec3d& v) {
  return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Vec3d vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("expected length-3 array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

RobotModel load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);
  nlohmann::json j;
  in >> j;
  RobotModel m;
  const auto& pl = j.at("p_link");
  const auto& h = j.at("h");
  if (pl.size() != 7 || h.size() != 7)
    throw std::invalid_argument("p_link and h must have 7 rows");
  for (int i = 0; i < 7; ++i) {
    m.params.p_link[i] = vec_from_json(pl[i]);
    m.params.h[i] = vec_from_json(h[i]).normalized();
  }
  m.params.p_7T = vec_from_json(j.at("p_7T"));
  const auto& r = j.at("R_7T");
  if (r.size() != 3) throw std::invalid_argument("R_7T must have 3 rows");
  for (int i = 0; i < 3; ++i) {
    Vec3d row = vec_from_json(r[i]);
    m.params.R_7T.row(i) = row.transpose();
  }
  const auto& qmin = j.at("q_min_deg");
  const auto& qmax = j.at("q_max_deg");
  if (qmin.size() != 7 || qmax.size() != 7)
    throw std::invalid_argument("q_min_deg and q_max_deg must have 7 entries");
  for (int i = 0; i < 7; ++i) {
    m.limits.q_min(i) = deg2rad(qmin[i].get<double>());
    m.limits.q_max(i) = deg2rad(qmax[i].get<double>());
    if (m.limits.q_min(i) >= m.limits.q_max(i))
      throw std::invalid_argument("joint limits must satisfy q_min < q_max");
  }
  return m;
}

void save_model_json(const RobotModel& model, const std::string& path) {
  nlohmann::json j;
  for (int i = 0; i < 7; ++i) {
    j["p_link"].push_back(vec_to_json(model.params.p_link[i]));
    j["h"].push_back(vec_to_json(model.params.h[i]));
    j["q_min_deg"].push_back(rad2deg(model.limits.q_min(i)));
    j["q_max_deg"].push_back(rad2deg(model.limits.q_max(i)));
  }
  j["p_7T"] = vec_to_json(model.params.p_7T);
  for (int i = 0; i < 3; ++i)
    j["R_7T"].push_back(vec_to_json(model.params.R_7T.row(i).transpose()));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write parameter file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace yumik
