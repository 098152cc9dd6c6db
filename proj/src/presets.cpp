#include "exodyad/presets.hpp"

#include <sstream>

namespace exodyad {

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"nc",          "soft",      "hard",
                                                 "hard-hip30",  "hard-knee20", "uni-joint",
                                                 "uni-task-static"};
  return names;
}

namespace dyad {

ImpedanceParams impedance() {
  ImpedanceParams p;
  p.phase_gain = phase_gain;
  return p;
}

}  // namespace dyad

namespace uni_joint {

// Least-squares fit (offline, 1000 phase samples) of the left-leg curves to the
// enlarged default swing path. Points of the enlarged path beyond the 0.9 m leg
// reach are pulled radially back onto the reachable disc before fitting.
LegCurves leader_left_curves() {
  LegCurves c;
  c.hip.offset = 0.2139006194;
  c.hip.amplitude = 0.4944401295;
  c.hip.peak_phase = 0.8595980786;
  c.hip.harmonic = 0.0393801022;
  c.hip.harmonic_phase = 0.8734982075;
  c.knee.offset = 0.5971572800;
  c.knee.amplitude = 0.5971572800;
  c.knee.stance_weight = 0.3137739517;
  c.knee.stance_center = 0.0907468659;
  c.knee.stance_width = 0.2768294396;
  c.knee.swing_center = 0.6635606398;
  c.knee.swing_width = 0.5334316357;
  return c;
}

GaitPattern leader_pattern(double cadence) {
  GaitPattern g = default_gait(cadence);
  g.legs[index(Side::left)] = leader_left_curves();
  return g;
}

}  // namespace uni_joint

namespace task_static {

Vec4 base_pose() {
  Vec4 q;
  q << deg2rad(5.0), deg2rad(10.0), 0.0, deg2rad(90.0);
  return q;
}

Vec4 leader_pose() {
  const BodyGeometry body;
  Vec5 gen;
  gen << 0.0, base_pose();
  const Vec2 start = forward_kinematics(gen, Side::right, body);
  const Vec2 hk = swing_leg_ik(gen, Side::right, body, start + Vec2(0.0, lift));
  Vec4 q = base_pose();
  q[hip_of(Side::right)] = hk[0];
  q[knee_of(Side::right)] = hk[1];
  return q;
}

}  // namespace task_static

namespace {

// A pattern with zero range of motion that holds `pose`.
GaitPattern holding(const Vec4& pose) {
  GaitPattern g = default_gait(default_cadence(dyad::treadmill_speed_kmh));
  g.set_rom_scale(0.0);
  for (Side s : {Side::left, Side::right}) {
    g.legs[index(s)].hip.offset = pose[hip_of(s)];
    g.legs[index(s)].knee.offset = pose[knee_of(s)];
  }
  return g;
}

Scenario walking_dyad(const std::string& label) {
  Scenario s;
  s.label = label;
  s.treadmill_speed_kmh = dyad::treadmill_speed_kmh;
  const double cadence = default_cadence(dyad::treadmill_speed_kmh);

  AgentConfig& a = s.agent(User::a);
  a.pattern = default_gait(cadence);
  a.impedance = dyad::impedance();

  AgentConfig& b = s.agent(User::b);
  b.pattern = default_gait(cadence * dyad::cadence_b_ratio);
  b.pattern.set_rom_scale(dyad::rom_scale_b);
  b.impedance = dyad::impedance();
  b.initial_phase = dyad::initial_phase_b;
  return s;
}

void joint_profile(Scenario& s, double k, double c) {
  s.coupling.space = CouplingSpace::joint;
  s.coupling.mode = CouplingMode::bidirectional;
  s.coupling.joint.stiffness = Vec4::Constant(k);
  s.coupling.joint.damping = Vec4::Constant(c);
}

}  // namespace

Scenario preset(const std::string& name) {
  if (name == "nc") return walking_dyad(name);
  if (name == "soft") {
    Scenario s = walking_dyad(name);
    joint_profile(s, 30.0, 4.0);
    return s;
  }
  if (name == "hard" || name == "hard-hip30" || name == "hard-knee20") {
    Scenario s = walking_dyad(name);
    joint_profile(s, 70.0, 10.0);
    if (name == "hard-hip30")
      s.coupling.joint.neutral << deg2rad(30.0), 0.0, deg2rad(30.0), 0.0;
    if (name == "hard-knee20")
      s.coupling.joint.neutral << 0.0, deg2rad(20.0), 0.0, deg2rad(20.0);
    return s;
  }
  if (name == "uni-joint") {
    Scenario s = walking_dyad(name);
    s.agent(User::a).pattern = uni_joint::leader_pattern(s.agent(User::a).pattern.cadence);
    joint_profile(s, 100.0, 10.0);
    s.coupling.mode = CouplingMode::uni_a_to_b;
    return s;
  }
  if (name == "uni-task-static") {
    Scenario s;
    s.label = name;
    s.duration = 20.0;
    s.treadmill_speed_kmh = 0.0;
    AgentConfig& leader = s.agent(User::a);
    leader.pattern = holding(task_static::leader_pose());
    leader.fixed_stance = Side::left;
    AgentConfig& follower = s.agent(User::b);
    follower.pattern = holding(task_static::base_pose());
    follower.impedance.kp[hip_of(Side::right)] = task_static::follower_swing_kp;
    follower.impedance.kp[knee_of(Side::right)] = task_static::follower_swing_kp;
    follower.fixed_stance = Side::left;
    s.coupling.space = CouplingSpace::task;
    s.coupling.mode = CouplingMode::uni_a_to_b;
    s.coupling.task.stiffness = Vec2(0.0, 250.0);
    s.coupling.task.damping = Vec2(0.0, 50.0);
    return s;
  }
  std::ostringstream msg;
  msg << "unknown preset '" << name << "'; available presets:";
  for (const auto& n : preset_names()) msg << ' ' << n;
  throw UnknownPreset(msg.str());
}

}  // namespace exodyad
