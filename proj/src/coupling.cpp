#include "exodyad/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace exodyad {

std::string to_string(CouplingSpace s) { return s == CouplingSpace::joint ? "joint" : "task"; }

std::string to_string(CouplingMode m) {
  switch (m) {
    case CouplingMode::none: return "none";
    case CouplingMode::bidirectional: return "bidirectional";
    case CouplingMode::uni_a_to_b: return "uni_a_to_b";
    case CouplingMode::uni_b_to_a: return "uni_b_to_a";
    case CouplingMode::asymmetric: return "asymmetric";
  }
  return "none";
}

CouplingSpace parse_coupling_space(const std::string& s) {
  if (s == "joint") return CouplingSpace::joint;
  if (s == "task") return CouplingSpace::task;
  throw InvalidInput("unknown coupling space '" + s + "' (expected joint|task)");
}

CouplingMode parse_coupling_mode(const std::string& s) {
  for (CouplingMode m : {CouplingMode::none, CouplingMode::bidirectional, CouplingMode::uni_a_to_b,
                         CouplingMode::uni_b_to_a, CouplingMode::asymmetric})
    if (to_string(m) == s) return m;
  throw InvalidInput("unknown coupling mode '" + s +
                     "' (expected none|bidirectional|uni_a_to_b|uni_b_to_a|asymmetric)");
}

namespace {

template <typename V>
void check_gains(const V& stiffness, const V& damping, const std::string& prefix, bool competitive,
                 std::vector<std::string>& out, std::vector<std::string>* warnings) {
  for (int i = 0; i < stiffness.size(); ++i) {
    const std::string k = prefix + "stiffness[" + std::to_string(i) + "]";
    const std::string c = prefix + "damping[" + std::to_string(i) + "]";
    if (!std::isfinite(stiffness[i])) out.push_back(k + " is not finite");
    else if (stiffness[i] < 0.0) {
      if (!competitive)
        out.push_back(k + " is negative; negative stiffness requires coupling.competitive = true");
      else if (warnings)
        warnings->push_back(k + " is negative (competitive coupling, no stability guarantee)");
    }
    if (!std::isfinite(damping[i])) out.push_back(c + " is not finite");
    else if (damping[i] < 0.0) out.push_back(c + " must be >= 0");
  }
}

}  // namespace

std::vector<std::string> check(const CouplingConfig& cfg, std::vector<std::string>* warnings) {
  std::vector<std::string> out;
  check_gains(cfg.joint.stiffness, cfg.joint.damping, "coupling.joint.", cfg.competitive, out, warnings);
  check_gains(cfg.task.stiffness, cfg.task.damping, "coupling.task.", cfg.competitive, out, warnings);
  if (!cfg.joint.neutral.allFinite()) out.push_back("coupling.joint.neutral is not finite");
  if (!cfg.task.neutral.allFinite()) out.push_back("coupling.task.neutral is not finite");
  if (cfg.mode == CouplingMode::asymmetric) {
    if (!cfg.asymmetric) {
      out.push_back("coupling.asymmetric gain set is required in asymmetric mode");
    } else {
      const AsymmetricGains& g = *cfg.asymmetric;
      check_gains(g.joint_stiffness, g.joint_damping, "coupling.asymmetric.joint_", cfg.competitive,
                  out, warnings);
      check_gains(g.task_stiffness, g.task_damping, "coupling.asymmetric.task_", cfg.competitive,
                  out, warnings);
    }
  }
  return out;
}

JointCouplingResult joint_coupling(const AgentState& a, const AgentState& b, const JointGains& g) {
  require_finite(a.q, "state A q");
  require_finite(b.q, "state B q");
  require_finite(a.qdot, "state A qdot");
  require_finite(b.qdot, "state B qdot");
  JointCouplingResult r;
  r.raw = g.stiffness.cwiseProduct(a.q - b.q - g.neutral) + g.damping.cwiseProduct(a.qdot - b.qdot);
  r.on_a = -r.raw;
  r.on_b = r.raw;
  return r;
}

TaskCouplingResult task_coupling(const AgentState& a, const AgentState& b,
                                 std::optional<Side> stance_a, std::optional<Side> stance_b,
                                 const TaskGains& g, const BodyGeometry& body_a,
                                 const BodyGeometry& body_b) {
  if (!stance_a || !stance_b) throw InvalidInput("task coupling needs a stance leg for both users");
  const Side swing_a = other(*stance_a), swing_b = other(*stance_b);
  const Vec5 gen_a = a.generalized(), gen_b = b.generalized();
  const Mat25 Ja = swing_jacobian(gen_a, swing_a, body_a);
  const Mat25 Jb = swing_jacobian(gen_b, swing_b, body_b);

  TaskCouplingResult r;
  r.ankle_a = forward_kinematics(gen_a, swing_a, body_a);
  r.ankle_b = forward_kinematics(gen_b, swing_b, body_b);
  r.ankle_vel_a = Ja * a.generalized_velocity();
  r.ankle_vel_b = Jb * b.generalized_velocity();
  r.force = g.stiffness.cwiseProduct(r.ankle_a - r.ankle_b - g.neutral) +
            g.damping.cwiseProduct(r.ankle_vel_a - r.ankle_vel_b);
  r.force_on_a = -r.force;
  r.force_on_b = r.force;
  r.on_a = Ja.transpose() * r.force_on_a;
  r.on_b = Jb.transpose() * r.force_on_b;
  return r;
}

TorquePair apply_directionality(const TorquePair& primary, CouplingMode mode,
                                const TorquePair* designated, User felt_by) {
  TorquePair out = primary;
  switch (mode) {
    case CouplingMode::none:
      out.a.setZero();
      out.b.setZero();
      break;
    case CouplingMode::bidirectional:
      break;
    case CouplingMode::uni_a_to_b:
      out.a.setZero();
      break;
    case CouplingMode::uni_b_to_a:
      out.b.setZero();
      break;
    case CouplingMode::asymmetric:
      if (!designated) throw InvalidInput("asymmetric mode needs the second gain set");
      if (felt_by == User::a) out.a = designated->a;
      else out.b = designated->b;
      break;
  }
  return out;
}

namespace {

TorquePair primary_torques(const CouplingInputs& in, CouplingSpace space, const JointGains& jg,
                           const TaskGains& tg) {
  TorquePair t;
  if (space == CouplingSpace::joint) {
    const JointCouplingResult r = joint_coupling(in.a, in.b, jg);
    t.a.tail<4>() = r.on_a;
    t.b.tail<4>() = r.on_b;
  } else {
    const TaskCouplingResult r =
        task_coupling(in.a, in.b, in.stance_a, in.stance_b, tg, in.body_a, in.body_b);
    t.a = r.on_a;
    t.b = r.on_b;
  }
  return t;
}

}  // namespace

TorquePair desired_torques(const CouplingInputs& in, const CouplingConfig& cfg) {
  if (cfg.mode == CouplingMode::none) return {};
  const TorquePair primary = primary_torques(in, cfg.space, cfg.joint, cfg.task);
  if (cfg.mode != CouplingMode::asymmetric) return apply_directionality(primary, cfg.mode);
  if (!cfg.asymmetric) throw InvalidInput("asymmetric mode needs the second gain set");

  const AsymmetricGains& alt = *cfg.asymmetric;
  JointGains jg = cfg.joint;
  jg.stiffness = alt.joint_stiffness;
  jg.damping = alt.joint_damping;
  TaskGains tg = cfg.task;
  tg.stiffness = alt.task_stiffness;
  tg.damping = alt.task_damping;
  const TorquePair designated = primary_torques(in, cfg.space, jg, tg);
  return apply_directionality(primary, cfg.mode, &designated, alt.felt_by);
}

// ---------------------------------------------------------------------------

std::vector<std::string> check(const RenderLimits& limits) {
  std::vector<std::string> out;
  auto nonneg = [&](const Vec4& v, const std::string& name) {
    for (int j = 0; j < 4; ++j)
      if (std::isnan(v[j]) || v[j] < 0.0)
        out.push_back("limits." + name + "[" + std::to_string(j) + "] must be >= 0");
  };
  nonneg(limits.tau_max, "tau_max");
  nonneg(limits.qdot_max, "qdot_max");
  nonneg(limits.p_max, "p_max");
  if (!std::isfinite(limits.lag_tau) || limits.lag_tau < 0.0)
    out.push_back("limits.lag_tau must be finite and >= 0");
  return out;
}

bool RenderFlags::any() const {
  for (int j = 0; j < 4; ++j)
    if (torque[j] || power[j] || velocity[j]) return true;
  return false;
}

RenderResult render(const Vec4& tau_des, const AgentState& state, const RenderLimits& limits,
                    const Vec4& prev_applied, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("dt must be > 0");
  require_finite(tau_des, "desired torque");
  require_finite(prev_applied, "previous applied torque");
  require_finite(state.qdot, "joint velocity");
  require_finite(limits.lag_tau, "lag_tau");

  RenderResult out;
  if (limits.lag_tau == 0.0) {
    out.applied = tau_des;
  } else {
    const double alpha = dt / (limits.lag_tau + dt);
    out.applied = prev_applied + alpha * (tau_des - prev_applied);
  }

  for (int j = 0; j < 4; ++j) {
    double& tau = out.applied[j];
    const double w = state.qdot[j];
    if (std::abs(tau) > limits.tau_max[j]) {
      tau = std::copysign(limits.tau_max[j], tau);
      out.flags.torque[j] = true;
    }
    // Power clamp is only active above the corner speed p_max / tau_max.
    if (std::isfinite(limits.p_max[j]) && std::abs(w) > limits.p_max[j] / limits.tau_max[j]) {
      const double cap = limits.p_max[j] / std::abs(w);
      if (std::abs(tau) > cap) {
        tau = std::copysign(cap, tau);
        out.flags.power[j] = true;
      }
    }
    if (std::abs(w) > limits.qdot_max[j] && tau * w > 0.0) {
      tau = 0.0;
      out.flags.velocity[j] = true;
    }
  }
  return out;
}

}  // namespace exodyad
