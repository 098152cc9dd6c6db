#include "exodyad/model.hpp"

#include <algorithm>
#include <cmath>

namespace exodyad {

namespace {

Vec2 segment_dir(double theta) { return {std::sin(theta), -std::cos(theta)}; }
Vec2 segment_dir_prime(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct ChainAngles {
  double stance_thigh, stance_shank, swing_thigh, swing_shank;
};

ChainAngles chain_angles(const Vec5& gen, Side swing) {
  const Side stance = other(swing);
  const double phi = gen[0];
  ChainAngles a{};
  a.stance_thigh = phi + gen[1 + hip_of(stance)];
  a.stance_shank = a.stance_thigh - gen[1 + knee_of(stance)];
  a.swing_thigh = phi + gen[1 + hip_of(swing)];
  a.swing_shank = a.swing_thigh - gen[1 + knee_of(swing)];
  return a;
}

void check_inputs(const Vec5& gen, Side swing, const BodyGeometry& body) {
  require_finite(gen, "generalized coordinates");
  if (swing != Side::left && swing != Side::right) throw InvalidInput("unknown swing leg side");
  validate(body.legs[0]);
  validate(body.legs[1]);
}

}  // namespace

void validate(const SegmentParams& p) {
  if (!std::isfinite(p.thigh_len) || p.thigh_len <= 0.0)
    throw InvalidInput("thigh_len must be positive and finite");
  if (!std::isfinite(p.shank_len) || p.shank_len <= 0.0)
    throw InvalidInput("shank_len must be positive and finite");
}

Vec2 hip_position(const Vec5& gen, Side stance_leg, const BodyGeometry& body) {
  const ChainAngles a = chain_angles(gen, other(stance_leg));
  const SegmentParams& st = body.leg(stance_leg);
  return -(st.shank_len * segment_dir(a.stance_shank) + st.thigh_len * segment_dir(a.stance_thigh));
}

Vec2 forward_kinematics(const Vec5& gen, Side swing_leg, const BodyGeometry& body) {
  check_inputs(gen, swing_leg, body);
  const ChainAngles a = chain_angles(gen, swing_leg);
  const SegmentParams& sw = body.leg(swing_leg);
  return hip_position(gen, other(swing_leg), body) + sw.thigh_len * segment_dir(a.swing_thigh) +
         sw.shank_len * segment_dir(a.swing_shank);
}

Mat25 swing_jacobian(const Vec5& gen, Side swing_leg, const BodyGeometry& body) {
  check_inputs(gen, swing_leg, body);
  const Side stance = other(swing_leg);
  const ChainAngles a = chain_angles(gen, swing_leg);
  const SegmentParams& st = body.leg(stance);
  const SegmentParams& sw = body.leg(swing_leg);

  const Vec2 d_stance_shank = st.shank_len * segment_dir_prime(a.stance_shank);
  const Vec2 d_stance_thigh = st.thigh_len * segment_dir_prime(a.stance_thigh);
  const Vec2 d_swing_thigh = sw.thigh_len * segment_dir_prime(a.swing_thigh);
  const Vec2 d_swing_shank = sw.shank_len * segment_dir_prime(a.swing_shank);

  Mat25 J = Mat25::Zero();
  // Every absolute angle moves one-for-one with phi.
  J.col(0) = -d_stance_shank - d_stance_thigh + d_swing_thigh + d_swing_shank;
  J.col(1 + hip_of(stance)) = -d_stance_shank - d_stance_thigh;
  J.col(1 + knee_of(stance)) = d_stance_shank;
  J.col(1 + hip_of(swing_leg)) = d_swing_thigh + d_swing_shank;
  J.col(1 + knee_of(swing_leg)) = -d_swing_shank;
  return J;
}

Vec2 swing_leg_ik(const Vec5& gen, Side swing_leg, const BodyGeometry& body, const Vec2& target) {
  check_inputs(gen, swing_leg, body);
  require_finite(target, "ik target");
  const SegmentParams& sw = body.leg(swing_leg);
  const Vec2 v = target - hip_position(gen, other(swing_leg), body);
  const double dist2 = v.squaredNorm();
  const double lt = sw.thigh_len, ls = sw.shank_len;
  const double c = (dist2 - lt * lt - ls * ls) / (2.0 * lt * ls);
  if (c > 1.0 + 1e-12 || c < -1.0 - 1e-12) throw InvalidInput("ik target out of reach");
  const double knee = std::acos(std::clamp(c, -1.0, 1.0));
  // Angle of v measured from straight down, and of the bent chain relative to its thigh.
  const double alpha = std::atan2(v.x(), -v.y());
  const double beta = std::atan2(-ls * std::sin(knee), lt + ls * std::cos(knee));
  const double thigh = alpha - beta;
  return {thigh - gen[0], knee};
}

double vertical_endpoint_stiffness(const Vec5& gen, Side swing_leg, const BodyGeometry& body,
                                   const Vec4& kp) {
  const Mat25 J = swing_jacobian(gen, swing_leg, body);
  const Eigen::Matrix<double, 2, 4> Jq = J.rightCols<4>();
  const Eigen::Matrix2d compliance = Jq * kp.cwiseInverse().asDiagonal() * Jq.transpose();
  return 1.0 / compliance(1, 1);
}

// ---------------------------------------------------------------------------

Vec5 AgentState::generalized() const {
  Vec5 g;
  g << phi, q;
  return g;
}

Vec5 AgentState::generalized_velocity() const {
  Vec5 g;
  g << 0.0, qdot;
  return g;
}

void validate(const ImpedanceParams& p) {
  for (int j = 0; j < 4; ++j) {
    if (!std::isfinite(p.kp[j]) || p.kp[j] <= 0.0) throw InvalidInput("impedance kp must be > 0");
    if (!std::isfinite(p.inertia[j]) || p.inertia[j] <= 0.0)
      throw InvalidInput("impedance inertia must be > 0");
    if (!std::isfinite(p.kd[j]) || p.kd[j] < 0.0) throw InvalidInput("impedance kd must be >= 0");
    if (!std::isfinite(p.viscous[j]) || p.viscous[j] < 0.0)
      throw InvalidInput("impedance viscous must be >= 0");
  }
  require_finite(p.phase_gain, "impedance phase_gain");
}

void validate(const JointLimits& l) {
  require_finite(l.hip, "hip limits");
  require_finite(l.knee, "knee limits");
  if (l.hip[0] >= l.hip[1] || l.knee[0] >= l.knee[1])
    throw InvalidInput("joint limits must satisfy lower < upper");
}

Support support_from_phase(double phase, const GaitPattern& pattern) {
  const double left = phase - std::floor(phase);
  double right = left + pattern.phase_offset_right;
  right -= std::floor(right);
  const bool left_loaded = left < 0.6;
  const bool right_loaded = right < 0.6;
  if (left_loaded && right_loaded) return Support::double_support;
  return left_loaded ? Support::left_stance : Support::right_stance;
}

Side stance_from_phase(double phase, const GaitPattern& pattern) {
  const double left = phase - std::floor(phase);
  double right = left + pattern.phase_offset_right;
  right -= std::floor(right);
  return left <= right ? Side::left : Side::right;
}

AgentState state_on_reference(double phase, const GaitPattern& pattern, double phi) {
  const ReferenceSample ref = gait_reference(phase, pattern);
  AgentState s;
  s.phi = phi;
  s.q = ref.q;
  s.qdot = ref.qdot;
  s.phase = phase - std::floor(phase);
  s.support = support_from_phase(s.phase, pattern);
  return s;
}

StepResult agent_step_detail(const AgentState& state, const Vec4& tau_applied,
                             const GaitPattern& pattern, const ImpedanceParams& imp, double dt,
                             const JointLimits& limits) {
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("dt must be > 0");
  require_finite(tau_applied, "applied torque");

  const ReferenceSample ref = gait_reference(state.phase, pattern);
  StepResult out;
  AgentState& next = out.state;
  next = state;

  const Vec4 accel = (imp.kp.cwiseProduct(ref.q - state.q) +
                      imp.kd.cwiseProduct(ref.qdot - state.qdot) -
                      imp.viscous.cwiseProduct(state.qdot) + tau_applied)
                         .cwiseQuotient(imp.inertia);
  next.qdot = state.qdot + dt * accel;
  next.q = state.q + dt * next.qdot;
  for (int j = 0; j < 4; ++j) {
    const double lo = limits.lower(j), hi = limits.upper(j);
    if (next.q[j] < lo || next.q[j] > hi) {
      next.q[j] = std::clamp(next.q[j], lo, hi);
      next.qdot[j] = 0.0;
      out.limited[j] = true;
    }
  }

  // The clock never runs backwards.
  const double rate =
      std::max(0.0, pattern.cadence + imp.phase_gain * tau_applied.dot(ref.dq_dphase));
  const double advanced = state.phase + dt * rate;
  if (advanced >= 1.0) {
    out.wrapped = true;
    out.wrap_fraction = rate > 0.0 ? (1.0 - state.phase) / (dt * rate) : 1.0;
  }
  next.phase = advanced - std::floor(advanced);
  next.support = support_from_phase(next.phase, pattern);
  return out;
}

AgentState agent_step(const AgentState& state, const Vec4& tau_applied, const GaitPattern& pattern,
                      const ImpedanceParams& imp, double dt, const JointLimits& limits) {
  return agent_step_detail(state, tau_applied, pattern, imp, dt, limits).state;
}

}  // namespace exodyad
