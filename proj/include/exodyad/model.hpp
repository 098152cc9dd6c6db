#pragma once

#include <array>
#include <optional>

#include "exodyad/types.hpp"

namespace exodyad {

// ---------------------------------------------------------------------------
// Kinematics
// ---------------------------------------------------------------------------

struct SegmentParams {
  double thigh_len = 0.45;  // m
  double shank_len = 0.45;  // m
};

// Segment lengths of both legs of one user, indexed by Side.
struct BodyGeometry {
  std::array<SegmentParams, 2> legs{};

  static BodyGeometry symmetric(SegmentParams p) { return BodyGeometry{{p, p}}; }
  const SegmentParams& leg(Side s) const { return legs[index(s)]; }
};

void validate(const SegmentParams& p);

/// Swing-ankle position in a frame fixed at the stance ankle (x forward, y up).
///
/// `gen` is [phi, hipL, kneeL, hipR, kneeR]. Thigh absolute angle is phi + hip,
/// shank absolute angle is thigh - knee, and a segment at absolute angle theta
/// points along (sin theta, -cos theta) from its proximal to its distal end.
Vec2 forward_kinematics(const Vec5& gen, Side swing_leg, const BodyGeometry& body);

/// d(forward_kinematics)/d(gen), a 2x5 matrix with columns ordered like `gen`.
Mat25 swing_jacobian(const Vec5& gen, Side swing_leg, const BodyGeometry& body);

/// Hip position in the stance-ankle frame.
Vec2 hip_position(const Vec5& gen, Side stance_leg, const BodyGeometry& body);

/// Closed-form inverse kinematics for the swing leg: returns the (hip, knee)
/// angles that put the swing ankle at `target`, keeping phi and the stance leg
/// from `gen`. Picks the flexed-knee branch (knee >= 0). Throws when the target
/// is out of reach.
Vec2 swing_leg_ik(const Vec5& gen, Side swing_leg, const BodyGeometry& body, const Vec2& target);

// ---------------------------------------------------------------------------
// Gait reference (surrogate for each user's walking intent)
// ---------------------------------------------------------------------------

// hip(p) = offset + amplitude cos(2 pi (p - peak_phase))
//        + harmonic cos(4 pi (p - harmonic_phase))
struct HipCurve {
  double offset = 0.0;     // rad
  double amplitude = 0.0;  // rad
  double peak_phase = 0.0;
  double harmonic = 0.0;  // rad
  double harmonic_phase = 0.0;
};

// knee(p) = offset + amplitude (2 b(p) - 1) with
// b(p) = stance_weight * bump(stance_center, stance_width) + bump(swing_center, swing_width)
// and bump a periodic raised-cosine window of unit height.
struct KneeCurve {
  double offset = 0.0;     // rad
  double amplitude = 0.0;  // rad
  double stance_weight = 0.0;
  double stance_center = 0.0;
  double stance_width = 0.3;
  double swing_center = 0.5;
  double swing_width = 0.5;
};

struct LegCurves {
  HipCurve hip;
  KneeCurve knee;
};

struct GaitPattern {
  double cadence = 0.5;  // strides/s
  std::array<LegCurves, 2> legs{};
  double hip_rom_scale = 1.0;
  double knee_rom_scale = 1.0;
  double phase_offset_right = 0.5;  // fraction of a cycle
  // Per-stride distortion of the reference clock, p -> p + warp (1 - cos 2 pi p) / 2.
  // Zero for a clean periodic reference; |warp| < 1/pi keeps the map monotonic.
  double phase_warp = 0.0;

  const LegCurves& leg(Side s) const { return legs[index(s)]; }
  void set_rom_scale(double s) { hip_rom_scale = knee_rom_scale = s; }
};

/// Default walking curves. Hip spans offset 12.5 deg +/- 22.5 deg, knee spans
/// [0, 65] deg with a small loading bump in stance and the main flexion in swing.
/// Phase 0 is aligned with the left heel strike as seen by the ankle-height
/// detector (default threshold) for the default geometry.
LegCurves default_leg_curves();

/// Symmetric default pattern at the given cadence.
GaitPattern default_gait(double cadence);

/// Cadence used for a treadmill speed when nothing else is specified.
double default_cadence(double treadmill_speed_kmh);

void validate(const GaitPattern& p);

struct ReferenceSample {
  Vec4 q = Vec4::Zero();          // rad
  Vec4 qdot = Vec4::Zero();       // rad/s
  Vec4 dq_dphase = Vec4::Zero();  // rad per cycle of the raw phase
};

/// Joint references at gait phase `phase` (expected in [0,1); other values are wrapped).
ReferenceSample gait_reference(double phase, const GaitPattern& pattern);

/// Phase of each leg (left at index 0) after warping and the right-leg offset.
std::array<double, 2> leg_phases(double phase, const GaitPattern& pattern);

// ---------------------------------------------------------------------------
// Agent dynamics (human + transparent exoskeleton surrogate)
// ---------------------------------------------------------------------------

enum class Support { left_stance, right_stance, double_support };

struct AgentState {
  double phi = 0.0;  // rad, 0 = upright, positive = forward lean
  Vec4 q = Vec4::Zero();
  Vec4 qdot = Vec4::Zero();
  double phase = 0.0;  // [0,1)
  Support support = Support::double_support;

  Vec5 generalized() const;
  Vec5 generalized_velocity() const;  // phi is kinematic, so its rate is zero
};

struct JointLimits {
  Vec2 hip{deg2rad(-30.0), deg2rad(120.0)};
  Vec2 knee{0.0, deg2rad(135.0)};

  double lower(int j) const { return (j % 2 == 0) ? hip[0] : knee[0]; }
  double upper(int j) const { return (j % 2 == 0) ? hip[1] : knee[1]; }
};

struct ImpedanceParams {
  Vec4 kp = Vec4::Constant(60.0);      // Nm/rad
  Vec4 kd = Vec4::Constant(6.0);       // Nms/rad
  Vec4 inertia = Vec4::Constant(0.4);  // kg m^2
  Vec4 viscous = Vec4::Constant(0.5);  // Nms/rad
  // Entrainment of the gait clock to felt torque: the phase rate gains
  // phase_gain * tau . dq_ref/dphase (cycles/s per Nm rad). Zero keeps a rigid clock.
  double phase_gain = 0.0;
};

void validate(const ImpedanceParams& p);
void validate(const JointLimits& l);

/// Ground contact pattern implied by the gait phase: a leg is loaded while its
/// own phase is in [0, 0.6).
Support support_from_phase(double phase, const GaitPattern& pattern);

/// Leg treated as the fixed stance leg for task-space kinematics: the leg that
/// struck the ground most recently.
Side stance_from_phase(double phase, const GaitPattern& pattern);

struct StepResult {
  AgentState state;
  bool wrapped = false;         // gait phase crossed 1 -> 0 during the step
  double wrap_fraction = 0.0;   // fraction of dt at which the wrap happened
  std::array<bool, 4> limited{};  // joint hit a position limit
};

/// One semi-implicit Euler step of the impedance-tracking agent:
/// I qdd = kp (q_ref - q) + kd (qdot_ref - qdot) - viscous qdot + tau.
/// phi is held; joints are hard-clamped at their limits with zeroed velocity.
StepResult agent_step_detail(const AgentState& state, const Vec4& tau_applied,
                             const GaitPattern& pattern, const ImpedanceParams& imp, double dt,
                             const JointLimits& limits = {});

AgentState agent_step(const AgentState& state, const Vec4& tau_applied, const GaitPattern& pattern,
                      const ImpedanceParams& imp, double dt, const JointLimits& limits = {});

/// Agent placed exactly on its reference at `phase`.
AgentState state_on_reference(double phase, const GaitPattern& pattern, double phi = 0.0);

/// Vertical endpoint stiffness of the swing ankle produced by the joint springs,
/// 1 / (J Kp^-1 J^T)_yy over the four actuated joints.
double vertical_endpoint_stiffness(const Vec5& gen, Side swing_leg, const BodyGeometry& body,
                                   const Vec4& kp);

}  // namespace exodyad
