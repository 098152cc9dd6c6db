#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exodyad/model.hpp"

namespace exodyad {

enum class CouplingSpace { joint, task };

// none renders zero torque on both sides (haptic transparency for both users).
enum class CouplingMode { none, bidirectional, uni_a_to_b, uni_b_to_a, asymmetric };

std::string to_string(CouplingSpace s);
std::string to_string(CouplingMode m);
CouplingSpace parse_coupling_space(const std::string& s);
CouplingMode parse_coupling_mode(const std::string& s);

// Diagonal gain matrices are stored as their diagonals.
struct JointGains {
  Vec4 stiffness = Vec4::Zero();  // Nm/rad
  Vec4 damping = Vec4::Zero();    // Nms/rad
  Vec4 neutral = Vec4::Zero();    // rad, q0
};

struct TaskGains {
  Vec2 stiffness = Vec2::Zero();  // N/m
  Vec2 damping = Vec2::Zero();    // Ns/m
  Vec2 neutral = Vec2::Zero();    // m, r0
};

// Second gain set for asymmetric coupling: `felt_by` feels torques computed
// with these gains, the partner feels the primary set.
struct AsymmetricGains {
  User felt_by = User::a;
  Vec4 joint_stiffness = Vec4::Zero();
  Vec4 joint_damping = Vec4::Zero();
  Vec2 task_stiffness = Vec2::Zero();
  Vec2 task_damping = Vec2::Zero();
};

struct CouplingConfig {
  CouplingSpace space = CouplingSpace::joint;
  CouplingMode mode = CouplingMode::none;
  JointGains joint;
  TaskGains task;
  std::optional<AsymmetricGains> asymmetric;
  // Permits negative stiffness (conflicting goals); no stability guarantee.
  bool competitive = false;
};

/// Rule violations of a coupling configuration (empty when valid). Negative
/// stiffness with the competitive flag set is reported through `warnings`.
std::vector<std::string> check(const CouplingConfig& cfg, std::vector<std::string>* warnings = nullptr);

// Torques on users A and B, 5-vectors [backpack, hipL, kneeL, hipR, kneeR].
// Joint-space coupling leaves the backpack entry at zero.
struct TorquePair {
  Vec5 a = Vec5::Zero();
  Vec5 b = Vec5::Zero();
};

struct JointCouplingResult {
  Vec4 raw;    // K (qA - qB - q0) + C (qdotA - qdotB), the commanded interaction torque
  Vec4 on_a;   // -raw, pulls A toward B + q0
  Vec4 on_b;   // +raw
};

JointCouplingResult joint_coupling(const AgentState& a, const AgentState& b, const JointGains& g);

struct TaskCouplingResult {
  Vec2 ankle_a, ankle_b;            // swing-ankle positions, m
  Vec2 ankle_vel_a, ankle_vel_b;    // m/s
  Vec2 force;                       // K (rA - rB - r0) + C (rdotA - rdotB)
  Vec2 force_on_a, force_on_b;      // -force, +force
  Vec5 on_a, on_b;                  // J^T force, backpack first
};

TaskCouplingResult task_coupling(const AgentState& a, const AgentState& b,
                                 std::optional<Side> stance_a, std::optional<Side> stance_b,
                                 const TaskGains& g, const BodyGeometry& body_a,
                                 const BodyGeometry& body_b);

/// Applies the coupling mode. `designated` holds the same torques evaluated with
/// the asymmetric gain set; it is required (and only read) in asymmetric mode.
TorquePair apply_directionality(const TorquePair& primary, CouplingMode mode,
                                const TorquePair* designated = nullptr,
                                User felt_by = User::a);

/// Desired torques for both users from (possibly delayed) states.
struct CouplingInputs {
  const AgentState& a;
  const AgentState& b;
  std::optional<Side> stance_a;
  std::optional<Side> stance_b;
  const BodyGeometry& body_a;
  const BodyGeometry& body_b;
};

TorquePair desired_torques(const CouplingInputs& in, const CouplingConfig& cfg);

// ---------------------------------------------------------------------------
// Rendering stage (idealized interaction-torque controller)
// ---------------------------------------------------------------------------

// Non-finite or absent limits are written as +inf.
struct RenderLimits {
  Vec4 tau_max = Vec4::Constant(std::numeric_limits<double>::infinity());   // Nm
  Vec4 qdot_max = Vec4::Constant(std::numeric_limits<double>::infinity());  // rad/s
  Vec4 p_max = Vec4::Constant(std::numeric_limits<double>::infinity());     // W
  double lag_tau = 0.0;  // s, first-order time constant
};

std::vector<std::string> check(const RenderLimits& limits);

struct RenderFlags {
  std::array<bool, 4> torque{};
  std::array<bool, 4> power{};
  std::array<bool, 4> velocity{};

  bool any() const;
};

struct RenderResult {
  Vec4 applied;
  RenderFlags flags;
};

/// First-order lag toward `tau_des`, then torque clamp, power clamp and the
/// velocity guard, per joint. `state` is the local (undelayed) agent state.
RenderResult render(const Vec4& tau_des, const AgentState& state, const RenderLimits& limits,
                    const Vec4& prev_applied, double dt);

}  // namespace exodyad
