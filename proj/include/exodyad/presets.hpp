#pragma once

#include <string>
#include <vector>

#include "exodyad/sim.hpp"

namespace exodyad {

class UnknownPreset : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// The closed set of preset names, in canonical order.
const std::vector<std::string>& preset_names();

/// Fully populated scenario for a named experimental condition.
///
/// Walking presets share one dyad: user B walks with a smaller range of motion
/// and a slightly faster cadence than user A, so the uncoupled pair shows both
/// a joint-angle gap and phase drift. Throws UnknownPreset for other names.
Scenario preset(const std::string& name);

/// Parameters of the preset dyad, exposed for tests and sweeps.
namespace dyad {
inline constexpr double treadmill_speed_kmh = 0.8;
inline constexpr double cadence_b_ratio = 1.1;  // B strides 10 % faster than A
inline constexpr double rom_scale_b = 0.7;
inline constexpr double phase_gain = 0.004;  // cycles/s per (Nm rad/cycle)
inline constexpr double initial_phase_b = 0.0;
ImpedanceParams impedance();
}  // namespace dyad

/// Leader target of the unidirectional joint-space trial: the left leg walks a
/// swing path enlarged +35 % horizontally and +20 % vertically, the right leg
/// walks the default curves.
namespace uni_joint {
inline constexpr double horizontal_scale = 1.35;
inline constexpr double vertical_scale = 1.20;
LegCurves leader_left_curves();
GaitPattern leader_pattern(double cadence);
}  // namespace uni_joint

/// Stationary task-space trial geometry.
namespace task_static {
inline constexpr double lift = 0.40;  // m, leader's commanded ankle rise
inline constexpr double follower_swing_kp = 40.0;  // Nm/rad, swing hip and knee; stance keeps the default
Vec4 base_pose();    // both users' start pose, rad
Vec4 leader_pose();  // base pose with the swing ankle lifted by `lift`
}  // namespace task_static

}  // namespace exodyad
