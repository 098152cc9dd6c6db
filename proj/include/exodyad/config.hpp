#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "exodyad/sim.hpp"

namespace exodyad {

// Scenario files are plain text, one `key = value` per line, '#' starts a
// comment. Vector values are whitespace- or comma-separated; a single number
// is broadcast to every entry. Angles are in radians. An optional
// `base = <preset>` line (anywhere in the file) starts from that preset;
// otherwise the defaults of Scenario apply. Keys:
//
//   label, duration, dt, latency_ticks, seed, treadmill_speed,
//   initial_phase_jitter, sensor_noise, reference_phase_jitter
//   coupling.space            joint | task
//   coupling.mode             none | bidirectional | uni_a_to_b | uni_b_to_a | asymmetric
//   coupling.competitive      true | false
//   coupling.joint.{stiffness,damping,neutral}        4 values
//   coupling.task.{stiffness,damping,neutral}         2 values
//   coupling.asymmetric.felt_by                       A | B
//   coupling.asymmetric.{joint_stiffness,joint_damping}  4 values
//   coupling.asymmetric.{task_stiffness,task_damping}    2 values
//   limits.{tau_max,qdot_max,p_max}                   4 values ("inf" allowed)
//   limits.lag_tau
//   agents.<A|B>.{cadence,rom_scale,hip_rom_scale,knee_rom_scale,
//                 phase_offset_right,initial_phase,phi,phase_gain,
//                 thigh_len,shank_len}
//   agents.<A|B>.fixed_stance                         left | right | none
//   agents.<A|B>.{kp,kd,inertia,viscous}              4 values
//   agents.<A|B>.joint_limits.{hip,knee}              lower upper

struct ConfigReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

/// Parses a scenario description. Syntax problems and unknown keys are added
/// to `report.violations`; parsing continues past them.
Scenario parse_config(std::istream& in, ConfigReport& report, const std::string& source = "config");

/// Reads and parses a file. A missing file is reported as a violation.
Scenario load_config(const std::string& path, ConfigReport& report);

/// Every rule violated by a scenario. Never runs a simulation.
ConfigReport validate(const Scenario& s);

}  // namespace exodyad
