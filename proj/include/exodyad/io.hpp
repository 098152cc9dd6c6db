#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "exodyad/analysis.hpp"
#include "exodyad/sim.hpp"

namespace exodyad {

// timeseries.csv: one header line, then one row per tick, 17 significant
// digits, angles in radians. Columns, in order:
//
//   t
//   A.phi A.q0..A.q3 A.qdot0..A.qdot3 A.tau_des0..A.tau_des4 A.tau_app0..A.tau_app4
//   B.phi ... (same as A)
//   rA.x rA.y rB.x rB.y          swing-ankle position in the stance-ankle frame, m
//   phaseA phaseB
//   stanceA stanceB              0 = left, 1 = right
//   supportA supportB            0 = left stance, 1 = right stance, 2 = double
//
// Torque index 0 is the backpack entry; joint indices follow [hipL, kneeL, hipR, kneeR].

std::vector<std::string> timeseries_header();
void write_timeseries(std::ostream& out, const TrialLog& log);

/// Reads records back. Only the per-tick fields are restored; metadata
/// (label, bodies, events) stays default and dt is taken from the time column.
TrialLog read_timeseries(std::istream& in);

// summary.csv: one row per trial, angles in degrees, torques in Nm. Fields an
// analysis could not produce are left empty; `note` says why.
std::vector<std::string> summary_header();
void write_summary(std::ostream& out, const std::vector<TrialSummary>& rows);

// cycles.csv: long format, one row per (user, leg, joint, gait point):
// user,leg,joint,gait_pct,mean_deg,std_deg,cycles
void write_cycles(std::ostream& out, const TrialSummary& summary);

}  // namespace exodyad
