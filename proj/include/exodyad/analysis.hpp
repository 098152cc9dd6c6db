#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exodyad/coupling.hpp"
#include "exodyad/sim.hpp"

namespace exodyad {

// Angles are reported in degrees and torques in Nm throughout this module.

class InsufficientCycles : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kGaitPoints = 101;  // 0..100 % of the gait cycle
inline constexpr int kExcludedCycles = 2;

using GaitCurve = std::array<double, kGaitPoints>;

struct StrikeDetector {
  double threshold = 0.02;   // m
  double hysteresis = 0.005; // m, re-arm above threshold + hysteresis
  double min_gap = 0.3;      // s, refractory period
};

struct HeelStrikes {
  std::vector<double> times;  // s
  int excluded = kExcludedCycles;  // leading cycles dropped from analysis
};

/// Height of `foot`'s ankle above the other ankle (the other leg taken as stance).
double ankle_height(const TickRecord& rec, User user, Side foot, const TrialLog& log);

/// Heel strikes of one foot: downward crossings of its ankle height below the
/// threshold, re-armed only after rising above threshold + hysteresis, and at
/// least `min_gap` apart. Throws InsufficientCycles with fewer than 3 strikes.
HeelStrikes detect_heel_strikes(const TrialLog& log, User user, Side foot = Side::left,
                                const StrikeDetector& det = {});

// Both feet of one user, indexed by Side.
using FootStrikes = std::array<HeelStrikes, 2>;

FootStrikes detect_all_strikes(const TrialLog& log, User user, const StrikeDetector& det = {});

struct Cycle {
  Side leg = Side::left;
  double t_start = 0.0, t_end = 0.0;
  GaitCurve hip{}, knee{};  // deg
};

struct GaitCycles {
  User source = User::a;
  std::optional<User> reference;  // whose strikes sliced the data; nullopt = own
  std::vector<Cycle> cycles;

  std::vector<const Cycle*> leg(Side s) const;
};

/// Slices each leg's joint curves between consecutive strikes of the same foot
/// (after the excluded leading cycles) and resamples them to 101 points. With
/// `reference` set both users are sliced by that user's strikes; otherwise
/// each user by their own.
std::array<GaitCycles, 2> normalize_cycles(const TrialLog& log,
                                           const std::array<FootStrikes, 2>& strikes,
                                           std::optional<User> reference);

struct LegDifference {
  Side leg;
  int cycle;
  double hip, knee;  // mean |qA - qB| over the cycle, deg
};

struct MeanAbsDiff {
  double hip = 0.0, knee = 0.0;  // deg
  std::vector<LegDifference> points;
};

/// Pairs cycle k of A with cycle k of B per leg. Throws on mismatched counts.
MeanAbsDiff mean_abs_diff(const GaitCycles& a, const GaitCycles& b);

/// Drops trailing cycles so both users have the same count per leg.
std::array<GaitCycles, 2> truncate_to_common(std::array<GaitCycles, 2> cycles);

struct Band {
  GaitCurve mean{}, std{};
};

struct JointBands {
  Band hip, knee;  // deg
  int count = 0;
};

/// Pointwise mean and sample standard deviation over the given cycles.
JointBands band_stats(const std::vector<const Cycle*>& cycles);
JointBands band_stats(const GaitCycles& cycles);

struct PeakAsymmetry {
  double hip = 0.0, knee = 0.0;  // peak(left mean curve) - peak(right mean curve), deg
};

PeakAsymmetry peak_asymmetry(const GaitCycles& cycles);

struct PeakDifference {
  Side leg;
  double hip = 0.0, hip_at = 0.0;    // deg, % gait
  double knee = 0.0, knee_at = 0.0;
};

/// Largest gap between the two users' mean curves, per leg, and where it occurs.
std::vector<PeakDifference> peak_difference(const GaitCycles& a, const GaitCycles& b);

struct TorqueTracking {
  std::array<Vec4, 2> rms{Vec4::Zero(), Vec4::Zero()};  // per user, actuated joints
  static constexpr int kBins = 10;
  // RMS error per gait-phase bin, per user, per joint.
  std::array<std::array<Vec4, kBins>, 2> by_phase{};
};

/// RMS of desired minus applied interaction torque over the trial.
TorqueTracking torque_tracking_error(const TrialLog& log);

struct PhaseSync {
  std::vector<double> times;  // A strike times after the exclusion window
  std::vector<double> drift;  // cycles, relative to the first retained strike
  double max_abs_drift = 0.0;
  bool bounded = false;
};

/// Phase of B (interpolated between B's strikes) at each of A's strikes,
/// minus A's strike count, unwrapped and referenced to the first retained strike.
PhaseSync phase_sync(const HeelStrikes& a, const HeelStrikes& b);

struct EnergyLedger {
  double work_a = 0.0, work_b = 0.0;  // J done by the coupling on each user
  double spring_delta = 0.0;          // J, change in virtual spring energy
  double dissipated = 0.0;            // J, damper dissipation
  double residual() const { return work_a + work_b + spring_delta + dissipated; }
  double largest() const;
};

/// Energy bookkeeping of a joint-space coupling over records [first, last].
/// Work and dissipation use trapezoidal quadrature over the logged samples.
EnergyLedger energy_ledger(const TrialLog& log, const JointGains& gains, std::size_t first,
                           std::size_t last);

struct TrialSummary {
  std::string condition;
  std::optional<MeanAbsDiff> diff;
  std::array<Vec4, 2> torque_rms{Vec4::Zero(), Vec4::Zero()};  // Nm, per user
  std::optional<PhaseSync> sync;                               // left-foot strikes
  std::optional<std::array<PeakAsymmetry, 2>> asymmetry;       // per user
  std::array<std::array<std::optional<JointBands>, 2>, 2> bands{};  // [user][leg]
  std::array<double, 2> ankle_rise{0.0, 0.0};  // m, last minus first vertical ankle position
  std::vector<std::string> notes;              // analyses skipped and why
};

/// Runs the whole pipeline on one trial. Connected trials (any coupling mode
/// other than none) are normalized by user A's strikes; uncoupled trials by each
/// user's own strikes, truncated to a common cycle count. Analyses that lack
/// cycles are skipped and noted rather than failing the summary.
TrialSummary summarize(const TrialLog& log, CouplingMode mode, const StrikeDetector& det = {});

}  // namespace exodyad
