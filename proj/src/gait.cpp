#include <cmath>

#include "exodyad/model.hpp"

namespace exodyad {

namespace {

// Phase shift that puts the left-heel threshold crossing (0.02 m) of the default
// geometry at phase 0. Solved offline by root finding on the ankle-height curve.
constexpr double kStrikeAlignment = 0.060359949452;

double wrap01(double p) { return p - std::floor(p); }

// Signed distance from `center` on the unit circle, in [-0.5, 0.5).
double circular_offset(double p, double center) { return wrap01(p - center + 0.5) - 0.5; }

struct Bump {
  double value, slope;
};

Bump raised_cosine(double p, double center, double width) {
  const double x = circular_offset(p, center);
  if (std::abs(x) >= 0.5 * width) return {0.0, 0.0};
  const double arg = 2.0 * kPi * x / width;
  return {0.5 * (1.0 + std::cos(arg)), -kPi / width * std::sin(arg)};
}

struct CurveValue {
  double value, slope;  // slope per cycle of leg phase
};

CurveValue eval_hip(const HipCurve& c, double rom, double p) {
  const double a1 = 2.0 * kPi * (p - c.peak_phase);
  const double a2 = 4.0 * kPi * (p - c.harmonic_phase);
  return {c.offset + rom * (c.amplitude * std::cos(a1) + c.harmonic * std::cos(a2)),
          -rom * (2.0 * kPi * c.amplitude * std::sin(a1) + 4.0 * kPi * c.harmonic * std::sin(a2))};
}

CurveValue eval_knee(const KneeCurve& c, double rom, double p) {
  const Bump stance = raised_cosine(p, c.stance_center, c.stance_width);
  const Bump swing = raised_cosine(p, c.swing_center, c.swing_width);
  const double b = c.stance_weight * stance.value + swing.value;
  const double db = c.stance_weight * stance.slope + swing.slope;
  return {c.offset + rom * c.amplitude * (2.0 * b - 1.0), rom * c.amplitude * 2.0 * db};
}

}  // namespace

LegCurves default_leg_curves() {
  LegCurves c;
  c.hip.offset = deg2rad(12.5);
  c.hip.amplitude = deg2rad(22.5);
  c.hip.peak_phase = 0.9 - kStrikeAlignment;
  c.knee.offset = deg2rad(32.5);
  c.knee.amplitude = deg2rad(32.5);
  c.knee.stance_weight = 0.3;
  c.knee.stance_center = 0.15 - kStrikeAlignment;
  c.knee.stance_width = 0.3;
  c.knee.swing_center = 0.72 - kStrikeAlignment;
  c.knee.swing_width = 0.56;
  return c;
}

GaitPattern default_gait(double cadence) {
  GaitPattern g;
  g.cadence = cadence;
  g.legs = {default_leg_curves(), default_leg_curves()};
  return g;
}

double default_cadence(double treadmill_speed_kmh) { return 0.5 * treadmill_speed_kmh / 0.8; }

void validate(const GaitPattern& p) {
  if (!std::isfinite(p.cadence) || p.cadence <= 0.0) throw InvalidInput("cadence must be > 0");
  if (!std::isfinite(p.hip_rom_scale) || p.hip_rom_scale < 0.0 || !std::isfinite(p.knee_rom_scale) ||
      p.knee_rom_scale < 0.0)
    throw InvalidInput("rom_scale must be >= 0");
  if (!std::isfinite(p.phase_offset_right) || p.phase_offset_right < 0.0 ||
      p.phase_offset_right >= 1.0)
    throw InvalidInput("phase_offset_right must be in [0,1)");
  if (!std::isfinite(p.phase_warp) || std::abs(p.phase_warp) >= 1.0 / kPi)
    throw InvalidInput("phase_warp must satisfy |warp| < 1/pi");
  for (const LegCurves& leg : p.legs) {
    const KneeCurve& k = leg.knee;
    const HipCurve& h = leg.hip;
    const double nums[] = {h.offset,     h.amplitude,   h.peak_phase,   h.harmonic,
                           h.harmonic_phase, k.offset, k.amplitude, k.stance_weight,
                           k.stance_center, k.stance_width, k.swing_center, k.swing_width};
    for (double v : nums) require_finite(v, "gait curve parameter");
    if (k.stance_width <= 0.0 || k.stance_width > 1.0 || k.swing_width <= 0.0 || k.swing_width > 1.0)
      throw InvalidInput("knee bump widths must be in (0,1]");
    if (k.amplitude < 0.0 || k.stance_weight < 0.0 || k.stance_weight > 1.0)
      throw InvalidInput("knee amplitude and stance_weight must be non-negative (weight <= 1)");
    if (k.offset - p.knee_rom_scale * k.amplitude < -1e-12)
      throw InvalidInput("knee reference would go negative (offset < rom_scale * amplitude)");
  }
}

std::array<double, 2> leg_phases(double phase, const GaitPattern& pattern) {
  const double p = wrap01(phase);
  const double warped = p + 0.5 * pattern.phase_warp * (1.0 - std::cos(2.0 * kPi * p));
  return {wrap01(warped), wrap01(warped + pattern.phase_offset_right)};
}

ReferenceSample gait_reference(double phase, const GaitPattern& pattern) {
  const double p = wrap01(phase);
  const double warp_slope = 1.0 + kPi * pattern.phase_warp * std::sin(2.0 * kPi * p);
  const std::array<double, 2> lp = leg_phases(p, pattern);

  ReferenceSample out;
  for (Side side : {Side::left, Side::right}) {
    const LegCurves& c = pattern.leg(side);
    const double legp = lp[index(side)];
    const CurveValue hip = eval_hip(c.hip, pattern.hip_rom_scale, legp);
    const CurveValue knee = eval_knee(c.knee, pattern.knee_rom_scale, legp);
    out.q[hip_of(side)] = hip.value;
    out.q[knee_of(side)] = knee.value;
    out.dq_dphase[hip_of(side)] = hip.slope * warp_slope;
    out.dq_dphase[knee_of(side)] = knee.slope * warp_slope;
  }
  out.qdot = out.dq_dphase * pattern.cadence;
  return out;
}

}  // namespace exodyad
