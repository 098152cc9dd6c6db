#include "exodyad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace exodyad {

namespace {

const char* user_name(User u) { return u == User::a ? "A" : "B"; }
const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

// Joint angle of `user` at time t, linearly interpolated on the uniform log grid.
double angle_at(const TrialLog& log, User user, int joint, double t) {
  const auto& recs = log.records;
  const double x = t / log.dt;
  const double last = static_cast<double>(recs.size() - 1);
  if (x <= 0.0) return recs.front().state[index(user)].q[joint];
  if (x >= last) return recs.back().state[index(user)].q[joint];
  const auto k = static_cast<std::size_t>(std::floor(x));
  const double w = x - static_cast<double>(k);
  const double q0 = recs[k].state[index(user)].q[joint];
  const double q1 = recs[k + 1].state[index(user)].q[joint];
  return q0 + w * (q1 - q0);
}

GaitCurve mean_curve(const std::vector<const Cycle*>& cycles, GaitCurve Cycle::*member) {
  GaitCurve m{};
  for (const Cycle* c : cycles)
    for (int i = 0; i < kGaitPoints; ++i) m[i] += (c->*member)[i];
  for (double& v : m) v /= static_cast<double>(cycles.size());
  return m;
}

Band band_of(const std::vector<const Cycle*>& cycles, GaitCurve Cycle::*member) {
  Band b;
  b.mean = mean_curve(cycles, member);
  const double n = static_cast<double>(cycles.size());
  for (int i = 0; i < kGaitPoints; ++i) {
    double ss = 0.0;
    for (const Cycle* c : cycles) {
      const double d = (c->*member)[i] - b.mean[i];
      ss += d * d;
    }
    b.std[i] = std::sqrt(ss / (n - 1.0));
  }
  return b;
}

double mean_abs(const GaitCurve& x, const GaitCurve& y) {
  double s = 0.0;
  for (int i = 0; i < kGaitPoints; ++i) s += std::abs(x[i] - y[i]);
  return s / kGaitPoints;
}

}  // namespace

double ankle_height(const TickRecord& rec, User user, Side foot, const TrialLog& log) {
  return forward_kinematics(rec.state[index(user)].generalized(), foot, log.bodies[index(user)]).y();
}

HeelStrikes detect_heel_strikes(const TrialLog& log, User user, Side foot,
                                const StrikeDetector& det) {
  if (!std::isfinite(det.threshold) || !(det.hysteresis >= 0.0) || !(det.min_gap >= 0.0))
    throw InvalidInput("strike detector parameters must be finite and non-negative");

  HeelStrikes out;
  const double rearm = det.threshold + det.hysteresis;
  bool armed = false;
  double last = -std::numeric_limits<double>::infinity();
  double prev_h = 0.0, prev_t = 0.0;
  bool first = true;
  for (const TickRecord& rec : log.records) {
    const double h = ankle_height(rec, user, foot, log);
    if (first) {
      armed = h > rearm;
      first = false;
    } else if (armed && prev_h >= det.threshold && h < det.threshold) {
      const double t = prev_t + (rec.t - prev_t) * (prev_h - det.threshold) / (prev_h - h);
      armed = false;
      if (t - last >= det.min_gap) {
        out.times.push_back(t);
        last = t;
      }
    }
    if (h > rearm) armed = true;
    prev_h = h;
    prev_t = rec.t;
  }
  if (out.times.size() < 3) {
    std::ostringstream msg;
    msg << "insufficient cycles: user " << user_name(user) << " " << side_name(foot) << " foot has "
        << out.times.size() << " heel strikes (need >= 3)";
    throw InsufficientCycles(msg.str());
  }
  return out;
}

FootStrikes detect_all_strikes(const TrialLog& log, User user, const StrikeDetector& det) {
  return {detect_heel_strikes(log, user, Side::left, det),
          detect_heel_strikes(log, user, Side::right, det)};
}

std::vector<const Cycle*> GaitCycles::leg(Side s) const {
  std::vector<const Cycle*> out;
  for (const Cycle& c : cycles)
    if (c.leg == s) out.push_back(&c);
  return out;
}

std::array<GaitCycles, 2> normalize_cycles(const TrialLog& log,
                                           const std::array<FootStrikes, 2>& strikes,
                                           std::optional<User> reference) {
  if (log.records.size() < 2) throw InsufficientCycles("insufficient cycles: empty log");
  const double t_last = log.records.back().t;

  std::array<GaitCycles, 2> out;
  for (User u : {User::a, User::b}) {
    GaitCycles& gc = out[index(u)];
    gc.source = u;
    gc.reference = reference;
    const FootStrikes& fs = strikes[index(reference.value_or(u))];
    for (Side side : {Side::left, Side::right}) {
      const HeelStrikes& hs = fs[index(side)];
      for (std::size_t i = static_cast<std::size_t>(std::max(hs.excluded, 0));
           i + 1 < hs.times.size(); ++i) {
        Cycle c;
        c.leg = side;
        c.t_start = hs.times[i];
        c.t_end = hs.times[i + 1];
        if (c.t_end > t_last) break;
        for (int k = 0; k < kGaitPoints; ++k) {
          const double t = c.t_start + (c.t_end - c.t_start) * k / (kGaitPoints - 1);
          c.hip[k] = rad2deg(angle_at(log, u, hip_of(side), t));
          c.knee[k] = rad2deg(angle_at(log, u, knee_of(side), t));
        }
        gc.cycles.push_back(c);
      }
    }
    if (gc.cycles.empty()) {
      std::ostringstream msg;
      msg << "insufficient cycles: no usable cycle for user " << user_name(u)
          << " after excluding the first " << kExcludedCycles;
      throw InsufficientCycles(msg.str());
    }
  }
  return out;
}

MeanAbsDiff mean_abs_diff(const GaitCycles& a, const GaitCycles& b) {
  MeanAbsDiff out;
  for (Side side : {Side::left, Side::right}) {
    const auto ca = a.leg(side), cb = b.leg(side);
    if (ca.size() != cb.size()) {
      std::ostringstream msg;
      msg << "mismatched cycle counts on the " << side_name(side) << " leg: " << ca.size()
          << " vs " << cb.size();
      throw InvalidInput(msg.str());
    }
    for (std::size_t k = 0; k < ca.size(); ++k)
      out.points.push_back({side, static_cast<int>(k), mean_abs(ca[k]->hip, cb[k]->hip),
                            mean_abs(ca[k]->knee, cb[k]->knee)});
  }
  if (out.points.empty()) throw InsufficientCycles("insufficient cycles: nothing to compare");
  for (const LegDifference& p : out.points) {
    out.hip += p.hip;
    out.knee += p.knee;
  }
  out.hip /= static_cast<double>(out.points.size());
  out.knee /= static_cast<double>(out.points.size());
  return out;
}

std::array<GaitCycles, 2> truncate_to_common(std::array<GaitCycles, 2> cycles) {
  for (Side side : {Side::left, Side::right}) {
    const std::size_t n = std::min(cycles[0].leg(side).size(), cycles[1].leg(side).size());
    for (GaitCycles& gc : cycles) {
      std::size_t seen = 0;
      std::vector<Cycle> kept;
      for (const Cycle& c : gc.cycles)
        if (c.leg != side || seen++ < n) kept.push_back(c);
      gc.cycles = std::move(kept);
    }
  }
  return cycles;
}

JointBands band_stats(const std::vector<const Cycle*>& cycles) {
  if (cycles.size() < 2)
    throw InsufficientCycles("insufficient cycles: band statistics need at least 2 cycles");
  JointBands out;
  out.hip = band_of(cycles, &Cycle::hip);
  out.knee = band_of(cycles, &Cycle::knee);
  out.count = static_cast<int>(cycles.size());
  return out;
}

JointBands band_stats(const GaitCycles& cycles) {
  std::vector<const Cycle*> all;
  for (const Cycle& c : cycles.cycles) all.push_back(&c);
  return band_stats(all);
}

PeakAsymmetry peak_asymmetry(const GaitCycles& cycles) {
  const auto left = cycles.leg(Side::left), right = cycles.leg(Side::right);
  if (left.empty() || right.empty())
    throw InsufficientCycles("insufficient cycles: peak asymmetry needs both legs");
  auto peak = [](const GaitCurve& c) { return *std::max_element(c.begin(), c.end()); };
  PeakAsymmetry out;
  out.hip = peak(mean_curve(left, &Cycle::hip)) - peak(mean_curve(right, &Cycle::hip));
  out.knee = peak(mean_curve(left, &Cycle::knee)) - peak(mean_curve(right, &Cycle::knee));
  return out;
}

std::vector<PeakDifference> peak_difference(const GaitCycles& a, const GaitCycles& b) {
  std::vector<PeakDifference> out;
  for (Side side : {Side::left, Side::right}) {
    const auto ca = a.leg(side), cb = b.leg(side);
    if (ca.empty() || cb.empty()) continue;
    PeakDifference pd{side};
    auto locate = [&](GaitCurve Cycle::*member, double& value, double& at) {
      const GaitCurve ma = mean_curve(ca, member), mb = mean_curve(cb, member);
      int best = 0;
      for (int i = 1; i < kGaitPoints; ++i)
        if (std::abs(ma[i] - mb[i]) > std::abs(ma[best] - mb[best])) best = i;
      value = ma[best] - mb[best];
      at = 100.0 * best / (kGaitPoints - 1);
    };
    locate(&Cycle::hip, pd.hip, pd.hip_at);
    locate(&Cycle::knee, pd.knee, pd.knee_at);
    out.push_back(pd);
  }
  return out;
}

TorqueTracking torque_tracking_error(const TrialLog& log) {
  TorqueTracking out;
  std::array<std::array<Vec4, TorqueTracking::kBins>, 2> sum_sq{};
  std::array<std::array<double, TorqueTracking::kBins>, 2> count{};
  for (auto& per_user : sum_sq) per_user.fill(Vec4::Zero());
  for (auto& per_user : out.by_phase) per_user.fill(Vec4::Zero());

  for (const TickRecord& rec : log.records) {
    for (int u = 0; u < 2; ++u) {
      const Vec4 e = rec.torque[u].desired.tail<4>() - rec.torque[u].applied.tail<4>();
      const Vec4 e2 = e.cwiseAbs2();
      out.rms[u] += e2;
      const int bin = std::clamp(static_cast<int>(rec.state[u].phase * TorqueTracking::kBins), 0,
                                 TorqueTracking::kBins - 1);
      sum_sq[u][bin] += e2;
      count[u][bin] += 1.0;
    }
  }
  if (log.records.empty()) return out;
  const double n = static_cast<double>(log.records.size());
  for (int u = 0; u < 2; ++u) {
    out.rms[u] = (out.rms[u] / n).cwiseSqrt();
    for (int b = 0; b < TorqueTracking::kBins; ++b)
      if (count[u][b] > 0.0) out.by_phase[u][b] = (sum_sq[u][b] / count[u][b]).cwiseSqrt();
  }
  return out;
}

PhaseSync phase_sync(const HeelStrikes& a, const HeelStrikes& b) {
  if (a.times.size() < 3 || b.times.size() < 3)
    throw InsufficientCycles("insufficient cycles: phase sync needs >= 3 strikes per user");

  // B's continuous cycle count at time t, linear between B's strikes.
  auto phase_b = [&](double t) -> std::optional<double> {
    const auto it = std::upper_bound(b.times.begin(), b.times.end(), t);
    if (it == b.times.begin() || it == b.times.end()) return std::nullopt;
    const std::size_t j = static_cast<std::size_t>(it - b.times.begin()) - 1;
    return static_cast<double>(j) + (t - b.times[j]) / (b.times[j + 1] - b.times[j]);
  };

  PhaseSync out;
  std::optional<double> origin;
  for (std::size_t i = static_cast<std::size_t>(std::max(a.excluded, 0)); i < a.times.size(); ++i) {
    const auto pb = phase_b(a.times[i]);
    if (!pb) continue;
    const double rel = *pb - static_cast<double>(i);
    if (!origin) origin = rel;
    out.times.push_back(a.times[i]);
    out.drift.push_back(rel - *origin);
    out.max_abs_drift = std::max(out.max_abs_drift, std::abs(out.drift.back()));
  }
  if (out.drift.empty())
    throw InsufficientCycles("insufficient cycles: no overlap between the users' strike series");
  out.bounded = out.max_abs_drift < 0.5;
  return out;
}

double EnergyLedger::largest() const {
  return std::max({std::abs(work_a), std::abs(work_b), std::abs(spring_delta), std::abs(dissipated)});
}

EnergyLedger energy_ledger(const TrialLog& log, const JointGains& gains, std::size_t first,
                           std::size_t last) {
  if (first >= last || last >= log.records.size())
    throw InvalidInput("energy window must satisfy first < last < record count");
  const auto& R = log.records;
  auto rel = [&](std::size_t k) -> Vec4 {
    return R[k].state[0].q - R[k].state[1].q - gains.neutral;
  };
  auto spring = [&](std::size_t k) {
    const Vec4 x = rel(k);
    return 0.5 * x.dot(gains.stiffness.cwiseProduct(x));
  };
  auto damper_power = [&](std::size_t k) {
    const Vec4 v = R[k].state[0].qdot - R[k].state[1].qdot;
    return v.dot(gains.damping.cwiseProduct(v));
  };

  EnergyLedger e;
  for (std::size_t k = first; k < last; ++k) {
    for (int u = 0; u < 2; ++u) {
      const Vec4 tau = 0.5 * (R[k].torque[u].applied.tail<4>() + R[k + 1].torque[u].applied.tail<4>());
      const double w = tau.dot(R[k + 1].state[u].q - R[k].state[u].q);
      (u == 0 ? e.work_a : e.work_b) += w;
    }
    e.dissipated += 0.5 * (R[k + 1].t - R[k].t) * (damper_power(k) + damper_power(k + 1));
  }
  e.spring_delta = spring(last) - spring(first);
  return e;
}

}  // namespace exodyad

namespace exodyad {

TrialSummary summarize(const TrialLog& log, CouplingMode mode, const StrikeDetector& det) {
  TrialSummary out;
  out.condition = log.label;
  out.torque_rms = torque_tracking_error(log).rms;
  if (!log.records.empty())
    for (int u = 0; u < 2; ++u)
      out.ankle_rise[u] = log.records.back().ankle[u].y() - log.records.front().ankle[u].y();

  std::array<FootStrikes, 2> strikes;
  try {
    strikes = {detect_all_strikes(log, User::a, det), detect_all_strikes(log, User::b, det)};
  } catch (const InsufficientCycles& e) {
    out.notes.push_back(e.what());
    return out;
  }
  try {
    out.sync = phase_sync(strikes[0][index(Side::left)], strikes[1][index(Side::left)]);
  } catch (const InsufficientCycles& e) {
    out.notes.push_back(e.what());
  }
  try {
    const bool connected = mode != CouplingMode::none;
    auto cycles = normalize_cycles(log, strikes, connected ? std::optional(User::a) : std::nullopt);
    if (!connected) cycles = truncate_to_common(std::move(cycles));
    out.diff = mean_abs_diff(cycles[0], cycles[1]);
    out.asymmetry = {peak_asymmetry(cycles[0]), peak_asymmetry(cycles[1])};
    for (int u = 0; u < 2; ++u)
      for (Side side : {Side::left, Side::right}) {
        const auto leg = cycles[u].leg(side);
        if (leg.size() >= 2) out.bands[u][index(side)] = band_stats(leg);
      }
  } catch (const InsufficientCycles& e) {
    out.notes.push_back(e.what());
  } catch (const InvalidInput& e) {
    out.notes.push_back(e.what());
  }
  return out;
}

}  // namespace exodyad
