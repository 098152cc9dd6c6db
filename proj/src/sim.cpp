#include "exodyad/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace exodyad {

std::size_t Scenario::tick_count() const {
  if (!(dt > 0.0) || !(duration > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
}

namespace {

template <typename F>
void collect(std::vector<std::string>& out, const std::string& field, F&& f) {
  try {
    f();
  } catch (const InvalidInput& e) {
    out.push_back(field + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> check(const Scenario& s, std::vector<std::string>* warnings) {
  std::vector<std::string> out;
  if (!std::isfinite(s.duration) || s.duration <= 0.0) out.push_back("duration must be > 0");
  if (!std::isfinite(s.dt) || s.dt <= 0.0) out.push_back("dt must be > 0");
  if (std::isfinite(s.duration) && std::isfinite(s.dt) && s.dt > s.duration)
    out.push_back("dt must not exceed duration");
  if (s.latency_ticks < 0) out.push_back("latency_ticks must be >= 0");
  if (!std::isfinite(s.treadmill_speed_kmh) || s.treadmill_speed_kmh < 0.0)
    out.push_back("treadmill_speed must be >= 0");
  if (!std::isfinite(s.initial_phase_jitter) || s.initial_phase_jitter < 0.0)
    out.push_back("initial_phase_jitter must be >= 0");
  if (!std::isfinite(s.sensor_noise) || s.sensor_noise < 0.0)
    out.push_back("sensor_noise must be >= 0");
  if (!std::isfinite(s.reference_phase_jitter) || s.reference_phase_jitter < 0.0)
    out.push_back("reference_phase_jitter must be >= 0");

  for (User u : {User::a, User::b}) {
    const AgentConfig& a = s.agent(u);
    const std::string p = std::string("agents.") + (u == User::a ? "A" : "B") + ".";
    collect(out, p + "body.left", [&] { validate(a.body.legs[0]); });
    collect(out, p + "body.right", [&] { validate(a.body.legs[1]); });
    collect(out, p + "pattern", [&] { validate(a.pattern); });
    collect(out, p + "impedance", [&] { validate(a.impedance); });
    collect(out, p + "joint_limits", [&] { validate(a.joint_limits); });
    if (!std::isfinite(a.initial_phase)) out.push_back(p + "initial_phase is not finite");
    if (!std::isfinite(a.phi)) out.push_back(p + "phi is not finite");
  }
  for (auto& v : check(s.coupling, warnings)) out.push_back(std::move(v));
  for (auto& v : check(s.limits)) out.push_back(std::move(v));
  return out;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::reference_strike: return "reference_strike";
    case EventKind::torque_limit: return "torque_limit";
    case EventKind::power_limit: return "power_limit";
    case EventKind::velocity_limit: return "velocity_limit";
    case EventKind::joint_limit: return "joint_limit";
  }
  return "unknown";
}

std::vector<double> TrialLog::reference_strikes(User u) const {
  std::vector<double> t;
  for (const Event& e : events)
    if (e.kind == EventKind::reference_strike && e.user == u) t.push_back(e.t);
  return t;
}

World::World(Scenario scenario) : scenario_(std::move(scenario)), rng_(scenario_.seed) {
  const std::vector<std::string> problems = check(scenario_);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid scenario";
    for (const auto& p : problems) msg << "; " << p;
    throw InvalidInput(msg.str());
  }
  n_ticks_ = scenario_.tick_count();

  std::normal_distribution<double> normal(0.0, 1.0);
  for (User u : {User::a, User::b}) {
    const AgentConfig& cfg = scenario_.agent(u);
    patterns_[index(u)] = cfg.pattern;
    draw_stride_warp(u);
    double phase = cfg.initial_phase;
    if (scenario_.initial_phase_jitter > 0.0) phase += scenario_.initial_phase_jitter * normal(rng_);
    AgentState s = state_on_reference(phase, patterns_[index(u)], cfg.phi);
    if (cfg.fixed_stance)
      s.support = *cfg.fixed_stance == Side::left ? Support::left_stance : Support::right_stance;
    states_[index(u)] = s;
  }
  history_.assign(static_cast<std::size_t>(scenario_.latency_ticks) + 1, states_);

  log_.label = scenario_.label;
  log_.dt = scenario_.dt;
  log_.space = scenario_.coupling.space;
  log_.bodies = {scenario_.agents[0].body, scenario_.agents[1].body};
  log_.records.reserve(n_ticks_);
}

void World::draw_stride_warp(User u) {
  if (scenario_.reference_phase_jitter <= 0.0) return;
  std::normal_distribution<double> normal(0.0, scenario_.reference_phase_jitter);
  // Keep the warped clock monotonic.
  patterns_[index(u)].phase_warp = std::clamp(normal(rng_), -0.25, 0.25);
}

Side World::stance_of(User u, const AgentState& s) const {
  const AgentConfig& cfg = scenario_.agent(u);
  if (cfg.fixed_stance) return *cfg.fixed_stance;
  return stance_from_phase(s.phase, patterns_[index(u)]);
}

void World::step() {
  if (done()) return;
  const double dt = scenario_.dt;
  const double t = static_cast<double>(tick_) * dt;

  // (1) delayed, possibly noisy, view of both users.
  std::array<AgentState, 2> view = history_.front();
  if (scenario_.sensor_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, scenario_.sensor_noise);
    for (AgentState& s : view)
      for (int j = 0; j < 4; ++j) s.q[j] += noise(rng_);
  }

  // (2) coupling node.
  const CouplingInputs in{view[0],
                          view[1],
                          stance_of(User::a, view[0]),
                          stance_of(User::b, view[1]),
                          scenario_.agents[0].body,
                          scenario_.agents[1].body};
  const TorquePair desired = desired_torques(in, scenario_.coupling);

  TickRecord rec;
  rec.t = t;
  rec.state = states_;
  rec.torque[0].desired = desired.a;
  rec.torque[1].desired = desired.b;

  for (User u : {User::a, User::b}) {
    const int i = index(u);
    const AgentConfig& cfg = scenario_.agent(u);

    // (3) local rendering.
    const RenderResult r = render(rec.torque[i].desired.tail<4>(), states_[i], scenario_.limits,
                                  prev_applied_[i], dt);
    rec.torque[i].applied.tail<4>() = r.applied;
    prev_applied_[i] = r.applied;
    for (int j = 0; j < 4; ++j) {
      if (r.flags.torque[j] && !prev_flags_[i].torque[j])
        log_.events.push_back({EventKind::torque_limit, u, j, tick_, t});
      if (r.flags.power[j] && !prev_flags_[i].power[j])
        log_.events.push_back({EventKind::power_limit, u, j, tick_, t});
      if (r.flags.velocity[j] && !prev_flags_[i].velocity[j])
        log_.events.push_back({EventKind::velocity_limit, u, j, tick_, t});
    }
    prev_flags_[i] = r.flags;

    rec.stance[i] = stance_of(u, states_[i]);
    rec.ankle[i] = forward_kinematics(states_[i].generalized(), other(rec.stance[i]), cfg.body);

    // (4) agent dynamics.
    const StepResult sr = agent_step_detail(states_[i], r.applied, patterns_[i], cfg.impedance, dt,
                                            cfg.joint_limits);
    AgentState next = sr.state;
    // (5) stance/support refresh.
    if (cfg.fixed_stance)
      next.support = *cfg.fixed_stance == Side::left ? Support::left_stance : Support::right_stance;
    for (int j = 0; j < 4; ++j)
      if (sr.limited[j] && !prev_limited_[i][j])
        log_.events.push_back({EventKind::joint_limit, u, j, tick_, t});
    prev_limited_[i] = sr.limited;
    if (sr.wrapped) {
      log_.events.push_back({EventKind::reference_strike, u, -1, tick_, t + sr.wrap_fraction * dt});
      draw_stride_warp(u);
    }

    for (int j = 0; j < 4; ++j) {
      if (!std::isfinite(next.qdot[j]) || std::abs(next.qdot[j]) > kAbortSpeed) {
        std::ostringstream msg;
        msg << "simulation diverged at tick " << tick_ << " (t=" << t << " s): user "
            << (u == User::a ? "A" : "B") << " joint " << j << " speed " << next.qdot[j]
            << " rad/s exceeds " << kAbortSpeed << " rad/s";
        throw SimulationAborted(tick_, msg.str());
      }
    }
    states_[i] = next;
  }

  // (6) log and advance the transport buffer.
  log_.records.push_back(rec);
  history_.push_back(states_);
  history_.pop_front();
  ++tick_;
}

World build_world(const Scenario& scenario) { return World(scenario); }

void step(World& world) { world.step(); }

TrialLog run_trial(const Scenario& scenario) {
  World world(scenario);
  while (!world.done()) world.step();
  return world.take_log();
}

}  // namespace exodyad
