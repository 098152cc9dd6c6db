#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exodyad/coupling.hpp"
#include "exodyad/model.hpp"

namespace exodyad {

struct AgentConfig {
  BodyGeometry body;
  GaitPattern pattern;
  ImpedanceParams impedance;
  JointLimits joint_limits;
  double initial_phase = 0.0;
  double phi = 0.0;  // constant torso pitch, rad
  // Stationary trials pin the stance leg; walking trials derive it from the phase.
  std::optional<Side> fixed_stance;
};

struct Scenario {
  std::string label = "custom";
  double duration = 60.0;  // s
  double dt = 0.003;       // s, single control/physics rate
  int latency_ticks = 0;   // age of the states seen by the coupling node
  std::array<AgentConfig, 2> agents{};
  CouplingConfig coupling;
  RenderLimits limits;
  double treadmill_speed_kmh = 0.8;
  std::uint64_t seed = 0;
  // Stochastic terms, all zero by default.
  double initial_phase_jitter = 0.0;    // std of the initial phase, cycles
  double sensor_noise = 0.0;            // std of joint-angle noise seen by the coupling node, rad
  double reference_phase_jitter = 0.0;  // std of the per-stride reference clock warp

  const AgentConfig& agent(User u) const { return agents[index(u)]; }
  AgentConfig& agent(User u) { return agents[index(u)]; }
  std::size_t tick_count() const;
};

/// Every violated Scenario/CouplingConfig/RenderLimits rule, each naming its field.
std::vector<std::string> check(const Scenario& s, std::vector<std::string>* warnings = nullptr);

struct TorqueCommand {
  Vec5 desired = Vec5::Zero();  // [backpack, hipL, kneeL, hipR, kneeR]
  Vec5 applied = Vec5::Zero();  // backpack is logged only, never actuated
};

struct TickRecord {
  double t = 0.0;
  std::array<AgentState, 2> state{};
  std::array<TorqueCommand, 2> torque{};
  std::array<Vec2, 2> ankle{Vec2::Zero(), Vec2::Zero()};  // swing ankle in the stance frame
  std::array<Side, 2> stance{Side::left, Side::left};
};

enum class EventKind { reference_strike, torque_limit, power_limit, velocity_limit, joint_limit };

std::string to_string(EventKind k);

struct Event {
  EventKind kind;
  User user;
  int joint = -1;  // -1 when not joint-specific
  std::size_t tick = 0;
  double t = 0.0;
};

struct TrialLog {
  std::string label;
  double dt = 0.0;
  CouplingSpace space = CouplingSpace::joint;
  std::array<BodyGeometry, 2> bodies{};
  std::vector<TickRecord> records;
  std::vector<Event> events;

  std::size_t size() const { return records.size(); }
  std::vector<double> reference_strikes(User u) const;
};

class SimulationAborted : public std::runtime_error {
 public:
  SimulationAborted(std::size_t tick, const std::string& what)
      : std::runtime_error(what), tick_(tick) {}
  std::size_t tick() const { return tick_; }

 private:
  std::size_t tick_;
};

/// Joint speed beyond which a trial is considered diverged.
inline constexpr double kAbortSpeed = 50.0;  // rad/s

/// Two agents, the coupling node and the rendering stage, advanced in lockstep.
///
/// Each tick runs, in order:
///   1. the coupling node reads both states as they were `latency_ticks` ago;
///   2. it computes desired interaction torques (coupling space + mode);
///   3. each user's renderer turns them into applied torques from its local state;
///   4. each agent integrates one dt with its applied torque;
///   5. stance assignments are refreshed from the new phases;
///   6. the tick (pre-integration states and the torques acting over the tick)
///      is appended to the log.
class World {
 public:
  explicit World(Scenario scenario);

  void step();
  bool done() const { return tick_ >= n_ticks_; }
  std::size_t tick() const { return tick_; }

  const Scenario& scenario() const { return scenario_; }
  const AgentState& state(User u) const { return states_[index(u)]; }
  const TrialLog& log() const { return log_; }
  TrialLog take_log() { return std::move(log_); }

  /// States the coupling node will read on the next tick.
  const std::array<AgentState, 2>& delayed_view() const { return history_.front(); }

 private:
  Side stance_of(User u, const AgentState& s) const;
  void draw_stride_warp(User u);

  Scenario scenario_;
  std::size_t n_ticks_ = 0;
  std::size_t tick_ = 0;
  std::array<AgentState, 2> states_{};
  std::array<GaitPattern, 2> patterns_{};  // per-agent copy carrying the current stride warp
  std::deque<std::array<AgentState, 2>> history_;
  std::array<Vec4, 2> prev_applied_{Vec4::Zero(), Vec4::Zero()};
  std::array<RenderFlags, 2> prev_flags_{};
  std::array<std::array<bool, 4>, 2> prev_limited_{};
  std::mt19937_64 rng_;
  TrialLog log_;
};

World build_world(const Scenario& scenario);
void step(World& world);
TrialLog run_trial(const Scenario& scenario);

}  // namespace exodyad
