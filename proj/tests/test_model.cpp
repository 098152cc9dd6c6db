#include <doctest.h>

#include "exodyad/model.hpp"
#include "exodyad/presets.hpp"
#include "oracles.hpp"

using namespace exodyad;

namespace {

BodyGeometry half_metre() { return BodyGeometry::symmetric({0.5, 0.5}); }

Vec5 gen_of(double phi, double hl, double kl, double hr, double kr) {
  Vec5 g;
  g << phi, hl, kl, hr, kr;
  return g;
}

}  // namespace

TEST_CASE("forward kinematics: hand-built configurations") {
  const BodyGeometry b = half_metre();
  CHECK(forward_kinematics(Vec5::Zero(), Side::right, b).norm() < 1e-15);

  const Vec2 r90 = forward_kinematics(gen_of(0, 0, 0, deg2rad(90), deg2rad(90)), Side::right, b);
  CHECK(r90.x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r90.y() == doctest::Approx(0.5).epsilon(1e-12));

  const Vec2 r30 = forward_kinematics(gen_of(0, 0, 0, deg2rad(30), 0), Side::right, b);
  CHECK(r30.x() == doctest::Approx(2 * 0.5 * std::sin(deg2rad(30))).epsilon(1e-12));
  CHECK(r30.y() == doctest::Approx(1 - 2 * 0.5 * std::cos(deg2rad(30))).epsilon(1e-12));
}

TEST_CASE("forward kinematics matches a point-by-point chain walk") {
  gen::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Vec5 g = rng.configuration();
    const BodyGeometry b = rng.body();
    for (Side swing : {Side::left, Side::right}) {
      const auto& st = b.leg(other(swing));
      const auto& sw = b.leg(swing);
      const Vec2 want = oracle::swing_ankle(g, swing == Side::right, st.thigh_len, st.shank_len,
                                            sw.thigh_len, sw.shank_len);
      CHECK((forward_kinematics(g, swing, b) - want).norm() < 1e-12);
    }
  }
}

TEST_CASE("swapping the swing leg and exchanging joint values gives the same ankle") {
  gen::Rng rng(12);
  const BodyGeometry b = BodyGeometry::symmetric({0.42, 0.47});
  for (int i = 0; i < 200; ++i) {
    const Vec5 g = rng.configuration();
    const Vec5 swapped = gen_of(g[0], g[3], g[4], g[1], g[2]);
    CHECK((forward_kinematics(g, Side::right, b) - forward_kinematics(swapped, Side::left, b)).norm() <
          1e-14);
  }
}

TEST_CASE("forward kinematics rejects bad inputs") {
  const BodyGeometry b;
  Vec5 g = Vec5::Zero();
  g[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward_kinematics(g, Side::left, b), InvalidInput);
  CHECK_THROWS_AS(swing_jacobian(g, Side::left, b), InvalidInput);
  CHECK_THROWS_AS(forward_kinematics(Vec5::Zero(), static_cast<Side>(7), b), InvalidInput);
  CHECK_THROWS_AS(validate(SegmentParams{0.0, 0.4}), InvalidInput);
  CHECK_THROWS_AS(validate(SegmentParams{0.4, -1.0}), InvalidInput);
}

TEST_CASE("jacobian: known columns at the zero configuration") {
  const Mat25 J = swing_jacobian(Vec5::Zero(), Side::right, half_metre());
  CHECK(J.col(0).norm() < 1e-15);
  CHECK(J(0, 1 + joint::knee_right) == doctest::Approx(-0.5));
  CHECK(std::abs(J(1, 1 + joint::knee_right)) < 1e-15);
}

TEST_CASE("jacobian matches central differences of the chain-walk oracle") {
  gen::Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Vec5 g = rng.configuration();
    const BodyGeometry b = rng.body();
    const Side swing = rng.coin() ? Side::left : Side::right;
    const auto& st = b.leg(other(swing));
    const auto& sw = b.leg(swing);
    const auto f = [&](const Vec5& x) {
      return oracle::swing_ankle(x, swing == Side::right, st.thigh_len, st.shank_len, sw.thigh_len,
                                 sw.shank_len);
    };
    const auto Jfd = oracle::central_jacobian(f, g, 1e-6);
    const Mat25 J = swing_jacobian(g, swing, b);
    CHECK((J - Jfd).norm() / Jfd.norm() <= 1e-6);
  }
}

TEST_CASE("stance-leg columns of the jacobian are generally nonzero") {
  const Vec5 g = gen_of(0.1, 0.2, 0.3, 0.9, 1.1);
  const Mat25 J = swing_jacobian(g, Side::right, BodyGeometry{});
  CHECK(J.col(1 + joint::hip_left).norm() > 0.1);
  CHECK(J.col(1 + joint::knee_left).norm() > 0.1);
}

TEST_CASE("swing-leg inverse kinematics reproduces reachable targets") {
  gen::Rng rng(14);
  const BodyGeometry b;
  int solved = 0;
  for (int i = 0; i < 300; ++i) {
    Vec5 g = rng.configuration();
    g[1 + joint::knee_right] = rng.uniform(0.05, 2.3);
    const Vec2 target = forward_kinematics(g, Side::right, b);
    const Vec2 hk = swing_leg_ik(g, Side::right, b, target);
    Vec5 h = g;
    h[1 + joint::hip_right] = hk[0];
    h[1 + joint::knee_right] = hk[1];
    CHECK(hk[1] >= 0.0);
    CHECK((forward_kinematics(h, Side::right, b) - target).norm() < 1e-10);
    ++solved;
  }
  CHECK(solved == 300);
  CHECK_THROWS_AS(swing_leg_ik(Vec5::Zero(), Side::right, b, Vec2(3.0, 0.0)), InvalidInput);
}

TEST_CASE("gait reference: zero range of motion holds the offsets") {
  GaitPattern p = default_gait(0.7);
  p.set_rom_scale(0.0);
  for (double ph : {0.0, 0.13, 0.5, 0.77, 0.999}) {
    const ReferenceSample r = gait_reference(ph, p);
    CHECK(r.q[joint::hip_left] == p.legs[0].hip.offset);
    CHECK(r.q[joint::knee_right] == p.legs[1].knee.offset);
    CHECK(r.qdot.isZero());
  }
}

TEST_CASE("gait reference: right leg is the left leg half a cycle later") {
  const GaitPattern p = default_gait(0.5);
  gen::Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    const double ph = rng.uniform(0.0, 1.0);
    double later = ph + 0.5;
    later -= std::floor(later);
    const ReferenceSample now = gait_reference(ph, p);
    const ReferenceSample then = gait_reference(later, p);
    CHECK(now.q[joint::hip_right] == doctest::Approx(then.q[joint::hip_left]).epsilon(1e-12));
    CHECK(now.q[joint::knee_right] == doctest::Approx(then.q[joint::knee_left]).epsilon(1e-12));
  }
}

TEST_CASE("gait reference: default extremes equal offset plus or minus amplitude") {
  const GaitPattern p = default_gait(0.5);
  double hmin = 1e9, hmax = -1e9, kmin = 1e9, kmax = -1e9;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const ReferenceSample r = gait_reference(static_cast<double>(i) / n, p);
    hmin = std::min(hmin, r.q[0]);
    hmax = std::max(hmax, r.q[0]);
    kmin = std::min(kmin, r.q[1]);
    kmax = std::max(kmax, r.q[1]);
  }
  CHECK(rad2deg(hmin) == doctest::Approx(-10.0).epsilon(1e-6));
  CHECK(rad2deg(hmax) == doctest::Approx(35.0).epsilon(1e-6));
  CHECK(std::abs(rad2deg(kmin)) < 1e-9);
  CHECK(rad2deg(kmax) == doctest::Approx(65.0).epsilon(1e-6));
}

TEST_CASE("gait reference: knee never negative, velocity is the time derivative") {
  std::vector<GaitPattern> patterns{default_gait(0.5), uni_joint::leader_pattern(0.5)};
  GaitPattern warped = default_gait(0.9);
  warped.phase_warp = 0.2;
  warped.set_rom_scale(0.6);
  patterns.push_back(warped);
  for (const GaitPattern& p : patterns) {
    for (int i = 0; i < 2000; ++i) {
      const double ph = (i + 0.5) / 2000.0;
      const ReferenceSample r = gait_reference(ph, p);
      CHECK(r.q[joint::knee_left] >= 0.0);
      CHECK(r.q[joint::knee_right] >= 0.0);
      // d/dt via the phase clock, central differences.
      const double dt = 1e-6;
      const Vec4 fd = (gait_reference(ph + p.cadence * dt, p).q - gait_reference(ph - p.cadence * dt, p).q) /
                      (2.0 * dt);
      CHECK((fd - r.qdot).norm() < 1e-5 * (1.0 + r.qdot.norm()));
    }
  }
}

TEST_CASE("gait reference: phase zero is the left heel strike of the default geometry") {
  const AgentState s = state_on_reference(0.0, default_gait(0.5));
  const double h = forward_kinematics(s.generalized(), Side::left, BodyGeometry{}).y();
  CHECK(h == doctest::Approx(0.02).epsilon(1e-8));
}

TEST_CASE("gait pattern validation") {
  GaitPattern p = default_gait(0.5);
  CHECK_NOTHROW(validate(p));
  p.cadence = 0.0;
  CHECK_THROWS_AS(validate(p), InvalidInput);
  p = default_gait(0.5);
  p.knee_rom_scale = 1.5;  // would drive the knee below zero
  CHECK_THROWS_AS(validate(p), InvalidInput);
  p = default_gait(0.5);
  p.phase_warp = 0.4;
  CHECK_THROWS_AS(validate(p), InvalidInput);
}

TEST_CASE("agent: zero torque on a constant reference stays put") {
  gen::Rng rng(16);
  GaitPattern p = default_gait(0.5);
  p.set_rom_scale(0.0);
  p.legs[0].hip.offset = rng.uniform(0.0, 0.5);
  p.legs[1].knee.offset = rng.uniform(0.1, 1.0);
  AgentState s = state_on_reference(0.3, p);
  const Vec4 q_ref = s.q;
  for (int i = 0; i < 5000; ++i) {
    s = agent_step(s, Vec4::Zero(), p, ImpedanceParams{}, 0.003);
    CHECK((s.q - q_ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("agent: constant torque settles at tau / kp") {
  GaitPattern p = default_gait(0.5);
  p.set_rom_scale(0.0);
  ImpedanceParams imp;
  imp.kp = Vec4::Constant(100.0);
  AgentState s = state_on_reference(0.0, p);
  const Vec4 q_ref = s.q;
  Vec4 tau = Vec4::Zero();
  tau[joint::hip_right] = 3.0;
  for (int i = 0; i < 10000; ++i) s = agent_step(s, tau, p, imp, 0.003);
  CHECK(s.q[joint::hip_right] - q_ref[joint::hip_right] == doctest::Approx(0.03).epsilon(1e-9));
  CHECK(std::abs(s.q[joint::hip_left] - q_ref[joint::hip_left]) < 1e-12);
}

TEST_CASE("agent: integration converges at first order") {
  const GaitPattern p = default_gait(0.6);
  Vec4 tau;
  tau << 2.0, -1.0, 0.5, 1.5;
  auto run = [&](double dt) {
    AgentState s = state_on_reference(0.1, p);
    s.qdot += Vec4::Constant(0.3);
    const int n = static_cast<int>(std::lround(10.0 / dt));
    for (int i = 0; i < n; ++i) s = agent_step(s, tau, p, ImpedanceParams{}, dt);
    return s.q;
  };
  const Vec4 a = run(0.004), b = run(0.002), c = run(0.001);
  const double ratio = (a - b).norm() / (b - c).norm();
  CHECK(ratio > 1.7);
  CHECK(ratio < 2.3);
}

TEST_CASE("agent: unforced energy about a constant reference never grows") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    GaitPattern p = default_gait(0.5);
    p.set_rom_scale(0.0);
    ImpedanceParams imp;
    imp.kp = rng.vec4(20.0, 200.0);
    imp.kd = rng.vec4(0.0, 10.0);
    imp.viscous = rng.vec4(0.0, 2.0);
    imp.inertia = rng.vec4(0.1, 1.0);
    const double dt = 0.003;
    AgentState s = state_on_reference(0.0, p);
    const Vec4 q_ref = s.q;
    s.q += rng.vec4(-0.1, 0.1);
    s.qdot = rng.vec4(-1.0, 1.0);
    // Energy of the discrete scheme (kinetic + spring, with the symplectic-Euler
    // cross term), which the undamped step preserves exactly.
    auto energy = [&](const AgentState& x) {
      const Vec4 e = x.q - q_ref;
      double E = 0.0;
      for (int j = 0; j < 4; ++j)
        E += 0.5 * imp.inertia[j] * x.qdot[j] * x.qdot[j] + 0.5 * imp.kp[j] * e[j] * e[j] -
             0.5 * dt * imp.kp[j] * e[j] * x.qdot[j];
      return E;
    };
    const double E0 = energy(s);
    double prev = E0;
    for (int i = 0; i < 3000; ++i) {
      s = agent_step(s, Vec4::Zero(), p, imp, dt, JointLimits{{-10, 10}, {-10, 10}});
      const double E = energy(s);
      CHECK(E <= prev + 1e-6 * E0);
      prev = E;
    }
  }
}

TEST_CASE("agent: joint limits clamp position and zero velocity") {
  GaitPattern p = default_gait(0.5);
  p.set_rom_scale(0.0);
  AgentState s = state_on_reference(0.0, p);
  Vec4 tau = Vec4::Zero();
  tau[joint::knee_left] = -500.0;
  StepResult r;
  for (int i = 0; i < 200; ++i) {
    r = agent_step_detail(s, tau, p, ImpedanceParams{}, 0.003);
    s = r.state;
  }
  CHECK(s.q[joint::knee_left] == 0.0);
  CHECK(s.qdot[joint::knee_left] == 0.0);
  CHECK(r.limited[joint::knee_left]);
}

TEST_CASE("agent: phase advances at the cadence and wraps") {
  const GaitPattern p = default_gait(0.5);
  AgentState s = state_on_reference(0.999, p);
  const StepResult r = agent_step_detail(s, Vec4::Zero(), p, ImpedanceParams{}, 0.003);
  CHECK(r.wrapped);
  CHECK(r.state.phase == doctest::Approx(0.999 + 0.0015 - 1.0));
  CHECK(r.wrap_fraction == doctest::Approx(0.001 / 0.0015));
}

TEST_CASE("agent: rejects bad inputs") {
  const GaitPattern p = default_gait(0.5);
  const AgentState s = state_on_reference(0.0, p);
  CHECK_THROWS_AS(agent_step(s, Vec4::Zero(), p, ImpedanceParams{}, 0.0), InvalidInput);
  Vec4 bad = Vec4::Zero();
  bad[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(agent_step(s, bad, p, ImpedanceParams{}, 0.003), InvalidInput);
  ImpedanceParams imp;
  imp.kd[0] = -1.0;
  CHECK_THROWS_AS(validate(imp), InvalidInput);
}

TEST_CASE("support follows the per-leg loading windows") {
  const GaitPattern p = default_gait(0.5);
  CHECK(support_from_phase(0.05, p) == Support::double_support);
  CHECK(support_from_phase(0.3, p) == Support::left_stance);
  CHECK(support_from_phase(0.8, p) == Support::right_stance);
  CHECK(stance_from_phase(0.2, p) == Side::left);
  CHECK(stance_from_phase(0.7, p) == Side::right);
}

TEST_CASE("endpoint stiffness agrees with a direct compliance computation") {
  gen::Rng rng(18);
  for (int i = 0; i < 50; ++i) {
    const Vec5 g = rng.configuration();
    const Vec4 kp = rng.vec4(5.0, 100.0);
    const auto& body = BodyGeometry{};
    const auto f = [&](const Vec5& x) { return oracle::swing_ankle(x, true, 0.45, 0.45, 0.45, 0.45); };
    const auto J = oracle::central_jacobian(f, g, 1e-6);
    double c = 0.0;
    for (int j = 0; j < 4; ++j) c += J(1, j + 1) * J(1, j + 1) / kp[j];
    CHECK(vertical_endpoint_stiffness(g, Side::right, body, kp) == doctest::Approx(1.0 / c).epsilon(1e-6));
  }
}
