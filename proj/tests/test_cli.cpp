#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "exodyad/config.hpp"
#include "exodyad/io.hpp"
#include "exodyad/presets.hpp"
#include "exodyad/runner.hpp"
#include "oracles.hpp"

using namespace exodyad;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("exodyad_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(EXODYAD_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Rows of a CSV file keyed by column name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(f, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

Scenario parse(const std::string& text, ConfigReport& report) {
  std::istringstream in(text);
  return parse_config(in, report, "test");
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("config files: values, broadcasts and base presets") {
  ConfigReport r;
  const Scenario s = parse(R"(
    # stiff coupling on the hips only
    base = soft
    label = probe
    duration = 12.5
    coupling.joint.stiffness = 80, 0, 80, 0
    coupling.joint.damping = 5
    limits.tau_max = inf
    limits.lag_tau = 0.02
    agents.B.cadence = 0.6
    agents.A.joint_limits.knee = 0 2.0
  )", r);
  CHECK(r.ok());
  CHECK(s.label == "probe");
  CHECK(s.duration == 12.5);
  CHECK(s.coupling.mode == CouplingMode::bidirectional);
  CHECK(s.coupling.joint.stiffness == Vec4(80, 0, 80, 0));
  CHECK(s.coupling.joint.damping == Vec4::Constant(5.0));
  CHECK(std::isinf(s.limits.tau_max[0]));
  CHECK(s.limits.lag_tau == 0.02);
  CHECK(s.agent(User::b).pattern.cadence == 0.6);
  CHECK(s.agent(User::a).joint_limits.knee == Vec2(0.0, 2.0));
  // Untouched values come from the base preset.
  CHECK(s.agent(User::b).pattern.hip_rom_scale == dyad::rom_scale_b);
}

TEST_CASE("config files: every problem is reported with its field") {
  ConfigReport r;
  parse(R"(
    coupling.joint.dampnig = 3
    coupling.mode = sideways
    duration = soon
    no equals sign here
  )", r);
  CHECK(r.violations.size() == 4);
  CHECK(mentions(r.violations, "coupling.joint.dampnig"));
  CHECK(mentions(r.violations, "coupling.mode"));
  CHECK(mentions(r.violations, "duration"));
  CHECK(mentions(r.violations, "test:5"));
}

TEST_CASE("validation names the field and explains the competitive flag") {
  ConfigReport r;
  Scenario s = parse("base = hard\ncoupling.joint.damping = 10 -1 10 10\n", r);
  REQUIRE(r.ok());
  ConfigReport v = validate(s);
  CHECK_FALSE(v.ok());
  CHECK(mentions(v.violations, "coupling.joint.damping"));

  s = parse("base = hard\ncoupling.joint.stiffness = -20\n", r);
  v = validate(s);
  CHECK_FALSE(v.ok());
  CHECK(mentions(v.violations, "coupling.joint.stiffness"));
  CHECK(mentions(v.violations, "competitive"));

  s = parse("base = hard\ncoupling.joint.stiffness = -20\ncoupling.competitive = true\n", r);
  v = validate(s);
  CHECK(v.ok());
  CHECK(mentions(v.warnings, "competitive"));
}

TEST_CASE("every preset validates without violations") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ConfigReport v = validate(preset(name));
    CHECK(v.ok());
    CHECK(preset(name).label == name);
  }
  CHECK_THROWS_AS(preset("medium"), UnknownPreset);
  try {
    preset("medium");
  } catch (const UnknownPreset& e) {
    CHECK(std::string(e.what()).find("hard-knee20") != std::string::npos);
  }
}

TEST_CASE("preset contents") {
  const Scenario nc = preset("nc"), soft = preset("soft"), hard = preset("hard");
  CHECK(nc.coupling.mode == CouplingMode::none);
  CHECK(soft.coupling.joint.stiffness == Vec4::Constant(30.0));
  CHECK(soft.coupling.joint.damping == Vec4::Constant(4.0));
  CHECK(hard.coupling.joint.stiffness == Vec4::Constant(70.0));
  CHECK(hard.coupling.joint.damping == Vec4::Constant(10.0));
  for (const Scenario* s : {&nc, &soft, &hard}) {
    CHECK(s->duration == 60.0);
    CHECK(s->dt == 0.003);
    CHECK(s->agent(User::b).pattern.cadence == doctest::Approx(1.1 * s->agent(User::a).pattern.cadence));
  }
  const Scenario hip = preset("hard-hip30"), knee = preset("hard-knee20");
  CHECK(hip.coupling.joint.neutral == Vec4(deg2rad(30), 0, deg2rad(30), 0));
  CHECK(knee.coupling.joint.neutral == Vec4(0, deg2rad(20), 0, deg2rad(20)));
  const Scenario uj = preset("uni-joint");
  CHECK(uj.coupling.mode == CouplingMode::uni_a_to_b);
  CHECK(uj.coupling.space == CouplingSpace::joint);
  const Scenario ts = preset("uni-task-static");
  CHECK(ts.coupling.space == CouplingSpace::task);
  CHECK(ts.coupling.mode == CouplingMode::uni_a_to_b);
  CHECK(ts.treadmill_speed_kmh == 0.0);
  for (const AgentConfig& a : ts.agents) {
    CHECK(a.pattern.hip_rom_scale == 0.0);
    CHECK(a.pattern.knee_rom_scale == 0.0);
    CHECK(a.fixed_stance == Side::left);
  }
}

TEST_CASE("leader swing path follows the enlarged default path") {
  const LegCurves def = default_leg_curves(), lead = uni_joint::leader_left_curves();
  GaitPattern pd = default_gait(0.5), pl = default_gait(0.5);
  pl.legs[0] = lead;
  const SegmentParams leg;
  std::vector<Vec2> base, fitted;
  for (int i = 0; i < 1000; ++i) {
    const double p = i / 1000.0;
    const Vec4 qd = gait_reference(p, pd).q, ql = gait_reference(p, pl).q;
    base.push_back(oracle::ankle_from_hip(qd[0], qd[1], leg.thigh_len, leg.shank_len));
    fitted.push_back(oracle::ankle_from_hip(ql[0], ql[1], leg.thigh_len, leg.shank_len));
  }
  const auto target = oracle::enlarged_path(base, uni_joint::horizontal_scale, uni_joint::vertical_scale,
                                            leg.thigh_len + leg.shank_len);
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) sum += (target[i] - fitted[i]).squaredNorm();
  CHECK(std::sqrt(sum / target.size()) <= 0.01);
  (void)def;
}

TEST_CASE("timeseries round trip is bit exact") {
  Scenario s = preset("hard");
  s.duration = 2.0;
  s.sensor_noise = 0.01;
  const TrialLog log = run_trial(s);
  std::stringstream buf;
  write_timeseries(buf, log);
  const TrialLog back = read_timeseries(buf);
  REQUIRE(back.size() == log.size());
  CHECK(back.dt == doctest::Approx(log.dt));
  for (std::size_t k = 0; k < log.size(); ++k) {
    const TickRecord &a = log.records[k], &b = back.records[k];
    CHECK(a.t == b.t);
    for (int u = 0; u < 2; ++u) {
      CHECK(a.state[u].phi == b.state[u].phi);
      CHECK(a.state[u].q == b.state[u].q);
      CHECK(a.state[u].qdot == b.state[u].qdot);
      CHECK(a.state[u].phase == b.state[u].phase);
      CHECK(a.state[u].support == b.state[u].support);
      CHECK(a.torque[u].desired == b.torque[u].desired);
      CHECK(a.torque[u].applied == b.torque[u].applied);
      CHECK(a.ankle[u] == b.ankle[u]);
      CHECK(a.stance[u] == b.stance[u]);
    }
  }
  CHECK(timeseries_header().size() == 49);
  std::istringstream bad("t,foo\n0,1\n");
  CHECK_THROWS_AS(read_timeseries(bad), InvalidInput);
}

TEST_CASE("sweep specs and natural ordering") {
  const auto [name, values] = parse_sweep("K=0,30,70");
  CHECK(name == 'K');
  CHECK(values == std::vector<double>{0, 30, 70});
  CHECK(parse_sweep("C=4.5").second == std::vector<double>{4.5});
  CHECK_THROWS_AS(parse_sweep("K=1,,2"), InvalidInput);
  CHECK_THROWS_AS(parse_sweep("Q=1"), InvalidInput);
  CHECK_THROWS_AS(parse_sweep("K=fast"), InvalidInput);
  CHECK(natural_less("K=5", "K=30"));
  CHECK_FALSE(natural_less("K=30", "K=5"));
  CHECK(natural_less("K=30", "K=70"));
  CHECK(natural_less("K=2.5", "K=10"));
  CHECK(natural_less("hard", "hard-hip30"));
}

TEST_CASE("plan: overrides, sweeps and problems") {
  RunOptions opt;
  opt.preset = "soft";
  opt.duration = 5.0;
  opt.latency = 3;
  opt.k_scale = 2.0;
  std::vector<std::string> problems;
  auto plan = plan_run(opt, problems);
  REQUIRE(problems.empty());
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].scenario.duration == 5.0);
  CHECK(plan[0].scenario.latency_ticks == 3);
  CHECK(plan[0].scenario.coupling.joint.stiffness == Vec4::Constant(60.0));

  opt = {};
  opt.preset = "nc";
  opt.sweep_k = {0, 30};
  opt.sweep_c = {0, 4};
  plan = plan_run(opt, problems);
  REQUIRE(plan.size() == 2);
  CHECK(plan[0].name == "K=0_C=0");
  CHECK(plan[0].scenario.coupling.mode == CouplingMode::none);
  CHECK(plan[1].scenario.coupling.mode == CouplingMode::bidirectional);
  CHECK(plan[1].scenario.coupling.joint.damping == Vec4::Constant(4.0));

  opt = {};
  problems.clear();
  plan_run(opt, problems);
  CHECK_FALSE(problems.empty());
  opt.preset = "nope";
  problems.clear();
  plan_run(opt, problems);
  CHECK(mentions(problems, "uni-task-static"));
}

TEST_CASE("cli: a preset run writes three files") {
  Scratch tmp("run");
  const fs::path out = tmp.dir / "out";
  REQUIRE(cli("run --preset nc --duration 30 --out " + out.string(), tmp.dir / "log.txt") == 0);
  CHECK(fs::exists(out / "timeseries.csv"));
  CHECK(fs::exists(out / "cycles.csv"));
  CHECK(fs::exists(out / "summary.csv"));

  const auto ts = read_csv(out / "timeseries.csv");
  CHECK(ts.size() == 10000);
  for (const auto& row : ts)
    for (int j = 0; j < 5; ++j) {
      CHECK(std::stod(row.at("A.tau_app" + std::to_string(j))) == 0.0);
      CHECK(std::stod(row.at("B.tau_app" + std::to_string(j))) == 0.0);
    }
  const auto summary = read_csv(out / "summary.csv");
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].at("condition") == "nc");
  CHECK(std::stod(summary[0].at("hip_diff_deg")) > 0.0);

  const auto cycles = read_csv(out / "cycles.csv");
  CHECK(cycles.size() == 2u * 2u * 2u * 101u);
}

TEST_CASE("cli: the neutral-offset preset shifts the hips apart") {
  Scratch tmp("hip30");
  const fs::path out = tmp.dir / "out";
  REQUIRE(cli("run --preset hard-hip30 --out " + out.string(), tmp.dir / "log.txt") == 0);
  const auto summary = read_csv(out / "summary.csv");
  REQUIRE(summary.size() == 1);
  const double hip = std::stod(summary[0].at("hip_diff_deg"));
  const double knee = std::stod(summary[0].at("knee_diff_deg"));
  const double expected = rad2deg(oracle::static_neutral_difference(deg2rad(30.0), 70.0, 60.0, 60.0));
  CHECK(hip == doctest::Approx(expected).epsilon(0.2));
  CHECK(knee < 0.25 * hip);
}

TEST_CASE("cli: stiffness sweep gives monotonically smaller gaps") {
  Scratch tmp("sweep");
  const fs::path out = tmp.dir / "out";
  REQUIRE(cli("run --preset nc --sweep K=70,0,30 --out " + out.string(), tmp.dir / "log.txt") == 0);
  const auto rows = read_csv(out / "summary.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].at("condition") == "K=0");
  CHECK(rows[1].at("condition") == "K=30");
  CHECK(rows[2].at("condition") == "K=70");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i].at("hip_diff_deg")) < std::stod(rows[i - 1].at("hip_diff_deg")));
    CHECK(std::stod(rows[i].at("knee_diff_deg")) < std::stod(rows[i - 1].at("knee_diff_deg")));
  }
  for (const char* name : {"K=0", "K=30", "K=70"}) CHECK(fs::exists(out / name / "timeseries.csv"));
}

TEST_CASE("cli: exit codes") {
  Scratch tmp("codes");
  const fs::path log = tmp.dir / "log.txt";
  CHECK(cli("run --preset medium --out " + (tmp.dir / "x").string(), log) == exit_code::usage);
  CHECK(slurp(log).find("hard-hip30") != std::string::npos);
  CHECK(cli("run --bogus-flag", log) == exit_code::usage);
  CHECK(cli("run --preset nc --config x.cfg", log) == exit_code::usage);
  CHECK(cli("run --preset hard --validate", log) == exit_code::ok);
  CHECK(cli("presets", log) == exit_code::ok);
  CHECK(slurp(log).find("uni-task-static") != std::string::npos);

  const fs::path bad = tmp.dir / "bad.cfg";
  std::ofstream(bad) << "base = hard\ncoupling.joint.damping = -1\n";
  CHECK(cli("run --config " + bad.string() + " --validate", log) == exit_code::usage);
  CHECK(slurp(log).find("coupling.joint.damping") != std::string::npos);

  const fs::path wild = tmp.dir / "wild.cfg";
  std::ofstream(wild) << "base = hard\nduration = 5\ncoupling.competitive = true\n"
                         "coupling.joint.stiffness = -5000\n";
  CHECK(cli("run --config " + wild.string() + " --out " + (tmp.dir / "w").string(), log) ==
        exit_code::aborted);
  CHECK(slurp(log).find("tick") != std::string::npos);

  CHECK(cli("run --preset nc --duration 10 --out /proc/exodyad_nope", log) == exit_code::unwritable);
}
