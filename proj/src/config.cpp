#include "exodyad/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "exodyad/presets.hpp"

namespace exodyad {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& v) {
  std::string t = v;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_number(const std::string& w) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(w.c_str(), &end);
  if (end == w.c_str() || *end != '\0' || errno == ERANGE)
    throw InvalidInput("'" + w + "' is not a number");
  return v;
}

std::vector<double> numbers(const std::string& v, std::size_t expected) {
  const auto ws = tokens(v);
  std::vector<double> out;
  for (const auto& w : ws) out.push_back(to_number(w));
  if (out.size() == 1 && expected > 1) out.assign(expected, out[0]);
  if (out.size() != expected)
    throw InvalidInput("expected " + std::to_string(expected) + " value(s), got " +
                       std::to_string(out.size()));
  return out;
}

double scalar(const std::string& v) { return numbers(v, 1)[0]; }

template <int N>
Eigen::Matrix<double, N, 1> vec(const std::string& v) {
  const auto n = numbers(v, N);
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = n[static_cast<std::size_t>(i)];
  return out;
}

long long integer(const std::string& v) {
  const double d = scalar(v);
  if (d != static_cast<double>(static_cast<long long>(d))) throw InvalidInput("expected an integer");
  return static_cast<long long>(d);
}

bool boolean(const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw InvalidInput("expected true or false");
}

User user_of(const std::string& v) {
  const std::string t = trim(v);
  if (t == "A" || t == "a") return User::a;
  if (t == "B" || t == "b") return User::b;
  throw InvalidInput("expected A or B");
}

using Setter = std::function<void(Scenario&, const std::string&)>;

void add_agent_keys(std::map<std::string, Setter>& keys, User u) {
  const std::string p = std::string("agents.") + (u == User::a ? "A" : "B") + ".";
  auto agent = [u](Scenario& s) -> AgentConfig& { return s.agent(u); };
  keys[p + "cadence"] = [=](Scenario& s, const std::string& v) { agent(s).pattern.cadence = scalar(v); };
  keys[p + "rom_scale"] = [=](Scenario& s, const std::string& v) {
    agent(s).pattern.set_rom_scale(scalar(v));
  };
  keys[p + "hip_rom_scale"] = [=](Scenario& s, const std::string& v) {
    agent(s).pattern.hip_rom_scale = scalar(v);
  };
  keys[p + "knee_rom_scale"] = [=](Scenario& s, const std::string& v) {
    agent(s).pattern.knee_rom_scale = scalar(v);
  };
  keys[p + "phase_offset_right"] = [=](Scenario& s, const std::string& v) {
    agent(s).pattern.phase_offset_right = scalar(v);
  };
  keys[p + "initial_phase"] = [=](Scenario& s, const std::string& v) {
    agent(s).initial_phase = scalar(v);
  };
  keys[p + "phi"] = [=](Scenario& s, const std::string& v) { agent(s).phi = scalar(v); };
  keys[p + "phase_gain"] = [=](Scenario& s, const std::string& v) {
    agent(s).impedance.phase_gain = scalar(v);
  };
  keys[p + "thigh_len"] = [=](Scenario& s, const std::string& v) {
    for (auto& leg : agent(s).body.legs) leg.thigh_len = scalar(v);
  };
  keys[p + "shank_len"] = [=](Scenario& s, const std::string& v) {
    for (auto& leg : agent(s).body.legs) leg.shank_len = scalar(v);
  };
  keys[p + "fixed_stance"] = [=](Scenario& s, const std::string& v) {
    const std::string t = trim(v);
    if (t == "left") agent(s).fixed_stance = Side::left;
    else if (t == "right") agent(s).fixed_stance = Side::right;
    else if (t == "none") agent(s).fixed_stance.reset();
    else throw InvalidInput("expected left, right or none");
  };
  keys[p + "kp"] = [=](Scenario& s, const std::string& v) { agent(s).impedance.kp = vec<4>(v); };
  keys[p + "kd"] = [=](Scenario& s, const std::string& v) { agent(s).impedance.kd = vec<4>(v); };
  keys[p + "inertia"] = [=](Scenario& s, const std::string& v) {
    agent(s).impedance.inertia = vec<4>(v);
  };
  keys[p + "viscous"] = [=](Scenario& s, const std::string& v) {
    agent(s).impedance.viscous = vec<4>(v);
  };
  keys[p + "joint_limits.hip"] = [=](Scenario& s, const std::string& v) {
    agent(s).joint_limits.hip = vec<2>(v);
  };
  keys[p + "joint_limits.knee"] = [=](Scenario& s, const std::string& v) {
    agent(s).joint_limits.knee = vec<2>(v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> k;
    k["label"] = [](Scenario& s, const std::string& v) { s.label = trim(v); };
    k["duration"] = [](Scenario& s, const std::string& v) { s.duration = scalar(v); };
    k["dt"] = [](Scenario& s, const std::string& v) { s.dt = scalar(v); };
    k["latency_ticks"] = [](Scenario& s, const std::string& v) {
      s.latency_ticks = static_cast<int>(integer(v));
    };
    k["seed"] = [](Scenario& s, const std::string& v) {
      const long long n = integer(v);
      if (n < 0) throw InvalidInput("seed must be >= 0");
      s.seed = static_cast<std::uint64_t>(n);
    };
    k["treadmill_speed"] = [](Scenario& s, const std::string& v) { s.treadmill_speed_kmh = scalar(v); };
    k["initial_phase_jitter"] = [](Scenario& s, const std::string& v) {
      s.initial_phase_jitter = scalar(v);
    };
    k["sensor_noise"] = [](Scenario& s, const std::string& v) { s.sensor_noise = scalar(v); };
    k["reference_phase_jitter"] = [](Scenario& s, const std::string& v) {
      s.reference_phase_jitter = scalar(v);
    };

    k["coupling.space"] = [](Scenario& s, const std::string& v) {
      s.coupling.space = parse_coupling_space(trim(v));
    };
    k["coupling.mode"] = [](Scenario& s, const std::string& v) {
      s.coupling.mode = parse_coupling_mode(trim(v));
    };
    k["coupling.competitive"] = [](Scenario& s, const std::string& v) {
      s.coupling.competitive = boolean(v);
    };
    k["coupling.joint.stiffness"] = [](Scenario& s, const std::string& v) {
      s.coupling.joint.stiffness = vec<4>(v);
    };
    k["coupling.joint.damping"] = [](Scenario& s, const std::string& v) {
      s.coupling.joint.damping = vec<4>(v);
    };
    k["coupling.joint.neutral"] = [](Scenario& s, const std::string& v) {
      s.coupling.joint.neutral = vec<4>(v);
    };
    k["coupling.task.stiffness"] = [](Scenario& s, const std::string& v) {
      s.coupling.task.stiffness = vec<2>(v);
    };
    k["coupling.task.damping"] = [](Scenario& s, const std::string& v) {
      s.coupling.task.damping = vec<2>(v);
    };
    k["coupling.task.neutral"] = [](Scenario& s, const std::string& v) {
      s.coupling.task.neutral = vec<2>(v);
    };
    auto asym = [](Scenario& s) -> AsymmetricGains& {
      if (!s.coupling.asymmetric) s.coupling.asymmetric.emplace();
      return *s.coupling.asymmetric;
    };
    k["coupling.asymmetric.felt_by"] = [=](Scenario& s, const std::string& v) {
      asym(s).felt_by = user_of(v);
    };
    k["coupling.asymmetric.joint_stiffness"] = [=](Scenario& s, const std::string& v) {
      asym(s).joint_stiffness = vec<4>(v);
    };
    k["coupling.asymmetric.joint_damping"] = [=](Scenario& s, const std::string& v) {
      asym(s).joint_damping = vec<4>(v);
    };
    k["coupling.asymmetric.task_stiffness"] = [=](Scenario& s, const std::string& v) {
      asym(s).task_stiffness = vec<2>(v);
    };
    k["coupling.asymmetric.task_damping"] = [=](Scenario& s, const std::string& v) {
      asym(s).task_damping = vec<2>(v);
    };

    k["limits.tau_max"] = [](Scenario& s, const std::string& v) { s.limits.tau_max = vec<4>(v); };
    k["limits.qdot_max"] = [](Scenario& s, const std::string& v) { s.limits.qdot_max = vec<4>(v); };
    k["limits.p_max"] = [](Scenario& s, const std::string& v) { s.limits.p_max = vec<4>(v); };
    k["limits.lag_tau"] = [](Scenario& s, const std::string& v) { s.limits.lag_tau = scalar(v); };

    add_agent_keys(k, User::a);
    add_agent_keys(k, User::b);
    return k;
  }();
  return keys;
}

}  // namespace

Scenario parse_config(std::istream& in, ConfigReport& report, const std::string& source) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::string base;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) {
      report.violations.push_back(where + "expected 'key = value'");
      continue;
    }
    Entry e{line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (e.key == "base") base = e.value;
    else entries.push_back(std::move(e));
  }

  Scenario s;
  if (!base.empty()) {
    try {
      s = preset(base);
    } catch (const InvalidInput& err) {
      report.violations.push_back(source + ": base: " + err.what());
    }
  }
  for (const Entry& e : entries) {
    const std::string where = source + ":" + std::to_string(e.line) + ": " + e.key;
    const auto it = setters().find(e.key);
    if (it == setters().end()) {
      report.violations.push_back(where + ": unknown key");
      continue;
    }
    try {
      it->second(s, e.value);
    } catch (const InvalidInput& err) {
      report.violations.push_back(where + ": " + err.what());
    }
  }
  return s;
}

Scenario load_config(const std::string& path, ConfigReport& report) {
  std::ifstream in(path);
  if (!in) {
    report.violations.push_back(path + ": cannot open file");
    return {};
  }
  return parse_config(in, report, path);
}

ConfigReport validate(const Scenario& s) {
  ConfigReport r;
  r.violations = check(s, &r.warnings);
  return r;
}

}  // namespace exodyad
