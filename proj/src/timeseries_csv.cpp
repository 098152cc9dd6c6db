#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "exodyad/io.hpp"

namespace exodyad {

namespace {

constexpr int kColumns = 1 + 2 * 19 + 4 + 2 + 2 + 2;

void put(std::string& line, double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  line.append(buf, r.ptr);
}

void put_field(std::string& line, double v) {
  line.push_back(',');
  put(line, v);
}

double parse_field(std::string_view f, std::size_t row) {
  double v = 0.0;
  const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
  if (r.ec != std::errc() || r.ptr != f.data() + f.size()) {
    // from_chars does not accept a leading '+' or inf spellings from other tools.
    std::string s(f);
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0')
      throw InvalidInput("timeseries row " + std::to_string(row) + ": bad number '" + s + "'");
  }
  return v;
}

std::string joined(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s.push_back(',');
    s += cols[i];
  }
  return s;
}

}  // namespace

std::vector<std::string> timeseries_header() {
  std::vector<std::string> h{"t"};
  for (const char* u : {"A", "B"}) {
    const std::string p = std::string(u) + ".";
    h.push_back(p + "phi");
    for (int j = 0; j < 4; ++j) h.push_back(p + "q" + std::to_string(j));
    for (int j = 0; j < 4; ++j) h.push_back(p + "qdot" + std::to_string(j));
    for (int j = 0; j < 5; ++j) h.push_back(p + "tau_des" + std::to_string(j));
    for (int j = 0; j < 5; ++j) h.push_back(p + "tau_app" + std::to_string(j));
  }
  for (const char* c : {"rA.x", "rA.y", "rB.x", "rB.y", "phaseA", "phaseB", "stanceA", "stanceB",
                        "supportA", "supportB"})
    h.emplace_back(c);
  return h;
}

void write_timeseries(std::ostream& out, const TrialLog& log) {
  out << joined(timeseries_header()) << '\n';
  std::string line;
  for (const TickRecord& r : log.records) {
    line.clear();
    put(line, r.t);
    for (int u = 0; u < 2; ++u) {
      const AgentState& s = r.state[u];
      put_field(line, s.phi);
      for (int j = 0; j < 4; ++j) put_field(line, s.q[j]);
      for (int j = 0; j < 4; ++j) put_field(line, s.qdot[j]);
      for (int j = 0; j < 5; ++j) put_field(line, r.torque[u].desired[j]);
      for (int j = 0; j < 5; ++j) put_field(line, r.torque[u].applied[j]);
    }
    for (int u = 0; u < 2; ++u) {
      put_field(line, r.ankle[u].x());
      put_field(line, r.ankle[u].y());
    }
    for (int u = 0; u < 2; ++u) put_field(line, r.state[u].phase);
    for (int u = 0; u < 2; ++u) put_field(line, index(r.stance[u]));
    for (int u = 0; u < 2; ++u) put_field(line, static_cast<int>(r.state[u].support));
    line.push_back('\n');
    out << line;
  }
}

TrialLog read_timeseries(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("timeseries: empty input");
  if (line != joined(timeseries_header())) throw InvalidInput("timeseries: unexpected header");

  TrialLog log;
  std::vector<std::string_view> f;
  f.reserve(kColumns);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    f.clear();
    std::string_view rest(line);
    for (;;) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != kColumns)
      throw InvalidInput("timeseries row " + std::to_string(row) + ": expected " +
                         std::to_string(kColumns) + " fields");
    std::size_t i = 0;
    auto next = [&] { return parse_field(f[i++], row); };
    auto next_index = [&](int hi) {
      const double v = next();
      const int k = static_cast<int>(v);
      if (v != k || k < 0 || k > hi)
        throw InvalidInput("timeseries row " + std::to_string(row) + ": bad enum value");
      return k;
    };

    TickRecord r;
    r.t = next();
    for (int u = 0; u < 2; ++u) {
      AgentState& s = r.state[u];
      s.phi = next();
      for (int j = 0; j < 4; ++j) s.q[j] = next();
      for (int j = 0; j < 4; ++j) s.qdot[j] = next();
      for (int j = 0; j < 5; ++j) r.torque[u].desired[j] = next();
      for (int j = 0; j < 5; ++j) r.torque[u].applied[j] = next();
    }
    for (int u = 0; u < 2; ++u) {
      r.ankle[u].x() = next();
      r.ankle[u].y() = next();
    }
    for (int u = 0; u < 2; ++u) r.state[u].phase = next();
    for (int u = 0; u < 2; ++u) r.stance[u] = static_cast<Side>(next_index(1));
    for (int u = 0; u < 2; ++u) r.state[u].support = static_cast<Support>(next_index(2));
    log.records.push_back(r);
  }
  if (log.records.size() >= 2) log.dt = log.records[1].t - log.records[0].t;
  return log;
}

std::vector<std::string> summary_header() {
  std::vector<std::string> h{"condition", "hip_diff_deg", "knee_diff_deg"};
  const char* joints[] = {"hipL", "kneeL", "hipR", "kneeR"};
  for (const char* u : {"A", "B"})
    for (const char* j : joints) h.push_back(std::string("tau_rms_") + u + "_" + j + "_Nm");
  for (const char* c : {"sync_bounded", "max_drift_cycles", "asym_A_hip_deg", "asym_A_knee_deg",
                        "asym_B_hip_deg", "asym_B_knee_deg", "ankle_rise_A_m", "ankle_rise_B_m",
                        "note"})
    h.emplace_back(c);
  return h;
}

void write_summary(std::ostream& out, const std::vector<TrialSummary>& rows) {
  out << joined(summary_header()) << '\n';
  for (const TrialSummary& s : rows) {
    std::string line = s.condition;
    auto opt = [&](bool has, double v) {
      line.push_back(',');
      if (has) put(line, v);
    };
    opt(s.diff.has_value(), s.diff ? s.diff->hip : 0.0);
    opt(s.diff.has_value(), s.diff ? s.diff->knee : 0.0);
    for (int u = 0; u < 2; ++u)
      for (int j = 0; j < 4; ++j) put_field(line, s.torque_rms[u][j]);
    line.push_back(',');
    if (s.sync) line += s.sync->bounded ? "true" : "false";
    opt(s.sync.has_value(), s.sync ? s.sync->max_abs_drift : 0.0);
    for (int u = 0; u < 2; ++u) {
      opt(s.asymmetry.has_value(), s.asymmetry ? (*s.asymmetry)[u].hip : 0.0);
      opt(s.asymmetry.has_value(), s.asymmetry ? (*s.asymmetry)[u].knee : 0.0);
    }
    for (int u = 0; u < 2; ++u) put_field(line, s.ankle_rise[u]);
    line.push_back(',');
    std::string note;
    for (std::size_t i = 0; i < s.notes.size(); ++i) note += (i ? " | " : "") + s.notes[i];
    for (char& c : note)
      if (c == ',' || c == '\n') c = ';';
    line += note;
    out << line << '\n';
  }
}

void write_cycles(std::ostream& out, const TrialSummary& summary) {
  out << "user,leg,joint,gait_pct,mean_deg,std_deg,cycles\n";
  std::string line;
  for (int u = 0; u < 2; ++u)
    for (Side side : {Side::left, Side::right}) {
      const auto& b = summary.bands[u][index(side)];
      if (!b) continue;
      for (const auto& [name, band] : {std::pair{"hip", &b->hip}, std::pair{"knee", &b->knee}})
        for (int k = 0; k < kGaitPoints; ++k) {
          line = u == 0 ? "A," : "B,";
          line += side == Side::left ? "left," : "right,";
          line += name;
          put_field(line, k);
          put_field(line, band->mean[k]);
          put_field(line, band->std[k]);
          line += "," + std::to_string(b->count) + "\n";
          out << line;
        }
    }
}

}  // namespace exodyad
