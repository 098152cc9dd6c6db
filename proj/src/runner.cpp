#include "exodyad/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <variant>

#include "exodyad/config.hpp"
#include "exodyad/io.hpp"
#include "exodyad/presets.hpp"

namespace exodyad {

namespace fs = std::filesystem;

std::pair<char, std::vector<double>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq != 1 || (spec[0] != 'K' && spec[0] != 'C'))
    throw InvalidInput("sweep must look like K=<list> or C=<list>, got '" + spec + "'");
  std::vector<double> values;
  std::stringstream ss(spec.substr(2));
  for (std::string item; std::getline(ss, item, ',');) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v))
      throw InvalidInput("sweep value '" + item + "' is not a finite number");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidInput("sweep list is empty");
  return {spec[0], values};
}

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && (std::isdigit(static_cast<unsigned char>(a[ie])) || a[ie] == '.')) ++ie;
      while (je < b.size() && (std::isdigit(static_cast<unsigned char>(b[je])) || b[je] == '.')) ++je;
      const double x = std::strtod(a.substr(i, ie - i).c_str(), nullptr);
      const double y = std::strtod(b.substr(j, je - j).c_str(), nullptr);
      if (x != y) return x < y;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

namespace {

std::string number_label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::vector<Condition> plan_run(const RunOptions& opt, std::vector<std::string>& problems,
                                std::vector<std::string>* warnings) {
  if (opt.preset.has_value() == opt.config.has_value()) {
    problems.push_back("exactly one of --preset or --config is required");
    return {};
  }
  Scenario base;
  if (opt.preset) {
    try {
      base = preset(*opt.preset);
    } catch (const UnknownPreset& e) {
      problems.push_back(e.what());
      return {};
    }
  } else {
    ConfigReport report;
    base = load_config(*opt.config, report);
    for (auto& v : report.violations) problems.push_back(std::move(v));
    if (!problems.empty()) return {};
  }

  if (opt.duration) base.duration = *opt.duration;
  if (opt.seed) base.seed = *opt.seed;
  if (opt.latency) base.latency_ticks = *opt.latency;
  if (opt.k_scale) {
    if (!std::isfinite(*opt.k_scale) || *opt.k_scale < 0.0)
      problems.push_back("--k-scale must be a finite number >= 0");
    base.coupling.joint.stiffness *= *opt.k_scale;
    base.coupling.task.stiffness *= *opt.k_scale;
    if (base.coupling.asymmetric) {
      base.coupling.asymmetric->joint_stiffness *= *opt.k_scale;
      base.coupling.asymmetric->task_stiffness *= *opt.k_scale;
    }
  }

  std::vector<Condition> plan;
  if (opt.sweep_k.empty()) {
    if (!opt.sweep_c.empty()) problems.push_back("a C sweep needs a matching K sweep");
    plan.push_back({base.label, base});
  } else {
    if (base.coupling.space != CouplingSpace::joint)
      problems.push_back("stiffness sweeps apply to joint-space coupling only");
    if (!opt.sweep_c.empty() && opt.sweep_c.size() != 1 && opt.sweep_c.size() != opt.sweep_k.size())
      problems.push_back("the C sweep must have one value or as many values as the K sweep");
    for (std::size_t i = 0; i < opt.sweep_k.size(); ++i) {
      Scenario s = base;
      const double k = opt.sweep_k[i];
      std::string name = "K=" + number_label(k);
      s.coupling.joint.stiffness = Vec4::Constant(k);
      if (!opt.sweep_c.empty()) {
        const double c = opt.sweep_c[opt.sweep_c.size() == 1 ? 0 : std::min(i, opt.sweep_c.size() - 1)];
        s.coupling.joint.damping = Vec4::Constant(c);
        name += "_C=" + number_label(c);
      }
      if (k == 0.0 && s.coupling.joint.damping.isZero()) s.coupling.mode = CouplingMode::none;
      else if (s.coupling.mode == CouplingMode::none) s.coupling.mode = CouplingMode::bidirectional;
      s.label = name;
      plan.push_back({name, s});
    }
  }

  for (const Condition& c : plan) {
    std::vector<std::string> w;
    for (auto& v : check(c.scenario, &w))
      problems.push_back(plan.size() > 1 ? c.name + ": " + v : v);
    if (warnings)
      for (auto& v : w) warnings->push_back(plan.size() > 1 ? c.name + ": " + v : v);
  }
  return plan;
}

namespace {

struct Outcome {
  TrialLog log;
  TrialSummary summary;
};

struct Failure {
  std::size_t tick;
  std::string message;
};

std::variant<Outcome, Failure> simulate(const Condition& c) {
  try {
    TrialLog log = run_trial(c.scenario);
    TrialSummary summary = summarize(log, c.scenario.coupling.mode);
    summary.condition = c.name;
    return Outcome{std::move(log), std::move(summary)};
  } catch (const SimulationAborted& e) {
    return Failure{e.tick(), e.what()};
  }
}

template <typename Write>
bool write_file(const fs::path& path, Write&& body, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  body(f);
  f.flush();
  if (!f) {
    err << "error: failed while writing " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

int run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::string> problems, warnings;
  const std::vector<Condition> plan = plan_run(opt, problems, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  if (opt.validate_only) {
    if (problems.empty()) {
      out << "valid: " << plan.size() << " condition(s), no violations\n";
      return exit_code::ok;
    }
    out << problems.size() << " violation(s):\n";
    for (const auto& p : problems) out << "  " << p << "\n";
    return exit_code::usage;
  }
  if (!problems.empty()) {
    for (const auto& p : problems) err << "error: " << p << "\n";
    return exit_code::usage;
  }

  const fs::path root(opt.out_dir);
  const bool sweep = plan.size() > 1;
  {
    std::error_code ec;
    fs::create_directories(root, ec);
    for (const Condition& c : plan)
      if (!ec && sweep) fs::create_directories(root / c.name, ec);
    if (ec) {
      err << "error: cannot create output directory " << root.string() << ": " << ec.message() << "\n";
      return exit_code::unwritable;
    }
  }

  // Trials are independent; each owns its world and log.
  std::vector<std::future<std::variant<Outcome, Failure>>> jobs;
  for (const Condition& c : plan)
    jobs.push_back(std::async(sweep ? std::launch::async : std::launch::deferred, simulate, std::cref(c)));

  std::vector<TrialSummary> rows;
  int status = exit_code::ok;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    auto result = jobs[i].get();
    if (auto* f = std::get_if<Failure>(&result)) {
      err << "error: " << plan[i].name << ": simulation aborted at tick " << f->tick << ": "
          << f->message << "\n";
      status = exit_code::aborted;
      continue;
    }
    auto& o = std::get<Outcome>(result);
    const fs::path dir = sweep ? root / plan[i].name : root;
    if (!write_file(dir / "timeseries.csv", [&](std::ostream& f) { write_timeseries(f, o.log); }, err) ||
        !write_file(dir / "cycles.csv", [&](std::ostream& f) { write_cycles(f, o.summary); }, err))
      return exit_code::unwritable;
    rows.push_back(std::move(o.summary));
  }
  if (status != exit_code::ok) return status;

  std::sort(rows.begin(), rows.end(),
            [](const TrialSummary& a, const TrialSummary& b) { return natural_less(a.condition, b.condition); });
  if (!write_file(root / "summary.csv", [&](std::ostream& f) { write_summary(f, rows); }, err))
    return exit_code::unwritable;

  for (const TrialSummary& s : rows) {
    out << s.condition;
    if (s.diff) out << ": hip diff " << s.diff->hip << " deg, knee diff " << s.diff->knee << " deg";
    if (s.sync) out << ", sync " << (s.sync->bounded ? "bounded" : "unbounded");
    for (const auto& n : s.notes) out << " (" << n << ")";
    out << "\n";
  }
  out << "wrote " << (root / "summary.csv").string() << "\n";
  return exit_code::ok;
}

}  // namespace exodyad
