#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exodyad/analysis.hpp"
#include "exodyad/sim.hpp"

namespace exodyad {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;  // bad flags, unknown preset, invalid scenario
inline constexpr int aborted = 3;
inline constexpr int unwritable = 4;
}  // namespace exit_code

struct RunOptions {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::string out_dir = "out";
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<int> latency;
  std::optional<double> k_scale;      // multiplies every coupling stiffness
  std::vector<double> sweep_k;        // joint stiffness per condition, Nm/rad
  std::vector<double> sweep_c;        // optional matching damping, Nms/rad
  bool validate_only = false;
};

/// Parses "K=0,30,70" or "C=4,10" into (name, values). Throws InvalidInput.
std::pair<char, std::vector<double>> parse_sweep(const std::string& spec);

/// One condition of a run: a label and the scenario to simulate.
struct Condition {
  std::string name;
  Scenario scenario;
};

/// Resolves the options into the conditions to run, applying overrides. Every
/// problem found (unknown preset, bad config, failed validation) is appended
/// to `problems`.
std::vector<Condition> plan_run(const RunOptions& opt, std::vector<std::string>& problems,
                                std::vector<std::string>* warnings = nullptr);

/// Order used for summary rows: numbers inside names compare numerically.
bool natural_less(const std::string& a, const std::string& b);

/// Runs every condition (in parallel when there are several), writes
/// timeseries.csv and cycles.csv per condition and one summary.csv, and returns
/// the process exit status.
int run(const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace exodyad
