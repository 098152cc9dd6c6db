#include <CLI11.hpp>

#include <iostream>

#include "exodyad/presets.hpp"
#include "exodyad/runner.hpp"

int main(int argc, char** argv) {
  using namespace exodyad;

  CLI::App app{"Dyadic haptic coupling simulator for two exoskeleton + walker agents"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string preset_name, config_path;
  std::vector<std::string> sweeps;
  std::int64_t seed = 0;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a preset or config file and write CSV outputs");
  auto* p = run_cmd->add_option("--preset", preset_name, "Preset condition name");
  auto* c = run_cmd->add_option("--config", config_path, "Scenario file (key = value)");
  p->excludes(c);
  run_cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  auto* dur = run_cmd->add_option("--duration", "Trial duration, s");
  auto* sd = run_cmd->add_option("--seed", seed, "Random seed")->check(CLI::NonNegativeNumber);
  auto* lat = run_cmd->add_option("--latency", "Coupling latency, ticks");
  auto* ks = run_cmd->add_option("--k-scale", "Multiply every coupling stiffness");
  run_cmd->add_option("--sweep", sweeps, "Sweep, e.g. K=0,30,70 (optionally also C=<list>)");
  run_cmd->add_flag("--validate", opt.validate_only, "Check the configuration without running");

  CLI::App* list_cmd = app.add_subcommand("presets", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::usage;
  }

  if (list_cmd->parsed()) {
    for (const auto& n : preset_names()) std::cout << n << "\n";
    return exit_code::ok;
  }

  try {
    if (*p) opt.preset = preset_name;
    if (*c) opt.config = config_path;
    if (*dur) opt.duration = dur->as<double>();
    if (*sd) opt.seed = static_cast<std::uint64_t>(seed);
    if (*lat) opt.latency = lat->as<int>();
    if (*ks) opt.k_scale = ks->as<double>();
    for (const auto& s : sweeps) {
      const auto [name, values] = parse_sweep(s);
      (name == 'K' ? opt.sweep_k : opt.sweep_c) = values;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }
  return run(opt, std::cout, std::cerr);
}
