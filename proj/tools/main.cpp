#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "resolvlab/scenario.hpp"
#include "resolvlab/sweep.hpp"

using namespace resolvlab;

int main(int argc, char** argv) {
  CLI::App app{"resolvlab: convergence diagnostics for operators on weighted spaces"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = "out";
  int threads = 0;
  long seed_override = -1;
  bool timing = false;
  int member_n = 1;

  CLI::App* run = app.add_subcommand("run", "run a sweep and write CSV / plot data");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker count (0 = hardware)");
  run->add_option("--seed", seed_override, "override the scenario seed");
  run->add_flag("--timing", timing, "record wall-clock runtime_ms (breaks byte reproducibility)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the sweep and check every verdict");
  verify_cmd->add_option("config", config, "scenario file")->required();
  verify_cmd->add_option("--threads", threads, "worker count (0 = hardware)");

  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "print a family member's spectrum");
  spectrum_cmd->add_option("config", config, "scenario file")->required();
  spectrum_cmd->add_option("--n", member_n, "family index n")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    expcli::Scenario scenario = expcli::load_scenario(config);
    if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);

    if (run->parsed()) {
      expcli::SweepResult result = expcli::run_sweep(scenario, {threads, timing});
      expcli::emit(result, out_dir);
      std::cout << "wrote " << out_dir << "/sweep.csv (" << result.rows.size() << " rows)\n";
      return 0;
    }
    if (verify_cmd->parsed()) {
      return expcli::verify(scenario, {threads, false});
    }
    if (spectrum_cmd->parsed()) {
      for (double v : expcli::member_spectrum(scenario, member_n))
        std::printf("%.17g\n", v);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
