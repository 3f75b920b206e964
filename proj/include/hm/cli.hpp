#pragma once

// Command-line front end for hmsim. Options may also come from a key=value
// config file (--config) whose keys are the long option names; flags given
// on the command line take precedence.

#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hm/experiment.hpp"

namespace hm {

inline void add_experiment_options(CLI::App& app, ExperimentSpec& spec) {
  app.add_option("command", spec.command, "analytic | simulate | sweep | framecheck")
      ->required()
      ->check(CLI::IsMember({"analytic", "simulate", "sweep", "framecheck"}));
  app.add_option("--model", spec.model, "sphere2d | ks | rod")->check(CLI::IsMember({"sphere2d", "ks", "rod"}));
  app.add_option("--weight", spec.weight, "rod breaking weight: quantum | uniform-variant")
      ->check(CLI::IsMember({"quantum", "uniform-variant"}));
  app.add_option("--variant-stages", spec.variant_stages, "stages using the uniform-variant weight: both | first")
      ->check(CLI::IsMember({"both", "first"}));
  app.add_option("--state", spec.state, "state vector x,y,z (normalized on input)");
  app.add_option("--frame", spec.frame, "identity | random:<seed> | 9 comma-separated reals (rows)");
  app.add_option("--direction", spec.direction, "measurement direction x,y,z for sphere2d/ks (default: first frame axis)");
  app.add_option("--trials", spec.trials, "trials (per sweep point for sweep)");
  app.add_option("--seed", spec.seed, "master seed")->envname("HMSIM_SEED");
  app.add_option("--alpha", spec.alpha, "significance level: 0.05 | 0.01 | 0.001");
  app.add_option("--expect", spec.expect, "reference distribution: self | born")
      ->check(CLI::IsMember({"self", "born"}));
  app.add_option("--out", spec.out, "CSV output path (default: stdout)");
  app.add_option("--workers", spec.workers, "worker threads");
  app.add_option("--steps", spec.steps, "sweep points over [0, pi/2]");
  app.add_option("--measure", spec.measure, "framecheck measure: gleason | rod")
      ->check(CLI::IsMember({"gleason", "rod"}));
  app.add_option("--frames", spec.frames, "framecheck random frame count");
  app.set_config("--config", "", "key=value config file");
}

// Parses `args` (without the program name) and runs the command.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hidden-measurement model simulator", "hmsim"};
  ExperimentSpec spec;
  add_experiment_options(app, spec);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return run_command(spec, out, err);
}

}  // namespace hm
