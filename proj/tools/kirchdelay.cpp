#include <CLI11.hpp>

#include <iostream>

#include "kirchdelay/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Galerkin simulator for a viscoelastic Kirchhoff beam with delayed feedback"};
  app.require_subcommand(1);

  kirchdelay::CliOptions options;
  auto add_common = [&options](CLI::App* cmd) {
    cmd->add_option("--config", options.config, "INI configuration file")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* validate = app.add_subcommand("validate", "check the assumptions and the xi window");
  add_common(validate);

  auto* run = app.add_subcommand("run", "integrate one scenario and write trajectory + summary");
  add_common(run);
  run->add_option("--out", options.out, "output directory (overrides [output] dir)");
  run->add_flag("--force", options.force, "run even when assumptions fail");
  run->add_flag("--seed-free", options.seed_free, "record that no random numbers are drawn");

  auto* sweep = app.add_subcommand("sweep", "run every point of a parameter grid");
  add_common(sweep);
  sweep->add_option("--out", options.out, "output directory (overrides [output] dir)");
  sweep->add_flag("--force", options.force, "also run points whose assumptions fail");
  sweep->add_option("--jobs", options.jobs, "concurrent points")->check(CLI::PositiveNumber);
  sweep->add_flag("--seed-free", options.seed_free, "record that no random numbers are drawn");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return kirchdelay::cmd_validate(options, std::cout, std::cerr);
  if (run->parsed()) return kirchdelay::cmd_run(options, std::cout, std::cerr);
  return kirchdelay::cmd_sweep(options, std::cout, std::cerr);
}
