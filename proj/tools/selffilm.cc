// tools/selffilm.cc

// Copyright 2026  The selffilm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: selffilm <command> [--config FILE] [--set k=v]...

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selffilm/base/common.h"
#include "selffilm/cli/commands.h"

int main(int argc, char **argv) {
  using namespace selffilm;
  CLI::App app{"Self-conditioned FiLM bandwidth extension toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  CommandOptions opts;
  bool print_config = false;
  struct Command {
    const char *name, *help;
    void (*run)(const RunConfig &, const CommandOptions &);
  };
  const std::vector<Command> commands = {
      {"gen-data", "Write the synthetic corpus and manifests", CmdGenData},
      {"train-speaker", "Train the speaker embedder(s)", CmdTrainSpeaker},
      {"train-cgan", "Train a paired CGAN", CmdTrainCgan},
      {"train-cyclegan", "Train an unpaired CycleGAN", CmdTrainCyclegan},
      {"eval", "LSD / EER / minDCF report",
       [](const RunConfig &c, const CommandOptions &o) { CmdEval(c, o); }},
      {"visualize-film", "FiLM activation clustering report and projection",
       [](const RunConfig &c, const CommandOptions &o) { CmdVisualizeFilm(c, o); }},
  };
  for (const auto &cmd : commands) {
    CLI::App *sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config", config_path, "JSON run config (defaults apply when omitted)");
    sub->add_option("--set", overrides, "Override a config value, e.g. --set cgan.epochs=5")
        ->allow_extra_args(false);
    sub->add_flag("--force", opts.force, "Overwrite existing outputs");
    sub->add_flag("--print-config", print_config, "Print the resolved config before running");
    if (std::string(cmd.name) == "eval" || std::string(cmd.name) == "visualize-film")
      sub->add_option("--checkpoint", opts.checkpoint, "Run name in run_dir or checkpoint path");
    if (std::string(cmd.name) == "visualize-film")
      sub->add_flag("--plot", opts.plot, "Also write an SVG scatter plot");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    const RunConfig config = LoadRunConfig(config_path, overrides);
    if (print_config) std::cout << ToJson(config).dump(2) << "\n";
    for (const auto &cmd : commands)
      if (app.got_subcommand(cmd.name)) cmd.run(config, opts);
    return 0;
  } catch (const std::exception &e) {
    std::cerr << "selffilm: error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
}
