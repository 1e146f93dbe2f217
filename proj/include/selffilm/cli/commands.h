// include/selffilm/cli/commands.h

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

#ifndef SELFFILM_CLI_COMMANDS_H_
#define SELFFILM_CLI_COMMANDS_H_

#include <exception>
#include <string>

#include "json.hpp"
#include "selffilm/cli/run-config.h"

namespace selffilm {

struct CommandOptions {
  bool force = false;      // overwrite existing outputs
  bool plot = false;       // also write SVG plots
  std::string checkpoint;  // overrides eval/visualize.checkpoint when set
};

/// Output locations, all derived from the config.
std::string CheckpointPath(const RunConfig &c, const std::string &name_or_path);
std::string SpeakerCheckpointPath(const RunConfig &c, EmbedderVariant variant);

void CmdGenData(const RunConfig &c, const CommandOptions &opts);
void CmdTrainSpeaker(const RunConfig &c, const CommandOptions &opts);
void CmdTrainCgan(const RunConfig &c, const CommandOptions &opts);
void CmdTrainCyclegan(const RunConfig &c, const CommandOptions &opts);
/// Returns the metrics record that is also written to <run>.eval.json.
nlohmann::json CmdEval(const RunConfig &c, const CommandOptions &opts);
/// Returns the silhouette report that is also written to <run>.film.json.
nlohmann::json CmdVisualizeFilm(const RunConfig &c, const CommandOptions &opts);

/// 1 for usage and configuration problems, 2 for runtime failures.
int ExitCodeFor(const std::exception &e);

}  // namespace selffilm

#endif  // SELFFILM_CLI_COMMANDS_H_
