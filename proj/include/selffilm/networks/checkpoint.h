// networks/checkpoint.h

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

#ifndef SELFFILM_NETWORKS_CHECKPOINT_H_
#define SELFFILM_NETWORKS_CHECKPOINT_H_

#include <map>
#include <string>

#include "json.hpp"
#include "selffilm/autograd/parameters.h"

namespace selffilm {

/**
   Single-file model archive:

     "SELFFILM-CKPT\n"  uint64 header size  JSON header  tensor data

   The header holds {version, kind, config, metadata, tensors: [{name,
   shape}]}; tensor data follows as raw little-endian doubles in header
   order.
 */
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string kind;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, Tensor> tensors;
};

/// Writes through a temporary file and renames it into place.
void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
/// Throws MissingArtifact if absent and InvalidArgument if corrupt.
Checkpoint LoadCheckpoint(const std::string &path);

/// Stores parameter values under `prefix.name`.
void AddParameters(Checkpoint *ckpt, const std::string &prefix, const ParameterList &params);
/// Copies `prefix.name` tensors into the parameters (all must be present).
void RestoreParameters(const Checkpoint &ckpt, const std::string &prefix,
                       const ParameterList &params);

/// Throws ConfigError unless the checkpoint is of `kind` and its config
/// equals `expected`.
void RequireMatchingConfig(const Checkpoint &ckpt, const std::string &kind,
                           const nlohmann::json &expected);

}  // namespace selffilm

#endif  // SELFFILM_NETWORKS_CHECKPOINT_H_
