// networks/checkpoint.cc

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

#include "selffilm/networks/checkpoint.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {

constexpr char kMagic[] = "SELFFILM-CKPT\n";
constexpr size_t kMagicSize = sizeof(kMagic) - 1;

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  nlohmann::json header{{"version", Checkpoint::kVersion},
                        {"kind", ckpt.kind},
                        {"config", ckpt.config},
                        {"metadata", ckpt.metadata},
                        {"tensors", nlohmann::json::array()}};
  for (const auto &[name, t] : ckpt.tensors)
    header["tensors"].push_back({{"name", name}, {"shape", t.Dims()}});
  const std::string text = header.dump();
  const uint64_t size = text.size();

  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require<Error>(out.good(), "cannot write checkpoint ", tmp);
    out.write(kMagic, kMagicSize);
    out.write(reinterpret_cast<const char *>(&size), sizeof(size));
    out.write(text.data(), static_cast<std::streamsize>(size));
    for (const auto &[name, t] : ckpt.tensors)
      out.write(reinterpret_cast<const char *>(t.Data()),
                static_cast<std::streamsize>(t.Size() * sizeof(double)));
    Require<Error>(out.good(), "write to ", tmp, " failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  Require<MissingArtifact>(std::filesystem::exists(path), "missing checkpoint ", path);
  std::ifstream in(path, std::ios::binary);
  char magic[kMagicSize];
  in.read(magic, kMagicSize);
  Require(in.good() && std::memcmp(magic, kMagic, kMagicSize) == 0, path,
          ": not a selffilm checkpoint");
  uint64_t size = 0;
  in.read(reinterpret_cast<char *>(&size), sizeof(size));
  Require(in.good() && size < (uint64_t{1} << 32), path, ": corrupt header");
  std::string text(size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(size));
  Require(in.good(), path, ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw InvalidArgument(StrCat(path, ": unreadable header: ", e.what()));
  }
  Require(header.value("version", -1) == Checkpoint::kVersion, path,
          ": unsupported checkpoint version");
  Checkpoint ckpt;
  ckpt.kind = header.at("kind").get<std::string>();
  ckpt.config = header.at("config");
  ckpt.metadata = header.at("metadata");
  for (const auto &entry : header.at("tensors")) {
    Tensor t(entry.at("shape").get<Shape>());
    in.read(reinterpret_cast<char *>(t.Data()),
            static_cast<std::streamsize>(t.Size() * sizeof(double)));
    Require(in.good() || t.Size() == 0, path, ": truncated tensor data");
    ckpt.tensors.emplace(entry.at("name").get<std::string>(), std::move(t));
  }
  return ckpt;
}

void AddParameters(Checkpoint *ckpt, const std::string &prefix, const ParameterList &params) {
  for (const auto &p : params) {
    const std::string name = prefix + "." + p.name;
    Require(!ckpt->tensors.count(name), "duplicate checkpoint tensor ", name);
    ckpt->tensors.emplace(name, p.var.Value());
  }
}

void RestoreParameters(const Checkpoint &ckpt, const std::string &prefix,
                       const ParameterList &params) {
  for (const auto &p : params) {
    const std::string name = prefix + "." + p.name;
    auto it = ckpt.tensors.find(name);
    Require<ConfigError>(it != ckpt.tensors.end(), "checkpoint lacks tensor ", name);
    Variable v = p.var;
    Require<ConfigError>(it->second.Dims() == v.Dims(), "checkpoint tensor ", name, " has shape ",
                         ShapeString(it->second.Dims()), ", model expects ",
                         ShapeString(v.Dims()));
    v.MutableValue() = it->second;
  }
}

void RequireMatchingConfig(const Checkpoint &ckpt, const std::string &kind,
                           const nlohmann::json &expected) {
  Require<ConfigError>(ckpt.kind == kind, "checkpoint holds a '", ckpt.kind, "' model, expected '",
                       kind, "'");
  Require<ConfigError>(ckpt.config == expected,
                       "checkpoint config does not match the requested model config:\n  stored:   ",
                       ckpt.config.dump(), "\n  expected: ", expected.dump());
}

}  // namespace selffilm
