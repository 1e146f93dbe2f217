// base/common.h

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

#ifndef SELFFILM_BASE_COMMON_H_
#define SELFFILM_BASE_COMMON_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace selffilm {

/// Base class of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument, shape or dimension handed to an operation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or unknown configuration; the CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A required artifact (corpus, checkpoint, manifest) does not exist.
class MissingArtifact : public Error {
 public:
  using Error::Error;
};

/// A model was used before it was trained.
class UntrainedModel : public Error {
 public:
  using Error::Error;
};

/// Training produced non-finite values.
class Divergence : public Error {
 public:
  using Error::Error;
};

template <typename... Args>
std::string StrCat(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

/// Throws E with the concatenated message when `cond` is false.
template <typename E = InvalidArgument, typename... Args>
inline void Require(bool cond, const Args &...args) {
  if (!cond) throw E(StrCat(args...));
}

enum class LogLevel { kInfo, kWarning };

void SetLogVerbose(bool verbose);
bool LogVerbose();
void LogMessage(LogLevel level, const std::string &msg);

template <typename... Args>
void LogInfo(const Args &...args) {
  if (LogVerbose()) LogMessage(LogLevel::kInfo, StrCat(args...));
}

template <typename... Args>
void LogWarning(const Args &...args) {
  LogMessage(LogLevel::kWarning, StrCat(args...));
}

/// 64-bit mix used to derive independent seeds from (seed, stream id) pairs.
uint64_t MixSeed(uint64_t seed, uint64_t stream);
uint64_t HashString(const std::string &s);

}  // namespace selffilm

#endif  // SELFFILM_BASE_COMMON_H_
