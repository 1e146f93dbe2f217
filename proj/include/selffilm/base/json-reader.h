// base/json-reader.h

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

#ifndef SELFFILM_BASE_JSON_READER_H_
#define SELFFILM_BASE_JSON_READER_H_

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "selffilm/base/common.h"

namespace selffilm {

/**
   Reads optional fields of one JSON object into typed variables and
   rejects keys nobody asked for:

     JsonReader r(j, "generator");
     r.Get("stride", &c.stride);
     r.Done();  // ConfigError on unknown keys

   Type mismatches are reported as ConfigError naming the dotted path.
 */
class JsonReader {
 public:
  JsonReader(const nlohmann::json &j, std::string where)
      : j_(j), where_(std::move(where)) {
    Require<ConfigError>(j_.is_object(), where_, ": expected an object");
  }

  template <typename T>
  bool Get(const std::string &key, T *out) {
    seen_.insert(key);
    if (!j_.contains(key)) return false;
    try {
      *out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError(StrCat(where_, ".", key, ": ", e.what()));
    }
    return true;
  }

  /// Throws ConfigError for any key that was neither read nor listed.
  void Done(const std::vector<std::string> &also_known = {}) const {
    for (const auto &[key, value] : j_.items()) {
      if (seen_.count(key)) continue;
      bool known = false;
      for (const auto &k : also_known) known = known || k == key;
      Require<ConfigError>(known, where_, ": unknown key '", key, "'");
    }
  }

  const std::string &Where() const { return where_; }

 private:
  const nlohmann::json &j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace selffilm

#endif  // SELFFILM_BASE_JSON_READER_H_
