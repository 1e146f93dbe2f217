// dsp/wave.cc

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

#include "selffilm/dsp/wave.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "selffilm/base/common.h"

namespace selffilm {

namespace {

int16_t ToPcm(double v) {
  v = std::clamp(v, -1.0, 1.0);
  return static_cast<int16_t>(std::lrint(std::clamp(v * 32768.0, -32768.0, 32767.0)));
}

void PutLe(std::string *out, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetLe(const std::string &in, size_t pos, int bytes) {
  uint32_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

void ValidateWaveform(const Waveform &w, const std::string &what) {
  Require(w.sample_rate > 0, what, ": sample rate must be positive");
  Require(!w.samples.empty(), what, ": empty waveform");
  for (double v : w.samples)
    Require(std::isfinite(v), what, ": non-finite sample");
}

Waveform QuantizePcm16(const Waveform &w) {
  Waveform q{std::vector<double>(w.samples.size()), w.sample_rate};
  for (size_t i = 0; i < w.samples.size(); ++i)
    q.samples[i] = ToPcm(w.samples[i]) / 32768.0;
  return q;
}

void WriteWav(const std::string &path, const Waveform &w) {
  ValidateWaveform(w, path);
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF";
  PutLe(&buf, 36 + data_bytes, 4);
  buf += "WAVEfmt ";
  PutLe(&buf, 16, 4);
  PutLe(&buf, 1, 2);  // PCM
  PutLe(&buf, 1, 2);  // mono
  PutLe(&buf, w.sample_rate, 4);
  PutLe(&buf, w.sample_rate * 2, 4);
  PutLe(&buf, 2, 2);
  PutLe(&buf, 16, 2);
  buf += "data";
  PutLe(&buf, data_bytes, 4);
  for (double v : w.samples) PutLe(&buf, static_cast<uint16_t>(ToPcm(v)), 2);
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require<Error>(out.good(), "cannot open ", path, " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  Require<Error>(out.good(), "write to ", path, " failed");
}

Waveform ReadWav(const std::string &path) {
  Require<MissingArtifact>(std::filesystem::exists(path), "missing audio file ", path);
  std::ifstream in(path, std::ios::binary);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Require(buf.size() >= 12 && buf.compare(0, 4, "RIFF") == 0 &&
              buf.compare(8, 4, "WAVE") == 0,
          path, ": not a RIFF/WAVE file");
  size_t pos = 12;
  int channels = 0, bits = 0, format = 0;
  uint32_t rate = 0;
  while (pos + 8 <= buf.size()) {
    const std::string id = buf.substr(pos, 4);
    const uint32_t size = GetLe(buf, pos + 4, 4);
    const size_t body = pos + 8;
    Require(body + size <= buf.size(), path, ": truncated chunk ", id);
    if (id == "fmt ") {
      Require(size >= 16, path, ": short fmt chunk");
      format = GetLe(buf, body, 2);
      channels = GetLe(buf, body + 2, 2);
      rate = GetLe(buf, body + 4, 4);
      bits = GetLe(buf, body + 14, 2);
    } else if (id == "data") {
      Require(format == 1 && channels == 1 && bits == 16, path,
              ": only 16-bit PCM mono is supported");
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      w.samples.resize(size / 2);
      for (size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] = static_cast<int16_t>(GetLe(buf, body + 2 * i, 2)) / 32768.0;
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw InvalidArgument(StrCat(path, ": no data chunk"));
}

}  // namespace selffilm
