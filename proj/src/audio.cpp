// Copyright 2026 The fasa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fasa/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fasa/core.hpp"

namespace fasa {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t ReadU16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void PutU16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
}

std::int16_t ClampToI16(double v) {
  v = std::round(v * 32767.0);
  return static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
}

}  // namespace

void AudioBuffer::Validate() const {
  if (sample_rate_hz <= 0) throw DomainError("sample rate must be positive");
  if (channels != 1 && channels != 2) throw DomainError("only mono or stereo audio is supported");
  if (samples.size() % static_cast<std::size_t>(channels) != 0) {
    throw DomainError("sample count is not a multiple of the channel count");
  }
}

AudioBuffer DecodeWav(std::string_view b, const std::string& source) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw ParseError(source + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::string_view data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    std::string_view id = b.substr(pos, 4);
    std::uint32_t size = ReadU32(b, pos + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min<std::size_t>(size, b.size() - body);
    if (id == "fmt ") {
      if (avail < 16) throw ParseError(source + ": truncated fmt chunk");
      format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = ReadU32(b, body + 4);
      bits = ReadU16(b, body + 14);
      if (format == kFormatExtensible && avail >= 26) format = ReadU16(b, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data = b.substr(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw ParseError(source + ": missing fmt chunk");
  if (!have_data) throw ParseError(source + ": missing data chunk");
  if (format != kFormatPcm && format != kFormatFloat) {
    throw ParseError(source + ": compressed WAV formats are not supported (convert to PCM first)");
  }
  if (format == kFormatFloat && bits != 32) throw ParseError(source + ": unsupported float width");
  if (format == kFormatPcm && bits != 8 && bits != 16 && bits != 24 && bits != 32) {
    throw ParseError(source + ": unsupported PCM bit depth " + std::to_string(bits));
  }

  AudioBuffer audio;
  audio.sample_rate_hz = static_cast<int>(rate);
  audio.channels = channels;
  const std::size_t width = bits / 8;
  const std::size_t count = data.size() / width;
  audio.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t at = i * width;
    std::int16_t s = 0;
    if (format == kFormatFloat) {
      std::uint32_t raw = ReadU32(data, at);
      float f;
      std::memcpy(&f, &raw, sizeof f);
      s = ClampToI16(f);
    } else if (bits == 8) {
      s = static_cast<std::int16_t>((static_cast<int>(static_cast<unsigned char>(data[at])) - 128) << 8);
    } else if (bits == 16) {
      s = static_cast<std::int16_t>(ReadU16(data, at));
    } else if (bits == 24) {
      s = static_cast<std::int16_t>(ReadU16(data, at + 1));
    } else {
      s = static_cast<std::int16_t>(ReadU16(data, at + 2));
    }
    audio.samples.push_back(s);
  }
  try {
    audio.Validate();
  } catch (const DomainError& e) {
    throw ParseError(source + ": " + e.what());
  }
  return audio;
}

std::string EncodeWav(const AudioBuffer& audio) {
  audio.Validate();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, static_cast<std::uint16_t>(audio.channels));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate_hz));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate_hz * audio.channels * 2));
  PutU16(out, static_cast<std::uint16_t>(audio.channels * 2));
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (std::int16_t s : audio.samples) PutU16(out, static_cast<std::uint16_t>(s));
  return out;
}

AudioBuffer ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read audio '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodeWav(buf.str(), path);
}

void WriteWav(const AudioBuffer& audio, const std::string& path) {
  std::string bytes = EncodeWav(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write audio '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::int64_t FrameAt(const AudioBuffer& audio, double t_s) {
  return static_cast<std::int64_t>(std::llround(t_s * audio.sample_rate_hz));
}

AudioBuffer CutClip(const AudioBuffer& audio, double start_s, double end_s) {
  audio.Validate();
  if (!(start_s < end_s)) throw DomainError("inverted span");
  if (start_s < 0.0) throw DomainError("span starts before the audio");
  const std::int64_t begin = FrameAt(audio, start_s);
  const std::int64_t end = FrameAt(audio, end_s);
  if (end > audio.frames()) throw DomainError("span extends past the end of the audio");
  if (end <= begin) throw DomainError("span rounds to an empty clip");
  AudioBuffer clip;
  clip.sample_rate_hz = audio.sample_rate_hz;
  clip.channels = audio.channels;
  clip.samples.assign(audio.samples.begin() + begin * audio.channels, audio.samples.begin() + end * audio.channels);
  return clip;
}

}  // namespace fasa
