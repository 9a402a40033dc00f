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

// Minimal RIFF/WAVE support: reads PCM (8/16/24/32-bit integer or 32-bit
// float) mono or stereo files into 16-bit samples, writes 16-bit PCM.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fasa {

struct AudioBuffer {
  int sample_rate_hz = 16000;
  int channels = 1;
  std::vector<std::int16_t> samples;  // interleaved

  std::int64_t frames() const { return channels > 0 ? static_cast<std::int64_t>(samples.size()) / channels : 0; }
  double duration_s() const { return static_cast<double>(frames()) / sample_rate_hz; }

  // Throws DomainError unless sample_rate_hz > 0, channels in {1, 2} and the
  // sample count divides evenly into frames.
  void Validate() const;

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;
};

AudioBuffer DecodeWav(std::string_view bytes, const std::string& source = "<memory>");
std::string EncodeWav(const AudioBuffer& audio);

AudioBuffer ReadWav(const std::string& path);
void WriteWav(const AudioBuffer& audio, const std::string& path);

// Frame index for a time in seconds: round(t * sample_rate).
std::int64_t FrameAt(const AudioBuffer& audio, double t_s);

// Clip of frames [round(start_s*sr), round(end_s*sr)). Throws DomainError on
// an inverted span, a span outside the audio, or a span that rounds to zero
// frames.
AudioBuffer CutClip(const AudioBuffer& audio, double start_s, double end_s);

}  // namespace fasa
