/*
Copyright 2026 The Howl Lab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HOWL_AUDIO_HPP_
#define HOWL_AUDIO_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace howl {

inline constexpr double kDefaultSampleRate = 16000.0;

// Time-domain sample sequence. Nominal full scale is [-1, 1] but nothing
// clamps to it; howling signals are allowed to grow far beyond.
struct AudioBuffer {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, double fs)
      : samples(std::move(s)), sample_rate(fs) {}
  AudioBuffer(std::size_t length, double fs) : samples(length, 0.0), sample_rate(fs) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::span<const double> view() const { return samples; }
  std::span<double> view() { return samples; }

  bool AllFinite() const;
  // Throws kConfig for a non-positive rate and kNumeric for NaN/Inf samples.
  void Validate() const;
};

// Acoustic path h(t) between a source and the microphone.
struct Rir {
  std::vector<double> taps;
  double sample_rate = kDefaultSampleRate;
  std::size_t direct_path_delay = 0;
  // Set when the requested reverberation does not decay to -60 dB within
  // the tap budget.
  bool truncated = false;

  double Energy() const;
  // Index one past the last non-zero tap.
  std::size_t Support() const;
};

double Energy(std::span<const double> x);
double Rms(std::span<const double> x);

}  // namespace howl

#endif  // HOWL_AUDIO_HPP_
