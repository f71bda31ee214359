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

#ifndef HOWL_RIR_IMAGE_METHOD_HPP_
#define HOWL_RIR_IMAGE_METHOD_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "howl/audio.hpp"

namespace howl {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double Distance(const Vec3& a, const Vec3& b);

inline constexpr double kSoundSpeed = 340.0;
inline constexpr double kMaxSceneRt60 = 0.6;

// Shoebox room with one source and one microphone.
struct RoomSpec {
  Vec3 dimensions{6.0, 5.0, 3.0};
  double rt60 = 0.3;
  Vec3 source{1.0, 1.0, 1.5};
  Vec3 mic{2.0, 2.0, 1.5};
  double sample_rate = kDefaultSampleRate;
  // 0 selects 0.5 s worth of taps.
  std::size_t rir_length = 0;
  double sound_speed = kSoundSpeed;
  // Randomized image method: each reflected image is displaced uniformly by
  // up to this many meters per axis, driven by the seed. 0 gives the classic
  // deterministic lattice.
  double image_jitter = 0.0;
  // Corner of a second-order Butterworth high-pass run over the taps; 0
  // keeps the raw image sum. Raw image sums carry a large DC gain that no
  // real transducer chain passes.
  double highpass_hz = 0.0;
  // Shoebox image sums decay slower than Eyring predicts (near-axial paths
  // meet few walls), by about 40% in typical rooms. When set, the absorption
  // is refit until the Schroeder estimate of the raw taps lands on |rt60|.
  bool calibrate_rt60 = true;

  std::size_t TapCount() const;
  // Throws kConfig for invalid geometry or rates.
  void Validate() const;
  // rt60 above the range used by the reference scenes; allowed, but callers
  // may want to flag it.
  bool OutsideSceneRange() const { return rt60 > kMaxSceneRt60; }
};

// Frequency-independent pressure reflection coefficient matching |rt60| via
// Eyring's formula; 0 for an anechoic room.
double EyringReflection(const RoomSpec& spec);

// Allen-Berkeley image summation. Deterministic for a fixed (spec, seed).
// Sub-sample delays are rounded to the nearest tap. |truncated| is set when
// the nominal -60 dB point lies past the last tap.
Rir GenerateRir(const RoomSpec& spec, std::uint64_t seed);

struct RirPair {
  Rir near_end;
  Rir loudspeaker;
};

// Both RIRs share room, absorption and microphone; |spec.source| is the
// loudspeaker and |near_end_pos| the talker.
RirPair GenerateRirPair(const RoomSpec& spec, const Vec3& near_end_pos, std::uint64_t seed);

struct DecayAnalysis {
  std::vector<double> decay_db;  // backward-integrated energy, 0 dB at t=0
  double rt60 = 0.0;             // seconds
};

// Schroeder backward integration; RT60 from a linear fit of the -5..-25 dB
// range extrapolated to -60 dB. Single-tap or too-short decays give 0.
// Throws kUndefined for a zero-energy rir.
DecayAnalysis SchroederDecay(const Rir& rir);

}  // namespace howl

#endif  // HOWL_RIR_IMAGE_METHOD_HPP_
