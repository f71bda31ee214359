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

#ifndef HOWL_SCENE_SCENE_HPP_
#define HOWL_SCENE_SCENE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "howl/audio.hpp"
#include "howl/rir/image_method.hpp"

namespace howl {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  static Range Fixed(double v) { return {v, v}; }
  double Sample(std::mt19937_64& rng) const;
  // Throws kConfig unless finite with lo <= hi.
  void Validate(const std::string& name) const;
};

// Random scene recipe. Every draw comes from a per-scene stream derived from
// the master seed and the scene index, so scene i is the same whatever the
// scene count or evaluation order.
struct SceneSpec {
  Range gain{1.0, 3.0};
  Range delay{0.15, 0.25};  // seconds
  Range rt60{0.0, 0.6};     // seconds
  Range room_side{3.0, 8.0};  // meters, each dimension
  double wall_margin = 0.5;
  double min_source_distance = 0.5;
  double duration = 3.0;  // seconds of target speech
  double sample_rate = kDefaultSampleRate;
  // Near-end target level after the talker's room response.
  double target_rms = 0.05;
  // Scale the loudspeaker path to unit energy so that the loop gain is set
  // by G alone: mean |H(f)|^2 = 1.
  bool normalize_playback = true;
  std::size_t rir_length = 0;  // 0: RoomSpec default
  double rir_highpass_hz = 100.0;
  // Loudspeaker path replaced by all-zero taps (loop broken).
  bool zero_coupling = false;
  // Replaces the generated loudspeaker path when set.
  std::optional<Rir> playback_override;
  // Dry utterances to draw from; empty uses SynthesizeSpeech.
  std::vector<AudioBuffer> speech_pool;

  void Validate() const;
};

struct Scene {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double gain = 0.0;
  double delay_seconds = 0.0;
  double rt60 = 0.0;
  RoomSpec room;  // loudspeaker as source
  Vec3 talker;
  RirPair rirs;
  AudioBuffer dry;
  AudioBuffer target;  // dry speech through the talker path
};

Scene BuildScene(const SceneSpec& spec, std::uint64_t master_seed, std::size_t index);
std::vector<Scene> BuildScenes(const SceneSpec& spec, std::uint64_t master_seed,
                               std::size_t count);

}  // namespace howl

#endif  // HOWL_SCENE_SCENE_HPP_
