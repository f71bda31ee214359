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

#include "howl/scene/scene.hpp"

#include <algorithm>
#include <cmath>

#include "howl/common.hpp"
#include "howl/dsp/convolution.hpp"
#include "howl/random.hpp"
#include "howl/scene/speech.hpp"

namespace howl {

double Range::Sample(std::mt19937_64& rng) const { return UniformIn(rng, lo, hi); }

void Range::Validate(const std::string& name) const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw Error(ErrorKind::kConfig, name + " range must be finite with lo <= hi");
  }
}

void SceneSpec::Validate() const {
  gain.Validate("gain");
  delay.Validate("delay");
  rt60.Validate("rt60");
  room_side.Validate("room side");
  if (gain.lo < 0.0 || gain.hi > 10.0) throw Error(ErrorKind::kConfig, "gain must lie in [0, 10]");
  if (delay.lo < 0.0) throw Error(ErrorKind::kConfig, "delay must be >= 0");
  if (rt60.lo < 0.0) throw Error(ErrorKind::kConfig, "rt60 must be >= 0");
  if (!(wall_margin >= 0.0) || room_side.lo <= 2.0 * wall_margin) {
    throw Error(ErrorKind::kConfig, "rooms too small for the wall margin");
  }
  if (!(duration > 0.0)) throw Error(ErrorKind::kConfig, "duration must be positive");
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::kConfig, "sample rate must be positive");
  if (!(target_rms > 0.0)) throw Error(ErrorKind::kConfig, "target level must be positive");
  for (const auto& s : speech_pool) {
    if (s.sample_rate != sample_rate) {
      throw Error(ErrorKind::kConfig, "speech sample rate differs from scene rate");
    }
    if (s.empty()) throw Error(ErrorKind::kEmptyInput, "empty utterance in speech pool");
  }
  if (playback_override && playback_override->sample_rate != sample_rate) {
    throw Error(ErrorKind::kConfig, "playback path sample rate differs from scene rate");
  }
}

namespace {

Vec3 SamplePoint(std::mt19937_64& rng, const Vec3& dims, double margin) {
  return {UniformIn(rng, margin, dims.x - margin), UniformIn(rng, margin, dims.y - margin),
          UniformIn(rng, margin, dims.z - margin)};
}

// Resample until |p| keeps |min_dist| from |other|; gives up after a few
// tries, which only matters in rooms barely larger than the margins.
Vec3 SampleApart(std::mt19937_64& rng, const Vec3& dims, double margin, const Vec3& other,
                 double min_dist) {
  Vec3 p = SamplePoint(rng, dims, margin);
  for (int i = 0; i < 32 && Distance(p, other) < min_dist; ++i) {
    p = SamplePoint(rng, dims, margin);
  }
  return p;
}

AudioBuffer DrawSpeech(const SceneSpec& spec, std::mt19937_64& rng, std::uint64_t speech_seed) {
  const auto want = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
  if (spec.speech_pool.empty()) {
    return SynthesizeSpeech(spec.duration, spec.sample_rate, speech_seed);
  }
  const auto pick = std::min(spec.speech_pool.size() - 1,
                             static_cast<std::size_t>(Uniform01(rng) * spec.speech_pool.size()));
  const AudioBuffer& src = spec.speech_pool[pick];
  if (src.size() <= want) return src;
  const auto offset = static_cast<std::size_t>(Uniform01(rng) * (src.size() - want));
  std::vector<double> seg(src.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                          src.samples.begin() + static_cast<std::ptrdiff_t>(offset + want));
  return AudioBuffer(std::move(seg), spec.sample_rate);
}

}  // namespace

Scene BuildScene(const SceneSpec& spec, std::uint64_t master_seed, std::size_t index) {
  spec.Validate();
  Scene scene;
  scene.index = index;
  scene.seed = DeriveSeed(master_seed, index);
  std::mt19937_64 rng(scene.seed);

  RoomSpec& room = scene.room;
  room.dimensions = {spec.room_side.Sample(rng), spec.room_side.Sample(rng),
                     spec.room_side.Sample(rng)};
  room.rt60 = spec.rt60.Sample(rng);
  room.sample_rate = spec.sample_rate;
  room.rir_length = spec.rir_length;
  room.highpass_hz = spec.rir_highpass_hz;
  room.mic = SamplePoint(rng, room.dimensions, spec.wall_margin);
  room.source =
      SampleApart(rng, room.dimensions, spec.wall_margin, room.mic, spec.min_source_distance);
  scene.talker =
      SampleApart(rng, room.dimensions, spec.wall_margin, room.mic, spec.min_source_distance);
  scene.rt60 = room.rt60;
  scene.gain = spec.gain.Sample(rng);
  scene.delay_seconds = spec.delay.Sample(rng);
  const std::uint64_t speech_seed = rng();
  const std::uint64_t rir_seed = rng();

  scene.rirs = GenerateRirPair(room, scene.talker, rir_seed);
  if (spec.normalize_playback) {
    const double e = scene.rirs.loudspeaker.Energy();
    if (e > 0.0) {
      const double g = 1.0 / std::sqrt(e);
      for (double& t : scene.rirs.loudspeaker.taps) t *= g;
    }
  }
  if (spec.playback_override) scene.rirs.loudspeaker = *spec.playback_override;
  if (spec.zero_coupling) {
    std::fill(scene.rirs.loudspeaker.taps.begin(), scene.rirs.loudspeaker.taps.end(), 0.0);
  }

  scene.dry = DrawSpeech(spec, rng, speech_seed);
  scene.target = AudioBuffer(ConvolveFft(scene.dry.samples, scene.rirs.near_end.taps),
                             spec.sample_rate);
  const double rms = Rms(scene.target.samples);
  if (!(rms > 0.0)) throw Error(ErrorKind::kEmptyInput, "silent near-end target");
  for (double& v : scene.target.samples) v *= spec.target_rms / rms;
  return scene;
}

std::vector<Scene> BuildScenes(const SceneSpec& spec, std::uint64_t master_seed,
                               std::size_t count) {
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) scenes.push_back(BuildScene(spec, master_seed, i));
  return scenes;
}

}  // namespace howl
