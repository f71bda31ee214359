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

#ifndef HOWL_SCENE_SPEECH_HPP_
#define HOWL_SCENE_SPEECH_HPP_

#include <cstdint>

#include "howl/audio.hpp"

namespace howl {

// Speech-like test signal: voiced syllables (harmonic tones with a gliding
// f0 shaped by three formant bumps), unvoiced noise bursts and short pauses,
// after a 20 ms silent lead-in. Deterministic per seed; scaled to RMS 0.1.
AudioBuffer SynthesizeSpeech(double duration_seconds, double sample_rate, std::uint64_t seed);

}  // namespace howl

#endif  // HOWL_SCENE_SPEECH_HPP_
