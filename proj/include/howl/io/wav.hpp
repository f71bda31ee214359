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

#ifndef HOWL_IO_WAV_HPP_
#define HOWL_IO_WAV_HPP_

#include <filesystem>

#include "howl/audio.hpp"

namespace howl {

enum class WavEncoding { kPcm16, kFloat32 };

// Mono RIFF/WAVE. PCM16 output saturates at full scale, so howling
// recordings clip in the file but not in memory. NaN/Inf are written as 0.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio,
              WavEncoding encoding = WavEncoding::kPcm16);

// Reads 16-bit PCM or 32-bit float files. Multi-channel input is averaged
// to mono. Throws kIo on unreadable or malformed files.
AudioBuffer ReadWav(const std::filesystem::path& path);

}  // namespace howl

#endif  // HOWL_IO_WAV_HPP_
