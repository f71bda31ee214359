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

#ifndef HOWL_METRICS_SDR_HPP_
#define HOWL_METRICS_SDR_HPP_

#include <span>

#include "howl/audio.hpp"

namespace howl {

inline constexpr double kSdrFloor = -60.0;
inline constexpr double kSdrCeiling = 60.0;

// Scale-invariant SDR in dB, clamped to [-60, 60]. The reference is scaled
// by the least-squares factor <est, ref> / |ref|^2 before measuring the
// residual. Throws kShape for unequal lengths and kUndefined for a silent
// reference; a silent estimate scores the floor.
double SiSdr(std::span<const double> estimate, std::span<const double> reference);
double SiSdr(const AudioBuffer& estimate, const AudioBuffer& reference);

}  // namespace howl

#endif  // HOWL_METRICS_SDR_HPP_
