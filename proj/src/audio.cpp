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

#include "howl/audio.hpp"

#include <cmath>
#include <string>

#include "howl/common.hpp"

namespace howl {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kConfig: return "configuration";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kUndefined: return "undefined";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

bool AudioBuffer::AllFinite() const {
  for (double v : samples) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void AudioBuffer::Validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorKind::kConfig,
                "sample rate must be positive, got " + std::to_string(sample_rate));
  }
  if (!AllFinite()) {
    throw Error(ErrorKind::kNumeric, "audio buffer contains non-finite samples");
  }
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(Energy(x) / static_cast<double>(x.size()));
}

double Rir::Energy() const { return howl::Energy(taps); }

std::size_t Rir::Support() const {
  std::size_t n = taps.size();
  while (n > 0 && taps[n - 1] == 0.0) --n;
  return n;
}

}  // namespace howl
