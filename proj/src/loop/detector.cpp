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

#include "howl/loop/detector.hpp"

#include <cmath>

#include "howl/common.hpp"

namespace howl {

void HowlingDetectorConfig::Validate() const {
  if (consecutive_samples < 1) {
    throw Error(ErrorKind::kConfig, "detector needs at least one consecutive sample");
  }
  if (!(amplitude_threshold > 0.0)) {
    throw Error(ErrorKind::kConfig, "detector threshold must be positive");
  }
}

HowlingDetector::HowlingDetector(const HowlingDetectorConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
}

DetectionResult HowlingDetector::Scan(std::span<const double> samples) {
  DetectionResult result;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    // NaN compares false and breaks the run; the loop engine halts on
    // non-finite samples before they reach the detector.
    if (std::abs(samples[i]) > cfg_.amplitude_threshold) {
      ++run_;
    } else {
      run_ = 0;
    }
    if (!triggered_ && run_ >= cfg_.consecutive_samples) {
      triggered_ = true;
      result.triggered = true;
      result.trigger_index = i;
    }
  }
  return result;
}

void HowlingDetector::Reset() {
  run_ = 0;
  triggered_ = false;
}

}  // namespace howl
